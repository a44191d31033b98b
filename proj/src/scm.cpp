#include "causalmed/scm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace causalmed {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void validate_noise(const NoiseModel& model, const std::string& node) {
    if (const auto* g = std::get_if<GaussianNoise>(&model)) {
        if (!(g->stddev >= 0.0)) {
            throw Error(ErrorCode::InvalidModel,
                        "gaussian noise of '" + node + "' has negative stddev");
        }
        return;
    }
    if (const auto* p = std::get_if<PmfNoise>(&model)) {
        if (p->values.empty() || p->values.size() != p->probabilities.size()) {
            throw Error(ErrorCode::InvalidModel,
                        "pmf noise of '" + node + "' needs matching non-empty values/probabilities");
        }
        double sum = 0.0;
        for (double q : p->probabilities) {
            if (!(q >= 0.0)) {
                throw Error(ErrorCode::InvalidModel,
                            "pmf noise of '" + node + "' has a negative probability");
            }
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw Error(ErrorCode::InvalidModel,
                        "pmf noise of '" + node + "' probabilities sum to " + std::to_string(sum));
        }
        return;
    }
    if (const auto* e = std::get_if<EmpiricalNoise>(&model)) {
        if (e->residuals.empty()) {
            throw Error(ErrorCode::InvalidModel,
                        "empirical noise of '" + node + "' has no residuals");
        }
        return;
    }
    // DegenerateNoise: nothing to check.
}

double sample_noise(const NoiseModel& model, SampleStream& stream) {
    if (const auto* g = std::get_if<GaussianNoise>(&model)) {
        return stream.gaussian(g->mean, g->stddev);
    }
    if (const auto* p = std::get_if<PmfNoise>(&model)) {
        return p->values[stream.categorical(p->probabilities)];
    }
    if (const auto* e = std::get_if<EmpiricalNoise>(&model)) {
        return e->residuals[stream.pick(e->residuals.size())];
    }
    return std::get<DegenerateNoise>(model).value;
}

std::string_view to_string(NoiseCombine combine) {
    switch (combine) {
        case NoiseCombine::Add: return "add";
        case NoiseCombine::Xor: return "xor";
        case NoiseCombine::Or: return "or";
        case NoiseCombine::And: return "and";
    }
    return "unknown";
}

NoiseCombine noise_combine_from_string(std::string_view text) {
    if (text == "add") return NoiseCombine::Add;
    if (text == "xor") return NoiseCombine::Xor;
    if (text == "or") return NoiseCombine::Or;
    if (text == "and") return NoiseCombine::And;
    throw Error(ErrorCode::ParseError, "unknown noise combine '" + std::string(text) + "'");
}

namespace {

void validate_mechanism(const Mechanism& mechanism, const CausalDag& dag, int node) {
    const std::string& node_name = dag.name(node);
    if (const auto* lin = std::get_if<LinearMechanism>(&mechanism)) {
        const auto& parents = dag.parents(node);
        if (lin->coefficients.size() != parents.size()) {
            throw Error(ErrorCode::InvalidModel,
                        "linear mechanism of '" + node_name + "' has " +
                            std::to_string(lin->coefficients.size()) + " coefficients for " +
                            std::to_string(parents.size()) + " parents");
        }
        for (int p : parents) {
            if (!lin->coefficients.count(dag.name(p))) {
                throw Error(ErrorCode::InvalidModel, "linear mechanism of '" + node_name +
                                                         "' is missing a coefficient for parent '" +
                                                         dag.name(p) + "'");
            }
        }
        return;
    }
    if (const auto* tab = std::get_if<TableMechanism>(&mechanism)) {
        const std::size_t width = dag.parents(node).size();
        for (const auto& [key, value] : tab->rows) {
            (void)value;
            if (key.size() != width) {
                throw Error(ErrorCode::InvalidModel,
                            "table mechanism of '" + node_name + "' has a row keyed by " +
                                std::to_string(key.size()) + " values; the node has " +
                                std::to_string(width) + " parents");
            }
        }
        for (std::size_t i = 1; i < tab->rows.size(); ++i) {
            if (tab->rows[i - 1].first == tab->rows[i].first) {
                throw Error(ErrorCode::InvalidModel,
                            "table mechanism of '" + node_name + "' has duplicate row keys");
            }
        }
        return;
    }
    const auto& opq = std::get<OpaqueMechanism>(mechanism);
    if (!opq.fn) {
        throw Error(ErrorCode::InvalidModel,
                    "opaque mechanism of '" + node_name + "' has no function");
    }
}

}  // namespace

Scm::Scm(CausalDag dag, std::map<std::string, Mechanism> mechanisms,
         std::map<std::string, NoiseModel> noise, std::map<std::string, double> treatment_defaults)
    : dag_(std::move(dag)) {
    const std::size_t n = dag_.node_count();
    mechanisms_.resize(n);
    noise_.resize(n);
    treatment_defaults_.resize(n);

    for (auto& [name, mech] : mechanisms) {
        int idx = dag_.index_of(name);
        if (is_treatment(idx)) {
            throw Error(ErrorCode::InvalidModel,
                        "treatment '" + name + "' must not carry a mechanism");
        }
        // Table lookups binary-search, so keep rows key-sorted from the start.
        if (auto* tab = std::get_if<TableMechanism>(&mech)) {
            std::sort(tab->rows.begin(), tab->rows.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        mechanisms_[static_cast<std::size_t>(idx)] = std::move(mech);
    }
    for (auto& [name, model] : noise) {
        int idx = dag_.index_of(name);
        if (is_treatment(idx)) {
            throw Error(ErrorCode::InvalidModel,
                        "treatment '" + name + "' must not carry a noise model");
        }
        validate_noise(model, name);
        noise_[static_cast<std::size_t>(idx)] = std::move(model);
    }
    for (auto& [name, value] : treatment_defaults) {
        int idx = dag_.index_of(name);
        if (!is_treatment(idx)) {
            throw Error(ErrorCode::InvalidModel,
                        "'" + name + "' is not a treatment; only treatments take default values");
        }
        treatment_defaults_[static_cast<std::size_t>(idx)] = value;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (is_treatment(static_cast<int>(i))) continue;
        if (!mechanisms_[i]) {
            throw Error(ErrorCode::InvalidModel,
                        "node '" + dag_.name(static_cast<int>(i)) + "' has no mechanism");
        }
        if (!noise_[i]) {
            throw Error(ErrorCode::InvalidModel,
                        "node '" + dag_.name(static_cast<int>(i)) + "' has no noise model");
        }
        validate_mechanism(*mechanisms_[i], dag_, static_cast<int>(i));
    }
}

const Mechanism& Scm::mechanism(int node) const {
    const auto& slot = mechanisms_[static_cast<std::size_t>(node)];
    if (!slot) {
        throw Error(ErrorCode::InvalidModel,
                    "treatment '" + dag_.name(node) + "' has no mechanism");
    }
    return *slot;
}

const NoiseModel& Scm::noise_model(int node) const {
    const auto& slot = noise_[static_cast<std::size_t>(node)];
    if (!slot) {
        throw Error(ErrorCode::InvalidModel,
                    "treatment '" + dag_.name(node) + "' has no noise model");
    }
    return *slot;
}

std::optional<double> Scm::treatment_default(int node) const {
    return treatment_defaults_[static_cast<std::size_t>(node)];
}

bool Scm::all_linear() const {
    for (std::size_t i = 0; i < dag_.node_count(); ++i) {
        if (is_treatment(static_cast<int>(i))) continue;
        if (!std::holds_alternative<LinearMechanism>(*mechanisms_[i])) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Evaluator

Evaluator::Evaluator(const Scm& scm) : scm_(&scm), node_count_(scm.dag().node_count()) {
    const CausalDag& dag = scm.dag();
    name_hash_.resize(node_count_);
    treatment_default_.resize(node_count_);
    for (std::size_t i = 0; i < node_count_; ++i) {
        name_hash_[i] = hash_name(dag.name(static_cast<int>(i)));
        if (scm.is_treatment(static_cast<int>(i))) {
            treatment_default_[i] = scm.treatment_default(static_cast<int>(i));
        }
    }
    for (int node : dag.topological_indices()) {
        if (scm.is_treatment(node)) continue;
        CompiledNode cn;
        cn.node = node;
        cn.mechanism = &scm.mechanism(node);
        cn.noise = &scm.noise_model(node);
        cn.parents = dag.parents(node);
        if (const auto* lin = std::get_if<LinearMechanism>(cn.mechanism)) {
            cn.kind = 0;
            cn.intercept = lin->intercept;
            cn.linear_coefs.reserve(cn.parents.size());
            for (int p : cn.parents) cn.linear_coefs.push_back(lin->coefficients.at(dag.name(p)));
        } else if (std::holds_alternative<TableMechanism>(*cn.mechanism)) {
            cn.kind = 1;
        } else {
            cn.kind = 2;
        }
        plan_.push_back(std::move(cn));
    }
}

void Evaluator::draw_noise(std::uint64_t root_seed, std::uint64_t draw_index,
                           NoiseVector& out) const {
    out.assign(node_count_, kNan);
    for (const CompiledNode& cn : plan_) {
        SampleStream stream(root_seed, name_hash_[static_cast<std::size_t>(cn.node)], draw_index);
        out[static_cast<std::size_t>(cn.node)] = sample_noise(*cn.noise, stream);
    }
}

namespace {

// Lexicographic compare of a table row key against the current parent
// values, read straight out of the valuation (no key materialization).
bool row_less_than_parents(const std::vector<double>& key, const std::vector<int>& parents,
                           const Valuation& values) {
    for (std::size_t i = 0; i < key.size(); ++i) {
        double parent = values[static_cast<std::size_t>(parents[i])];
        if (key[i] < parent) return true;
        if (key[i] > parent) return false;
    }
    return false;
}

double lookup_table(const TableMechanism& table, const std::vector<int>& parents,
                    const Valuation& values, const std::string& node_name) {
    auto it = std::lower_bound(
        table.rows.begin(), table.rows.end(), values,
        [&parents](const std::pair<std::vector<double>, double>& row, const Valuation& vals) {
            return row_less_than_parents(row.first, parents, vals);
        });
    if (it != table.rows.end()) {
        bool match = true;
        for (std::size_t i = 0; i < it->first.size(); ++i) {
            if (it->first[i] != values[static_cast<std::size_t>(parents[i])]) {
                match = false;
                break;
            }
        }
        if (match) return it->second;
    }
    std::string key_text;
    for (int p : parents) {
        if (!key_text.empty()) key_text += ", ";
        key_text += std::to_string(values[static_cast<std::size_t>(p)]);
    }
    throw Error(ErrorCode::DomainError,
                "table mechanism of '" + node_name + "' has no row for parents (" + key_text + ")");
}

double combine_noise(double value, double noise, NoiseCombine combine) {
    switch (combine) {
        case NoiseCombine::Add: return value + noise;
        case NoiseCombine::Xor:
            return static_cast<double>(static_cast<long long>(value) ^
                                       static_cast<long long>(noise));
        case NoiseCombine::Or:
            return static_cast<double>(static_cast<long long>(value) |
                                       static_cast<long long>(noise));
        case NoiseCombine::And:
            return static_cast<double>(static_cast<long long>(value) &
                                       static_cast<long long>(noise));
    }
    return value + noise;
}

}  // namespace

void Evaluator::evaluate(std::span<const char> forced, std::span<const double> forced_value,
                         const NoiseVector& noise, Valuation& out) const {
    out.resize(node_count_);
    const CausalDag& dag = scm_->dag();

    // Treatments and forced nodes first; everything else is overwritten in
    // plan order below.
    for (std::size_t i = 0; i < node_count_; ++i) {
        if (forced[i]) {
            out[i] = forced_value[i];
        } else if (scm_->is_treatment(static_cast<int>(i))) {
            if (!treatment_default_[i]) {
                throw Error(ErrorCode::MissingTreatmentValue,
                            "treatment '" + dag.name(static_cast<int>(i)) +
                                "' has no intervention value and no default");
            }
            out[i] = *treatment_default_[i];
        }
    }

    for (const CompiledNode& cn : plan_) {
        const auto idx = static_cast<std::size_t>(cn.node);
        if (forced[idx]) continue;  // do-semantics: forced value wins outright
        const double u = noise[idx];
        switch (cn.kind) {
            case 0: {
                double acc = cn.intercept;
                for (std::size_t i = 0; i < cn.parents.size(); ++i) {
                    acc += cn.linear_coefs[i] * out[static_cast<std::size_t>(cn.parents[i])];
                }
                out[idx] = acc + u;
                break;
            }
            case 1: {
                const auto& table = std::get<TableMechanism>(*cn.mechanism);
                double base = lookup_table(table, cn.parents, out, dag.name(cn.node));
                out[idx] = combine_noise(base, u, table.combine);
                break;
            }
            default: {
                const auto& opq = std::get<OpaqueMechanism>(*cn.mechanism);
                // Parent values are contiguous only by index, so gather.
                thread_local std::vector<double> scratch;
                scratch.clear();
                for (int p : cn.parents) scratch.push_back(out[static_cast<std::size_t>(p)]);
                out[idx] = opq.fn(std::span<const double>(scratch), u);
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Map-based convenience layer

NoiseVector noise_from_map(const CausalDag& dag, const std::map<std::string, double>& values) {
    NoiseVector out(dag.node_count(), kNan);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        if (dag.role(static_cast<int>(i)) != NodeRole::Treatment) ++expected;
    }
    if (values.size() != expected) {
        throw Error(ErrorCode::InvalidModel,
                    "noise map must name every non-treatment node exactly once");
    }
    for (const auto& [name, value] : values) {
        int idx = dag.index_of(name);
        if (dag.role(idx) == NodeRole::Treatment) {
            throw Error(ErrorCode::InvalidModel,
                        "treatment '" + name + "' cannot carry noise");
        }
        out[static_cast<std::size_t>(idx)] = value;
    }
    return out;
}

std::map<std::string, double> valuation_to_map(const CausalDag& dag, const Valuation& values) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        out.emplace(dag.name(static_cast<int>(i)), values[i]);
    }
    return out;
}

NoiseVector draw_noise(const Scm& scm, SeedStream& stream) {
    Evaluator evaluator(scm);
    NoiseVector out;
    evaluator.draw_noise(stream.root_seed, stream.next_draw++, out);
    return out;
}

Valuation evaluate(const Scm& scm, const std::map<std::string, double>& interventions,
                   const NoiseVector& noise) {
    Evaluator evaluator(scm);
    std::vector<char> forced(scm.dag().node_count(), 0);
    std::vector<double> forced_value(scm.dag().node_count(), 0.0);
    for (const auto& [name, value] : interventions) {
        int idx = scm.dag().index_of(name);
        forced[static_cast<std::size_t>(idx)] = 1;
        forced_value[static_cast<std::size_t>(idx)] = value;
    }
    Valuation out;
    evaluator.evaluate(forced, forced_value, noise, out);
    return out;
}

std::vector<Valuation> simulate(const Scm& scm,
                                const std::map<std::string, double>& treatment_values,
                                std::uint64_t n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidCount, "simulate needs at least one draw");
    }
    Evaluator evaluator(scm);
    std::vector<char> forced(scm.dag().node_count(), 0);
    std::vector<double> forced_value(scm.dag().node_count(), 0.0);
    for (const auto& [name, value] : treatment_values) {
        int idx = scm.dag().index_of(name);
        forced[static_cast<std::size_t>(idx)] = 1;
        forced_value[static_cast<std::size_t>(idx)] = value;
    }
    std::vector<Valuation> out;
    out.reserve(n);
    NoiseVector noise;
    for (std::uint64_t k = 0; k < n; ++k) {
        evaluator.draw_noise(seed, k, noise);
        Valuation v;
        evaluator.evaluate(forced, forced_value, noise, v);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace causalmed
