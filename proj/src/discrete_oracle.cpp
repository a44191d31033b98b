#include "causalmed/discrete_oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

#include "causalmed/summation.hpp"

namespace causalmed {

namespace {

constexpr std::uint64_t kMaxSupport = 1000000;

struct NodeSupport {
    int node = -1;
    std::vector<double> values;
    std::vector<double> probabilities;
};

// Pulls each non-treatment node's finite noise support, or throws.
std::vector<NodeSupport> collect_supports(const Scm& scm) {
    std::vector<NodeSupport> supports;
    const CausalDag& dag = scm.dag();
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const int node = static_cast<int>(i);
        if (scm.is_treatment(node)) continue;
        const NoiseModel& model = scm.noise_model(node);
        NodeSupport s;
        s.node = node;
        if (const auto* pmf = std::get_if<PmfNoise>(&model)) {
            s.values = pmf->values;
            s.probabilities = pmf->probabilities;
        } else if (const auto* deg = std::get_if<DegenerateNoise>(&model)) {
            s.values = {deg->value};
            s.probabilities = {1.0};
        } else {
            throw Error(ErrorCode::InvalidModel,
                        "exact expectation needs finite noise support, but '" + dag.name(node) +
                            "' has continuous noise");
        }
        supports.push_back(std::move(s));
    }

    std::uint64_t total = 1;
    for (const NodeSupport& s : supports) {
        total *= s.values.size();
        if (total > kMaxSupport) {
            throw Error(ErrorCode::SupportTooLarge,
                        "joint noise support exceeds " + std::to_string(kMaxSupport) +
                            " configurations");
        }
    }
    return supports;
}

// Runs `evaluate_arm(noise)` for every joint noise configuration and
// returns the probability-weighted contributions, summed in sorted order so
// the result cannot depend on how the support was enumerated.
template <typename Arm>
double enumerate_expectation(const Scm& scm, const std::vector<NodeSupport>& supports,
                             Arm evaluate_arm) {
    NoiseVector noise(scm.dag().node_count(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> odometer(supports.size(), 0);
    std::vector<double> contributions;

    bool running = true;
    while (running) {
        double probability = 1.0;
        for (std::size_t i = 0; i < supports.size(); ++i) {
            const NodeSupport& s = supports[i];
            noise[static_cast<std::size_t>(s.node)] = s.values[odometer[i]];
            probability *= s.probabilities[odometer[i]];
        }
        contributions.push_back(probability * evaluate_arm(noise));

        // Advance the mixed-radix odometer.
        running = false;
        for (std::size_t i = 0; i < odometer.size(); ++i) {
            if (++odometer[i] < supports[i].values.size()) {
                running = true;
                break;
            }
            odometer[i] = 0;
        }
        if (odometer.empty()) break;  // no noise nodes: single configuration
    }

    std::sort(contributions.begin(), contributions.end());
    NeumaierSum sum;
    for (double c : contributions) sum.add(c);
    return sum.value();
}

std::vector<ResolvedTreatment> resolve_specs(const Scm& scm,
                                             const std::vector<TreatmentSpec>& specs) {
    std::vector<ResolvedTreatment> out;
    out.reserve(specs.size());
    for (const TreatmentSpec& spec : specs) {
        int node = scm.dag().index_of(spec.node);
        if (scm.dag().role(node) != NodeRole::Treatment) {
            throw Error(ErrorCode::InvalidRole, "'" + spec.node + "' is not a treatment node");
        }
        auto [untreated, treated] = resolve_treatment_values(spec);
        out.push_back({node, untreated, treated});
    }
    return out;
}

}  // namespace

bool finite_noise_support(const Scm& scm) {
    const CausalDag& dag = scm.dag();
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const int node = static_cast<int>(i);
        if (scm.is_treatment(node)) continue;
        const NoiseModel& model = scm.noise_model(node);
        if (!std::holds_alternative<PmfNoise>(model) &&
            !std::holds_alternative<DegenerateNoise>(model)) {
            return false;
        }
    }
    return true;
}

double exact_expected_outcome(const Scm& scm,
                              const std::map<std::string, double>& interventions) {
    auto supports = collect_supports(scm);
    Evaluator evaluator(scm);
    std::vector<char> forced(scm.dag().node_count(), 0);
    std::vector<double> forced_value(scm.dag().node_count(), 0.0);
    for (const auto& [name, value] : interventions) {
        int idx = scm.dag().index_of(name);
        forced[static_cast<std::size_t>(idx)] = 1;
        forced_value[static_cast<std::size_t>(idx)] = value;
    }
    const auto outcome = static_cast<std::size_t>(scm.dag().outcome_index());
    Valuation valuation;
    return enumerate_expectation(scm, supports, [&](const NoiseVector& noise) {
        evaluator.evaluate(forced, forced_value, noise, valuation);
        return valuation[outcome];
    });
}

double exact_expected_aleph_outcome(const Scm& scm, const AlephSpec& spec) {
    auto supports = collect_supports(scm);
    int treatment = scm.dag().index_of(spec.treatment_of_interest);
    int mediator = scm.dag().index_of(spec.mediator_of_interest);
    auto resolved = resolve_specs(scm, spec.all_treatments);
    if (std::none_of(resolved.begin(), resolved.end(),
                     [treatment](const ResolvedTreatment& t) { return t.node == treatment; })) {
        throw Error(ErrorCode::MissingTreatmentValue,
                    "treatment of interest '" + spec.treatment_of_interest +
                        "' is missing from the treatment specs");
    }
    CounterfactualEngine engine(scm);
    return enumerate_expectation(scm, supports, [&](const NoiseVector& noise) {
        return engine.aleph(treatment, mediator, resolved, noise);
    });
}

double exact_expected_baseline_outcome(const Scm& scm,
                                       const std::vector<TreatmentSpec>& specs) {
    auto supports = collect_supports(scm);
    auto resolved = resolve_specs(scm, specs);
    CounterfactualEngine engine(scm);
    return enumerate_expectation(
        scm, supports, [&](const NoiseVector& noise) { return engine.baseline(resolved, noise); });
}

double exact_nie(const Scm& scm, const std::string& treatment, const std::string& mediator,
                 const std::vector<TreatmentSpec>& specs) {
    AlephSpec spec{treatment, mediator, specs};
    int m = scm.dag().index_of(mediator);
    if (scm.dag().role(m) != NodeRole::Mediator) {
        throw Error(ErrorCode::InvalidRole, "'" + mediator + "' is not a mediator node");
    }
    double aleph = exact_expected_aleph_outcome(scm, spec);
    double baseline = exact_expected_baseline_outcome(scm, specs);
    return aleph - baseline;
}

}  // namespace causalmed
