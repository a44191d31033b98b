#include "causalmed/counterfactual.hpp"

#include <algorithm>

namespace causalmed {

std::pair<double, double> resolve_treatment_values(const TreatmentSpec& spec,
                                                   std::optional<double> observed) {
    double untreated;
    if (const double* value = std::get_if<double>(&spec.untreated)) {
        untreated = *value;
    } else {
        if (!observed) {
            throw Error(ErrorCode::MissingObservation,
                        "treatment '" + spec.node +
                            "' draws its untreated value from observations, but none was supplied");
        }
        untreated = *observed;
    }
    double treated;
    if (const double* value = std::get_if<double>(&spec.treated)) {
        treated = *value;
    } else {
        treated = untreated * std::get<Multiplier>(spec.treated).factor;
    }
    return {untreated, treated};
}

std::vector<ResolvedTreatment> resolve_all_treatments(const Scm& scm,
                                                      const std::vector<TreatmentSpec>& specs,
                                                      std::uint64_t root_seed,
                                                      std::uint64_t draw_index) {
    std::vector<ResolvedTreatment> out;
    out.reserve(specs.size());
    for (const TreatmentSpec& spec : specs) {
        int node = scm.dag().index_of(spec.node);
        if (scm.dag().role(node) != NodeRole::Treatment) {
            throw Error(ErrorCode::InvalidRole, "'" + spec.node + "' is not a treatment node");
        }
        std::optional<double> observed;
        if (const auto* sample = std::get_if<ObservedSample>(&spec.untreated)) {
            if (!sample->pool || sample->pool->empty()) {
                throw Error(ErrorCode::MissingObservation,
                            "treatment '" + spec.node + "' has an empty observation pool");
            }
            // Treatments carry no noise, so their substream is free for this.
            SampleStream stream(root_seed, hash_name(spec.node), draw_index);
            observed = (*sample->pool)[stream.pick(sample->pool->size())];
        }
        auto [untreated, treated] = resolve_treatment_values(spec, observed);
        out.push_back({node, untreated, treated});
    }
    return out;
}

CounterfactualEngine::CounterfactualEngine(const Scm& scm) : evaluator_(scm) {
    forced_.resize(scm.dag().node_count());
    forced_value_.resize(scm.dag().node_count());
}

void CounterfactualEngine::reset_forced(std::span<const ResolvedTreatment> treatments,
                                        bool treat_node, int node) {
    std::fill(forced_.begin(), forced_.end(), 0);
    for (const ResolvedTreatment& t : treatments) {
        const auto idx = static_cast<std::size_t>(t.node);
        forced_[idx] = 1;
        forced_value_[idx] = (treat_node && t.node == node) ? t.treated : t.untreated;
    }
}

double CounterfactualEngine::baseline(std::span<const ResolvedTreatment> treatments,
                                      const NoiseVector& noise) {
    reset_forced(treatments, false, -1);
    evaluator_.evaluate(forced_, forced_value_, noise, valuation_);
    return valuation_[static_cast<std::size_t>(scm().dag().outcome_index())];
}

double CounterfactualEngine::baseline_recording_mediators(
    std::span<const ResolvedTreatment> treatments, const NoiseVector& noise,
    std::vector<double>& mediator_values) {
    double outcome = baseline(treatments, noise);
    const auto& order = scm().dag().mediator_order();
    mediator_values.resize(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        mediator_values[j] = valuation_[static_cast<std::size_t>(order[j])];
    }
    return outcome;
}

double CounterfactualEngine::aleph(int treatment, int mediator,
                                   std::span<const ResolvedTreatment> treatments,
                                   const NoiseVector& noise) {
    // Pass 1: the treatment of interest treated, every other treatment
    // untreated; read off the mediator's natural value.
    reset_forced(treatments, true, treatment);
    evaluator_.evaluate(forced_, forced_value_, noise, valuation_);
    const double m_star = valuation_[static_cast<std::size_t>(mediator)];
    last_m_star_ = m_star;

    // Pass 2: all treatments untreated, the mediator pinned at its natural
    // value, all other mediators free — same noise vector throughout.
    reset_forced(treatments, false, -1);
    forced_[static_cast<std::size_t>(mediator)] = 1;
    forced_value_[static_cast<std::size_t>(mediator)] = m_star;
    evaluator_.evaluate(forced_, forced_value_, noise, valuation_);
    return valuation_[static_cast<std::size_t>(scm().dag().outcome_index())];
}

double CounterfactualEngine::treated_outcome(int treatment,
                                             std::span<const ResolvedTreatment> treatments,
                                             const NoiseVector& noise) {
    reset_forced(treatments, true, treatment);
    evaluator_.evaluate(forced_, forced_value_, noise, valuation_);
    return valuation_[static_cast<std::size_t>(scm().dag().outcome_index())];
}

double CounterfactualEngine::direct_outcome(int treatment,
                                            std::span<const ResolvedTreatment> treatments,
                                            std::span<const double> mediator_values,
                                            const NoiseVector& noise) {
    reset_forced(treatments, true, treatment);
    const auto& order = scm().dag().mediator_order();
    for (std::size_t j = 0; j < order.size(); ++j) {
        forced_[static_cast<std::size_t>(order[j])] = 1;
        forced_value_[static_cast<std::size_t>(order[j])] = mediator_values[j];
    }
    evaluator_.evaluate(forced_, forced_value_, noise, valuation_);
    return valuation_[static_cast<std::size_t>(scm().dag().outcome_index())];
}

namespace {

std::vector<ResolvedTreatment> resolve_without_data(const Scm& scm,
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

double evaluate_aleph(const Scm& scm, const AlephSpec& spec, const NoiseVector& noise) {
    int treatment = scm.dag().index_of(spec.treatment_of_interest);
    int mediator = scm.dag().index_of(spec.mediator_of_interest);
    if (scm.dag().role(mediator) != NodeRole::Mediator) {
        throw Error(ErrorCode::InvalidRole,
                    "'" + spec.mediator_of_interest + "' is not a mediator node");
    }
    bool covered = false;
    for (const TreatmentSpec& t : spec.all_treatments) {
        covered = covered || t.node == spec.treatment_of_interest;
    }
    if (!covered) {
        throw Error(ErrorCode::MissingTreatmentValue,
                    "treatment of interest '" + spec.treatment_of_interest +
                        "' is missing from the treatment specs");
    }
    auto resolved = resolve_without_data(scm, spec.all_treatments);
    CounterfactualEngine engine(scm);
    return engine.aleph(treatment, mediator, resolved, noise);
}

double evaluate_baseline(const Scm& scm, const std::vector<TreatmentSpec>& specs,
                         const NoiseVector& noise) {
    auto resolved = resolve_without_data(scm, specs);
    CounterfactualEngine engine(scm);
    return engine.baseline(resolved, noise);
}

}  // namespace causalmed
