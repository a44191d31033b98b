#ifndef CAUSALMED_COUNTERFACTUAL_HPP
#define CAUSALMED_COUNTERFACTUAL_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "causalmed/scm.hpp"

namespace causalmed {

// Untreated-value source drawn from observed data: one uniformly resampled
// observation per draw. The pool is shared, never copied per spec.
struct ObservedSample {
    std::shared_ptr<const std::vector<double>> pool;
    std::string column;  // where the pool came from, for messages/serialization
};

// Treated value expressed relative to the untreated value (e.g. 1.5 for a
// 50% increase).
struct Multiplier {
    double factor = 1.0;
};

// How one treatment's two arms are valued. The untreated side is either an
// explicit number or a per-draw observed sample; the treated side is either
// explicit or a multiplier on the untreated value.
struct TreatmentSpec {
    std::string node;
    std::variant<double, ObservedSample> untreated;
    std::variant<double, Multiplier> treated;
};

// The nested counterfactual assignment for one treatment–mediator pair:
// pass 1 records the mediator's natural value with only the treatment of
// interest treated; pass 2 holds every treatment untreated, pins the
// mediator at that value, and lets every other mediator respond freely.
struct AlephSpec {
    std::string treatment_of_interest;
    std::string mediator_of_interest;
    std::vector<TreatmentSpec> all_treatments;
};

// Both arms of one treatment, resolved to concrete numbers for one draw.
struct ResolvedTreatment {
    int node = -1;
    double untreated = 0.0;
    double treated = 0.0;
};

// Resolves a spec's two arms. `observed` feeds the observed-sample form and
// is required for it (MissingObservation otherwise); the multiplier form
// scales the resolved untreated value.
std::pair<double, double> resolve_treatment_values(const TreatmentSpec& spec,
                                                   std::optional<double> observed = std::nullopt);

// Per-draw resolution of every treatment in `specs`. Observed-sample
// untreated values resample from the pool using the treatment's own
// substream, so results depend only on (seed, node, draw).
std::vector<ResolvedTreatment> resolve_all_treatments(const Scm& scm,
                                                      const std::vector<TreatmentSpec>& specs,
                                                      std::uint64_t root_seed,
                                                      std::uint64_t draw_index);

// Reusable engine for the two-pass counterfactual evaluation and its
// baseline arm. One instance per thread; evaluations share no state.
class CounterfactualEngine {
  public:
    explicit CounterfactualEngine(const Scm& scm);

    const Scm& scm() const { return evaluator_.scm(); }
    const Evaluator& evaluator() const { return evaluator_; }

    void draw_noise(std::uint64_t root_seed, std::uint64_t draw_index, NoiseVector& noise) const {
        evaluator_.draw_noise(root_seed, draw_index, noise);
    }

    // Outcome under all treatments untreated, everything else natural.
    double baseline(std::span<const ResolvedTreatment> treatments, const NoiseVector& noise);

    // Like baseline, but also copies the mediators' natural values into
    // `mediator_values` (aligned with dag().mediator_order()).
    double baseline_recording_mediators(std::span<const ResolvedTreatment> treatments,
                                        const NoiseVector& noise,
                                        std::vector<double>& mediator_values);

    // Two-pass nested counterfactual for (treatment, mediator), both passes
    // under the one shared noise vector. Returns the outcome value.
    double aleph(int treatment, int mediator, std::span<const ResolvedTreatment> treatments,
                 const NoiseVector& noise);

    // Outcome with the treatment of interest treated, all other treatments
    // untreated, all mediators free (the treated arm of a total effect).
    double treated_outcome(int treatment, std::span<const ResolvedTreatment> treatments,
                           const NoiseVector& noise);

    // Outcome with the treatment treated and every mediator pinned to the
    // supplied (baseline-natural) values — the direct-effect arm.
    double direct_outcome(int treatment, std::span<const ResolvedTreatment> treatments,
                          std::span<const double> mediator_values, const NoiseVector& noise);

    // Pass-1 mediator value of the last aleph() call, for inspection.
    double last_natural_mediator_value() const { return last_m_star_; }

  private:
    void reset_forced(std::span<const ResolvedTreatment> treatments, bool treat_node, int node);

    Evaluator evaluator_;
    std::vector<char> forced_;
    std::vector<double> forced_value_;
    Valuation valuation_;
    double last_m_star_ = 0.0;
};

// One-shot spec-driven wrappers (throw MissingObservation when a spec needs
// per-draw resampling — use the engine plus resolve_all_treatments there).

// Two-pass nested counterfactual outcome under one shared noise vector.
double evaluate_aleph(const Scm& scm, const AlephSpec& spec, const NoiseVector& noise);

// All-treatments-untreated outcome under the same noise contract.
double evaluate_baseline(const Scm& scm, const std::vector<TreatmentSpec>& specs,
                         const NoiseVector& noise);

}  // namespace causalmed

#endif  // CAUSALMED_COUNTERFACTUAL_HPP
