#ifndef CAUSALMED_MEDIATION_HPP
#define CAUSALMED_MEDIATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "causalmed/counterfactual.hpp"
#include "causalmed/scm.hpp"

namespace causalmed {

enum class EffectKind { Nie, Nde, Te };

std::string_view to_string(EffectKind kind);

struct EffectEstimate {
    double point = 0.0;
    double std_error = 0.0;  // sample stddev of per-draw differences / sqrt(n)
    std::uint64_t n_draws = 0;
    EffectKind kind = EffectKind::Nie;
};

// Full I x J effect grid, row-major over (treatment, mediator) in DAG
// declaration order, plus any warnings raised along the way.
struct NieMatrix {
    std::vector<std::string> treatments;
    std::vector<std::string> mediators;
    std::vector<EffectEstimate> cells;
    std::vector<std::string> warnings;

    const EffectEstimate& at(std::size_t treatment, std::size_t mediator) const {
        return cells[treatment * mediators.size() + mediator];
    }
};

struct McConfig {
    std::uint64_t n_draws = 100000;
    std::uint64_t seed = 0;
    unsigned parallel_workers = 1;  // must stay >= 1; results never depend on it
};

// Natural indirect effect of `treatment` through `mediator`: the mean over
// shared-noise draws of [nested-counterfactual outcome − all-untreated
// baseline]. A pair with no treatment→mediator→outcome route yields an
// exact-zero estimate plus a warning rather than an error, so full effect
// grids stay well-formed.
EffectEstimate estimate_nie(const Scm& scm, const std::string& treatment,
                            const std::string& mediator,
                            const std::vector<TreatmentSpec>& specs, const McConfig& cfg,
                            std::vector<std::string>* warnings = nullptr);

// Every (treatment, mediator) pair; same seed ⇒ same matrix.
NieMatrix estimate_all_nies(const Scm& scm, const std::vector<TreatmentSpec>& specs,
                            const McConfig& cfg);

// Treated-vs-untreated outcome difference with all mediators free.
EffectEstimate estimate_total_effect(const Scm& scm, const std::string& treatment,
                                     const std::vector<TreatmentSpec>& specs,
                                     const McConfig& cfg);

// Direct effect with every mediator pinned to its baseline natural value.
// Defined for single-treatment graphs only.
EffectEstimate estimate_nde(const Scm& scm, const std::string& treatment,
                            const std::vector<TreatmentSpec>& specs, const McConfig& cfg);

// Analytic oracles for all-linear models (NotLinear otherwise). `delta` is
// the treated-minus-untreated difference applied to the treatment.
double closed_form_linear_nie(const Scm& scm, const std::string& treatment,
                              const std::string& mediator, double delta);
double closed_form_linear_total_effect(const Scm& scm, const std::string& treatment,
                                       double delta);
double closed_form_linear_nde(const Scm& scm, const std::string& treatment, double delta);

}  // namespace causalmed

#endif  // CAUSALMED_MEDIATION_HPP
