#ifndef CAUSALMED_DISCRETE_ORACLE_HPP
#define CAUSALMED_DISCRETE_ORACLE_HPP

#include <map>
#include <string>
#include <vector>

#include "causalmed/counterfactual.hpp"
#include "causalmed/scm.hpp"

namespace causalmed {

// Exact expectations by brute-force enumeration of the joint noise support.
// Requires every noise model to have finite support (pmf or degenerate);
// mechanisms may be of any kind. The joint support size is capped at 10^6
// (SupportTooLarge beyond that). Results are exactly invariant to the
// enumeration order: contributions are sorted before compensated summation.

// True when every noise model has finite support, i.e. the exact routines
// below apply.
bool finite_noise_support(const Scm& scm);

// E[outcome] under fixed interventions (do-semantics, as in evaluate).
double exact_expected_outcome(const Scm& scm,
                              const std::map<std::string, double>& interventions);

// E[outcome] under the nested counterfactual assignment of `spec`.
double exact_expected_aleph_outcome(const Scm& scm, const AlephSpec& spec);

// E[outcome] under all treatments untreated.
double exact_expected_baseline_outcome(const Scm& scm,
                                       const std::vector<TreatmentSpec>& specs);

// Exact natural indirect effect: aleph-arm expectation minus baseline-arm
// expectation. Identical arms cancel exactly (treated == untreated gives a
// hard 0, not a rounded one).
double exact_nie(const Scm& scm, const std::string& treatment, const std::string& mediator,
                 const std::vector<TreatmentSpec>& specs);

}  // namespace causalmed

#endif  // CAUSALMED_DISCRETE_ORACLE_HPP
