#ifndef CAUSALMED_REPORT_HPP
#define CAUSALMED_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalmed/mediation.hpp"

namespace causalmed {

// Everything one analysis run produced: the full NIE grid, total effects
// per treatment, the direct effect when the graph has a single treatment,
// and enough metadata (seed, draw count, model hash) to audit a rerun.
struct AnalysisReport {
    NieMatrix matrix;
    std::vector<std::pair<std::string, EffectEstimate>> total_effects;
    std::optional<std::pair<std::string, EffectEstimate>> direct_effect;
    std::uint64_t seed = 0;
    std::uint64_t n_draws = 0;
    std::string model_hash;
    std::vector<std::string> warnings;
};

// Tab-separated rendering: `#`-prefixed metadata lines, a header, then one
// row per effect. Numbers carry 6 significant digits.
std::string to_tsv(const AnalysisReport& report);

// Structured rendering with full double precision.
std::string to_json_text(const AnalysisReport& report);

}  // namespace causalmed

#endif  // CAUSALMED_REPORT_HPP
