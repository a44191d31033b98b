#ifndef CAUSALMED_SCM_HPP
#define CAUSALMED_SCM_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "causalmed/graph.hpp"
#include "causalmed/rng.hpp"

namespace causalmed {

// ---------------------------------------------------------------------------
// Noise models — the exogenous input u of each structural equation.

struct GaussianNoise {
    double mean = 0.0;
    double stddev = 1.0;  // must be >= 0
};

struct PmfNoise {
    std::vector<double> values;
    std::vector<double> probabilities;  // non-negative, sum to 1 within 1e-12
};

// Uniform resampling from a fixed residual pool (the fitting module's
// default noise). Must be non-empty.
struct EmpiricalNoise {
    std::vector<double> residuals;
};

struct DegenerateNoise {
    double value = 0.0;
};

using NoiseModel = std::variant<GaussianNoise, PmfNoise, EmpiricalNoise, DegenerateNoise>;

// Throws InvalidModel if the model's parameters are malformed.
void validate_noise(const NoiseModel& model, const std::string& node);

double sample_noise(const NoiseModel& model, SampleStream& stream);

// ---------------------------------------------------------------------------
// Mechanisms — the structural function f of each non-treatment node.

// f = intercept + sum(coef * parent) + u. Coefficient keys must match the
// node's DAG parents exactly.
struct LinearMechanism {
    double intercept = 0.0;
    std::map<std::string, double> coefficients;
};

// How a table mechanism folds its noise value into the looked-up output.
// The bitwise operations treat both operands as integers, so they only make
// sense for integer-valued tables and noise (e.g. binary SCMs).
enum class NoiseCombine { Add, Xor, Or, And };

std::string_view to_string(NoiseCombine combine);
NoiseCombine noise_combine_from_string(std::string_view text);

// Finite lookup table over the parents' discrete values. Keys list parent
// values in DAG parent order; a miss at evaluation time is a DomainError.
struct TableMechanism {
    std::vector<std::pair<std::vector<double>, double>> rows;
    NoiseCombine combine = NoiseCombine::Add;
};

// Arbitrary deterministic function of (parent values in DAG parent order,
// noise). Not serializable; for in-process models and tests.
struct OpaqueMechanism {
    std::function<double(std::span<const double>, double)> fn;
};

using Mechanism = std::variant<LinearMechanism, TableMechanism, OpaqueMechanism>;

// ---------------------------------------------------------------------------
// The structural causal model: one mechanism + one noise model per
// non-treatment node. Treatment nodes are set-points and carry neither.

// Noise draw and full node assignment, both indexed by node index.
// Treatment slots of a NoiseVector are NaN — treatments have no noise, and
// NaN makes any accidental read unmissable downstream.
using NoiseVector = std::vector<double>;
using Valuation = std::vector<double>;

class Scm {
  public:
    Scm(CausalDag dag, std::map<std::string, Mechanism> mechanisms,
        std::map<std::string, NoiseModel> noise,
        std::map<std::string, double> treatment_defaults = {});

    const CausalDag& dag() const { return dag_; }
    const Mechanism& mechanism(int node) const;
    const NoiseModel& noise_model(int node) const;
    bool is_treatment(int node) const { return dag_.role(node) == NodeRole::Treatment; }

    // Default untreated value for a treatment node, when configured.
    std::optional<double> treatment_default(int node) const;

    bool all_linear() const;  // every mechanism LinearMechanism

  private:
    CausalDag dag_;
    std::vector<std::optional<Mechanism>> mechanisms_;  // by node index
    std::vector<std::optional<NoiseModel>> noise_;
    std::vector<std::optional<double>> treatment_defaults_;
};

// ---------------------------------------------------------------------------
// Evaluation.

// Walks one root seed through consecutive draw indices. Substreams stay
// keyed by (root, node, draw), so two SeedStreams with the same root always
// replay the same noise sequence.
struct SeedStream {
    std::uint64_t root_seed = 0;
    std::uint64_t next_draw = 0;
};

// Compiled index-based evaluation plan; the hot path shared by simulation,
// counterfactual passes and the discrete oracle. Immutable and thread-safe
// once built.
class Evaluator {
  public:
    explicit Evaluator(const Scm& scm);

    const Scm& scm() const { return *scm_; }

    // One noise draw for the given draw index; treatment slots NaN.
    void draw_noise(std::uint64_t root_seed, std::uint64_t draw_index, NoiseVector& out) const;

    // Computes every node value. Nodes with forced[i] != 0 take
    // forced_value[i] verbatim (do-semantics: mechanism and noise ignored);
    // treatments not forced fall back to their configured default or throw
    // MissingTreatmentValue. Both spans must be node_count long.
    void evaluate(std::span<const char> forced, std::span<const double> forced_value,
                  const NoiseVector& noise, Valuation& out) const;

  private:
    struct CompiledNode;
    const Scm* scm_;
    std::vector<CompiledNode> plan_;  // non-treatment nodes in topological order
    std::vector<std::uint64_t> name_hash_;
    std::vector<std::optional<double>> treatment_default_;
    std::size_t node_count_;

    struct CompiledNode {
        int node = -1;
        const Mechanism* mechanism = nullptr;
        const NoiseModel* noise = nullptr;
        std::vector<int> parents;
        // Linear fast path: coefficient per parent, aligned with `parents`.
        std::vector<double> linear_coefs;
        double intercept = 0.0;
        int kind = 0;  // 0 linear, 1 table, 2 opaque
    };
};

// Builds a node-indexed NoiseVector from named values. The keys must be
// exactly the non-treatment node names (InvalidModel otherwise).
NoiseVector noise_from_map(const CausalDag& dag, const std::map<std::string, double>& values);

std::map<std::string, double> valuation_to_map(const CausalDag& dag, const Valuation& values);

// One independent draw of every non-treatment node's noise; advances the
// stream by one draw index. Deterministic given the stream state.
NoiseVector draw_noise(const Scm& scm, SeedStream& stream);

// Recursive evaluation from exogenous noise. Intervened nodes (any role)
// take their forced value verbatim; every other non-treatment node is
// computed in topological order from its parents and noise. Pure function
// of (interventions, noise).
Valuation evaluate(const Scm& scm, const std::map<std::string, double>& interventions,
                   const NoiseVector& noise);

// n independent evaluations under fresh noise, reproducible given seed.
// treatment_values forces treatments (and may force other nodes).
std::vector<Valuation> simulate(const Scm& scm,
                                const std::map<std::string, double>& treatment_values,
                                std::uint64_t n, std::uint64_t seed);

}  // namespace causalmed

#endif  // CAUSALMED_SCM_HPP
