#ifndef CAUSALMED_TESTS_TEST_SUPPORT_HPP
#define CAUSALMED_TESTS_TEST_SUPPORT_HPP

// Shared fixtures and generators for the test suites: hand-sized linear
// SCMs, randomized chain / parallel / binary-table models, and tolerance
// helpers for Monte Carlo comparisons.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "causalmed/error.hpp"
#include "causalmed/graph.hpp"
#include "causalmed/scm.hpp"

namespace causalmed::testsupport {

inline ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    throw std::logic_error("expected an Error to be thrown");
}

// |a - b| <= k*se plus a tiny absolute allowance: paired draws make the
// Monte Carlo standard error collapse toward zero for deterministic-diff
// models, where only floating-point rounding (~1e-15) separates two ways
// of computing the same quantity.
inline bool close_within_se(double a, double b, double se, double k = 3.0) {
    return std::abs(a - b) <= k * se + 1e-9;
}

// T -> M -> O with M = 2T + u_M, O = 3M + T + u_O.
inline Scm pearl_three_node(double noise_sd = 1.0) {
    CausalDag dag = build_dag(
        {{"T", NodeRole::Treatment}, {"M", NodeRole::Mediator}, {"O", NodeRole::Outcome}},
        {{"T", "M"}, {"M", "O"}, {"T", "O"}});
    std::map<std::string, Mechanism> mech;
    mech["M"] = LinearMechanism{0.0, {{"T", 2.0}}};
    mech["O"] = LinearMechanism{0.0, {{"T", 1.0}, {"M", 3.0}}};
    std::map<std::string, NoiseModel> noise;
    noise["M"] = GaussianNoise{0.0, noise_sd};
    noise["O"] = GaussianNoise{0.0, noise_sd};
    return Scm(dag, std::move(mech), std::move(noise));
}

// Chain T -> M1 -> ... -> Mn -> O. Each link mixes linear and strictly
// monotone nonlinear mechanisms chosen by `rng`; `direct_edge` optionally
// adds T -> O.
inline Scm random_chain(std::mt19937& rng, int n_mediators, bool direct_edge) {
    std::vector<NodeDecl> nodes{{"T", NodeRole::Treatment}};
    std::vector<Edge> edges;
    std::string prev = "T";
    for (int j = 1; j <= n_mediators; ++j) {
        std::string name = "M" + std::to_string(j);
        nodes.push_back({name, NodeRole::Mediator});
        edges.push_back({prev, name});
        prev = name;
    }
    nodes.push_back({"O", NodeRole::Outcome});
    edges.push_back({prev, "O"});
    if (direct_edge) edges.push_back({"T", "O"});
    CausalDag dag = build_dag(nodes, edges);

    std::uniform_real_distribution<double> coef(0.5, 2.0);
    std::uniform_real_distribution<double> icpt(-1.0, 1.0);
    std::bernoulli_distribution pick_linear(0.5);
    std::map<std::string, Mechanism> mech;
    std::map<std::string, NoiseModel> noise;
    for (int i = 0; i < dag.node_count(); ++i) {
        if (dag.role(i) == NodeRole::Treatment) continue;
        const std::string& name = dag.name(i);
        std::vector<std::string> parents;
        for (int p : dag.parents(i)) parents.push_back(dag.name(p));
        if (pick_linear(rng)) {
            LinearMechanism lm{icpt(rng), {}};
            for (const auto& p : parents) lm.coefficients[p] = coef(rng);
            mech[name] = lm;
        } else {
            // Strictly increasing in every parent: a + sum_p (b_p*x_p +
            // c_p*tanh(x_p)) + u with b_p, c_p > 0.
            double a = icpt(rng);
            std::vector<double> b, c;
            for (size_t p = 0; p < parents.size(); ++p) {
                b.push_back(coef(rng));
                c.push_back(coef(rng));
            }
            mech[name] = OpaqueMechanism{[a, b, c](std::span<const double> x, double u) {
                double out = a + u;
                for (size_t p = 0; p < x.size(); ++p)
                    out += b[p] * x[p] + c[p] * std::tanh(x[p]);
                return out;
            }};
        }
        noise[name] = GaussianNoise{0.0, 1.0};
    }
    return Scm(dag, std::move(mech), std::move(noise));
}

// Parallel fan T -> M_j -> O for j = 1..n_mediators, no direct T -> O edge,
// random linear coefficients (sign-mixed) and unit Gaussian noise.
inline Scm random_parallel_linear(std::mt19937& rng, int n_mediators) {
    std::vector<NodeDecl> nodes{{"T", NodeRole::Treatment}};
    std::vector<Edge> edges;
    for (int j = 1; j <= n_mediators; ++j) {
        std::string name = "M" + std::to_string(j);
        nodes.push_back({name, NodeRole::Mediator});
        edges.push_back({"T", name});
        edges.push_back({name, "O"});
    }
    nodes.push_back({"O", NodeRole::Outcome});
    CausalDag dag = build_dag(nodes, edges);

    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> icpt(-1.0, 1.0);
    std::map<std::string, Mechanism> mech;
    std::map<std::string, NoiseModel> noise;
    for (int i = 0; i < dag.node_count(); ++i) {
        if (dag.role(i) == NodeRole::Treatment) continue;
        LinearMechanism lm{icpt(rng), {}};
        for (int p : dag.parents(i)) lm.coefficients[dag.name(p)] = coef(rng);
        mech[dag.name(i)] = lm;
        noise[dag.name(i)] = GaussianNoise{0.0, 1.0};
    }
    return Scm(dag, std::move(mech), std::move(noise));
}

// Builds a fully parameterized linear SCM over an arbitrary permitted DAG:
// every edge gets a random coefficient, every non-treatment node unit
// Gaussian noise.
inline Scm random_linear_scm(std::mt19937& rng, const CausalDag& dag) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> icpt(-1.0, 1.0);
    std::map<std::string, Mechanism> mech;
    std::map<std::string, NoiseModel> noise;
    for (int i = 0; i < dag.node_count(); ++i) {
        if (dag.role(i) == NodeRole::Treatment) continue;
        LinearMechanism lm{icpt(rng), {}};
        for (int p : dag.parents(i)) lm.coefficients[dag.name(p)] = coef(rng);
        mech[dag.name(i)] = lm;
        noise[dag.name(i)] = GaussianNoise{0.0, 1.0};
    }
    return Scm(dag, std::move(mech), std::move(noise));
}

// Random binary SCM: one treatment, one outcome, `n_mediators` mediators
// (total nodes <= 6), random subset of the permitted edge universe, random
// truth tables over {0,1} parents, random XOR/OR/AND noise combination,
// Bernoulli noise. All node values stay in {0,1}, so the exact oracle's
// joint support is at most 2^5 configurations.
inline Scm random_binary_scm(std::mt19937& rng, int n_mediators) {
    std::vector<NodeDecl> nodes{{"T", NodeRole::Treatment}};
    for (int j = 1; j <= n_mediators; ++j)
        nodes.push_back({"M" + std::to_string(j), NodeRole::Mediator});
    nodes.push_back({"O", NodeRole::Outcome});

    std::bernoulli_distribution keep(0.6);
    std::vector<Edge> edges;
    for (int j = 1; j <= n_mediators; ++j) {
        if (keep(rng)) edges.push_back({"T", "M" + std::to_string(j)});
        for (int k = j + 1; k <= n_mediators; ++k)
            if (keep(rng)) edges.push_back({"M" + std::to_string(j), "M" + std::to_string(k)});
        if (keep(rng)) edges.push_back({"M" + std::to_string(j), "O"});
    }
    if (keep(rng)) edges.push_back({"T", "O"});
    CausalDag dag = build_dag(nodes, edges);

    std::bernoulli_distribution bit(0.5);
    std::uniform_real_distribution<double> prob(0.1, 0.9);
    std::uniform_int_distribution<int> combine_pick(0, 2);
    std::map<std::string, Mechanism> mech;
    std::map<std::string, NoiseModel> noise;
    for (int i = 0; i < dag.node_count(); ++i) {
        if (dag.role(i) == NodeRole::Treatment) continue;
        const auto& parents = dag.parents(i);
        TableMechanism tm;
        switch (combine_pick(rng)) {
            case 0: tm.combine = NoiseCombine::Xor; break;
            case 1: tm.combine = NoiseCombine::Or; break;
            default: tm.combine = NoiseCombine::And; break;
        }
        size_t n_rows = size_t{1} << parents.size();
        for (size_t r = 0; r < n_rows; ++r) {
            std::vector<double> key(parents.size());
            for (size_t p = 0; p < parents.size(); ++p) key[p] = double((r >> p) & 1u);
            tm.rows.push_back({std::move(key), double(bit(rng))});
        }
        mech[dag.name(i)] = std::move(tm);
        double p1 = prob(rng);
        noise[dag.name(i)] = PmfNoise{{0.0, 1.0}, {1.0 - p1, p1}};
    }
    return Scm(dag, std::move(mech), std::move(noise));
}

}  // namespace causalmed::testsupport

#endif  // CAUSALMED_TESTS_TEST_SUPPORT_HPP
