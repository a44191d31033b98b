#include "causalmed/mediation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "causalmed/summation.hpp"

namespace causalmed {

std::string_view to_string(EffectKind kind) {
    switch (kind) {
        case EffectKind::Nie: return "NIE";
        case EffectKind::Nde: return "NDE";
        case EffectKind::Te: return "TE";
    }
    return "unknown";
}

namespace {

void check_config(const McConfig& cfg) {
    if (cfg.n_draws < 1) {
        throw Error(ErrorCode::InvalidCount, "n_draws must be at least 1");
    }
    if (cfg.parallel_workers < 1) {
        throw Error(ErrorCode::InvalidCount, "parallel_workers must be at least 1");
    }
}

int require_treatment(const Scm& scm, const std::string& name) {
    int node = scm.dag().index_of(name);
    if (scm.dag().role(node) != NodeRole::Treatment) {
        throw Error(ErrorCode::InvalidRole, "'" + name + "' is not a treatment node");
    }
    return node;
}

void require_spec_for(const std::vector<TreatmentSpec>& specs, const std::string& treatment) {
    for (const TreatmentSpec& s : specs) {
        if (s.node == treatment) return;
    }
    throw Error(ErrorCode::MissingTreatmentValue,
                "no treatment spec given for '" + treatment + "'");
}

// Fills diffs[k] for k in [0, n) with per_draw(engine, resolved_k, noise_k).
// Draw k's noise and treatment resolution depend only on (seed, node, k),
// so any split of the index range across workers produces the same array —
// the reduction below is then bit-identical for every worker count.
template <typename PerDraw>
void run_paired_draws(const Scm& scm, const std::vector<TreatmentSpec>& specs,
                      const McConfig& cfg, std::vector<double>& diffs, PerDraw per_draw) {
    const std::uint64_t n = cfg.n_draws;
    diffs.resize(n);

    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        CounterfactualEngine engine(scm);
        NoiseVector noise;
        for (std::uint64_t k = begin; k < end; ++k) {
            engine.draw_noise(cfg.seed, k, noise);
            auto resolved = resolve_all_treatments(scm, specs, cfg.seed, k);
            diffs[k] = per_draw(engine, resolved, noise);
        }
    };

    const unsigned workers = std::min<std::uint64_t>(cfg.parallel_workers, n);
    if (workers <= 1) {
        worker(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::uint64_t begin = n * w / workers;
        std::uint64_t end = n * (w + 1) / workers;
        pool.emplace_back(worker, begin, end);
    }
    for (std::thread& t : pool) t.join();
}

EffectEstimate reduce(const std::vector<double>& diffs, EffectKind kind) {
    const auto n = static_cast<std::uint64_t>(diffs.size());
    NeumaierSum sum;
    for (double d : diffs) sum.add(d);
    const double mean = sum.value() / static_cast<double>(n);

    double se = 0.0;
    if (n > 1) {
        NeumaierSum sq;
        for (double d : diffs) {
            double c = d - mean;
            sq.add(c * c);
        }
        double variance = sq.value() / static_cast<double>(n - 1);
        if (variance < 0.0) variance = 0.0;  // compensation can land a hair below zero
        se = std::sqrt(variance / static_cast<double>(n));
    }
    return {mean, se, n, kind};
}

}  // namespace

EffectEstimate estimate_nie(const Scm& scm, const std::string& treatment,
                            const std::string& mediator, const std::vector<TreatmentSpec>& specs,
                            const McConfig& cfg, std::vector<std::string>* warnings) {
    check_config(cfg);
    int t = require_treatment(scm, treatment);
    int m = scm.dag().index_of(mediator);
    if (scm.dag().role(m) != NodeRole::Mediator) {
        throw Error(ErrorCode::InvalidRole, "'" + mediator + "' is not a mediator node");
    }
    require_spec_for(specs, treatment);

    if (!mediation_relevant(scm.dag(), treatment, mediator)) {
        // No route treatment→mediator→outcome: the nested counterfactual
        // equals the baseline draw for draw, so the effect is identically 0.
        if (warnings) {
            warnings->push_back("pair (" + treatment + ", " + mediator +
                                ") has no treatment->mediator->outcome route; NIE is exactly 0");
        }
        return {0.0, 0.0, cfg.n_draws, EffectKind::Nie};
    }

    std::vector<double> diffs;
    run_paired_draws(scm, specs, cfg, diffs,
                     [t, m](CounterfactualEngine& engine,
                            const std::vector<ResolvedTreatment>& resolved,
                            const NoiseVector& noise) {
                         double aleph = engine.aleph(t, m, resolved, noise);
                         double base = engine.baseline(resolved, noise);
                         return aleph - base;
                     });
    return reduce(diffs, EffectKind::Nie);
}

NieMatrix estimate_all_nies(const Scm& scm, const std::vector<TreatmentSpec>& specs,
                            const McConfig& cfg) {
    check_config(cfg);
    NieMatrix matrix;
    for (int t : scm.dag().treatment_indices()) matrix.treatments.push_back(scm.dag().name(t));
    for (int m : scm.dag().mediator_order()) matrix.mediators.push_back(scm.dag().name(m));
    matrix.cells.reserve(matrix.treatments.size() * matrix.mediators.size());
    for (const std::string& t : matrix.treatments) {
        for (const std::string& m : matrix.mediators) {
            matrix.cells.push_back(estimate_nie(scm, t, m, specs, cfg, &matrix.warnings));
        }
    }
    return matrix;
}

EffectEstimate estimate_total_effect(const Scm& scm, const std::string& treatment,
                                     const std::vector<TreatmentSpec>& specs,
                                     const McConfig& cfg) {
    check_config(cfg);
    int t = require_treatment(scm, treatment);
    require_spec_for(specs, treatment);

    std::vector<double> diffs;
    run_paired_draws(scm, specs, cfg, diffs,
                     [t](CounterfactualEngine& engine,
                         const std::vector<ResolvedTreatment>& resolved,
                         const NoiseVector& noise) {
                         double treated = engine.treated_outcome(t, resolved, noise);
                         double base = engine.baseline(resolved, noise);
                         return treated - base;
                     });
    return reduce(diffs, EffectKind::Te);
}

EffectEstimate estimate_nde(const Scm& scm, const std::string& treatment,
                            const std::vector<TreatmentSpec>& specs, const McConfig& cfg) {
    check_config(cfg);
    if (scm.dag().treatment_indices().size() != 1) {
        throw Error(ErrorCode::MultiTreatmentNdeUnsupported,
                    "the natural direct effect is defined for single-treatment graphs only");
    }
    int t = require_treatment(scm, treatment);
    require_spec_for(specs, treatment);

    std::vector<double> diffs;
    run_paired_draws(scm, specs, cfg, diffs,
                     [t](CounterfactualEngine& engine,
                         const std::vector<ResolvedTreatment>& resolved,
                         const NoiseVector& noise) {
                         thread_local std::vector<double> mediators;
                         double base =
                             engine.baseline_recording_mediators(resolved, noise, mediators);
                         double direct = engine.direct_outcome(t, resolved, mediators, noise);
                         return direct - base;
                     });
    return reduce(diffs, EffectKind::Nde);
}

// ---------------------------------------------------------------------------
// Closed-form oracles for all-linear models: path-coefficient algebra via
// one dynamic-programming sweep per source node.

namespace {

// d(value of v)/d(value of source), holding treatments other than `source`
// fixed — i.e. the summed coefficient product over all directed paths.
// When `block_mediators` is set, paths through any mediator are cut.
std::vector<double> path_effects_from(const Scm& scm, int source, bool block_mediators) {
    const CausalDag& dag = scm.dag();
    std::vector<double> dp(dag.node_count(), 0.0);
    dp[static_cast<std::size_t>(source)] = 1.0;
    for (int v : dag.topological_indices()) {
        if (v == source || scm.is_treatment(v)) continue;
        const auto& lin = std::get<LinearMechanism>(scm.mechanism(v));
        double acc = 0.0;
        for (int p : dag.parents(v)) {
            acc += lin.coefficients.at(dag.name(p)) * dp[static_cast<std::size_t>(p)];
        }
        dp[static_cast<std::size_t>(v)] = acc;
        if (block_mediators && dag.role(v) == NodeRole::Mediator) {
            dp[static_cast<std::size_t>(v)] = 0.0;
        }
    }
    return dp;
}

void require_linear(const Scm& scm) {
    if (!scm.all_linear()) {
        throw Error(ErrorCode::NotLinear,
                    "closed-form effects need every mechanism to be linear");
    }
}

}  // namespace

double closed_form_linear_nie(const Scm& scm, const std::string& treatment,
                              const std::string& mediator, double delta) {
    require_linear(scm);
    int t = require_treatment(scm, treatment);
    int m = scm.dag().index_of(mediator);
    if (scm.dag().role(m) != NodeRole::Mediator) {
        throw Error(ErrorCode::InvalidRole, "'" + mediator + "' is not a mediator node");
    }
    int outcome = scm.dag().outcome_index();
    // Effect of the treatment on the mediator, times the effect of pinning
    // the mediator on the outcome. Pinning severs the mediator's parents,
    // which is exactly what a source-rooted sweep computes.
    double onto_mediator = path_effects_from(scm, t, false)[static_cast<std::size_t>(m)];
    double onto_outcome = path_effects_from(scm, m, false)[static_cast<std::size_t>(outcome)];
    return onto_mediator * onto_outcome * delta;
}

double closed_form_linear_total_effect(const Scm& scm, const std::string& treatment,
                                       double delta) {
    require_linear(scm);
    int t = require_treatment(scm, treatment);
    int outcome = scm.dag().outcome_index();
    return path_effects_from(scm, t, false)[static_cast<std::size_t>(outcome)] * delta;
}

double closed_form_linear_nde(const Scm& scm, const std::string& treatment, double delta) {
    require_linear(scm);
    if (scm.dag().treatment_indices().size() != 1) {
        throw Error(ErrorCode::MultiTreatmentNdeUnsupported,
                    "the natural direct effect is defined for single-treatment graphs only");
    }
    int t = require_treatment(scm, treatment);
    int outcome = scm.dag().outcome_index();
    return path_effects_from(scm, t, true)[static_cast<std::size_t>(outcome)] * delta;
}

}  // namespace causalmed
