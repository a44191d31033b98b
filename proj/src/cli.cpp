#include "causalmed/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "causalmed/discrete_oracle.hpp"
#include "causalmed/fitting.hpp"
#include "causalmed/mediation.hpp"
#include "causalmed/model_io.hpp"
#include "causalmed/report.hpp"

namespace causalmed {

namespace {

std::string six_digits(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

// --treatment NAME=U:T (absolute untreated:treated) or NAME=*K (relative
// multiplier on the model's untreated source).
struct TreatmentFlag {
    std::string node;
    bool relative = false;
    double multiplier = 1.0;
    double untreated = 0.0;
    double treated = 0.0;
};

double parse_double(const std::string& text, const std::string& flag) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "treatment spec '" + flag + "': '" + text + "' is not a number");
    }
}

TreatmentFlag parse_treatment_flag(const std::string& text) {
    TreatmentFlag flag;
    std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::ParseError,
                    "treatment spec '" + text + "' must look like NAME=U:T or NAME=*K");
    }
    flag.node = text.substr(0, eq);
    std::string rhs = text.substr(eq + 1);
    if (!rhs.empty() && rhs.front() == '*') {
        flag.relative = true;
        flag.multiplier = parse_double(rhs.substr(1), text);
        return flag;
    }
    std::size_t colon = rhs.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::ParseError,
                    "treatment spec '" + text + "' must look like NAME=U:T or NAME=*K");
    }
    flag.untreated = parse_double(rhs.substr(0, colon), text);
    flag.treated = parse_double(rhs.substr(colon + 1), text);
    return flag;
}

// Final per-treatment specs: command-line flags first, then specs stored in
// the model file, and an error for any treatment left uncovered.
std::vector<TreatmentSpec> assemble_specs(const Scm& scm,
                                          const std::vector<TreatmentSpec>& stored,
                                          const std::vector<std::string>& flag_texts) {
    std::map<std::string, TreatmentSpec> chosen;
    for (const TreatmentSpec& spec : stored) chosen[spec.node] = spec;

    for (const std::string& text : flag_texts) {
        TreatmentFlag flag = parse_treatment_flag(text);
        int node = scm.dag().index_of(flag.node);  // UnknownNode for typos
        if (scm.dag().role(node) != NodeRole::Treatment) {
            throw Error(ErrorCode::InvalidRole, "'" + flag.node + "' is not a treatment node");
        }
        if (flag.relative) {
            auto it = chosen.find(flag.node);
            if (it == chosen.end()) {
                throw Error(ErrorCode::MissingObservation,
                            "relative treatment '" + text +
                                "' needs an untreated source in the model file");
            }
            it->second.treated = Multiplier{flag.multiplier};
        } else {
            chosen[flag.node] = TreatmentSpec{flag.node, flag.untreated, flag.treated};
        }
    }

    std::vector<TreatmentSpec> specs;
    for (int t : scm.dag().treatment_indices()) {
        auto it = chosen.find(scm.dag().name(t));
        if (it == chosen.end()) {
            throw Error(ErrorCode::MissingTreatmentValue,
                        "no treatment values for '" + scm.dag().name(t) +
                            "'; give --treatment or store them in the model file");
        }
        specs.push_back(it->second);
    }
    return specs;
}

const char* edge_category(const CausalDag& dag, int source, int target) {
    NodeRole s = dag.role(source);
    NodeRole t = dag.role(target);
    if (s == NodeRole::Covariate || t == NodeRole::Covariate) return "covariate_edge";
    if (s == NodeRole::Treatment && t == NodeRole::Mediator) return "root_to_mediator";
    if (s == NodeRole::Treatment && t == NodeRole::Outcome) return "root_to_outcome";
    if (s == NodeRole::Mediator && t == NodeRole::Mediator) return "mediator_to_mediator";
    return "mediator_to_outcome";
}

int cmd_validate(const std::string& graph_path, std::ostream& out) {
    auto [nodes, edges] = parse_graph_declarations(read_file(graph_path));
    // Surface every structural issue at once, machine-readably.
    auto issues = check_dag(nodes, edges);
    if (!issues.empty()) {
        for (const GraphIssue& issue : issues) {
            out << "error\t" << to_string(issue.code) << "\t" << issue.message << "\n";
        }
        return 1;
    }
    CausalDag dag(nodes, edges);
    out << "valid\n";
    for (const auto& [s, t] : dag.edge_indices()) {
        out << edge_category(dag, s, t) << "\t" << dag.name(s) << "->" << dag.name(t) << "\n";
    }
    return 0;
}

int cmd_count_dags(int treatments, int mediators, bool enumerate,
                   std::optional<std::uint64_t> limit, std::ostream& out) {
    out << count_dag_configurations(treatments, mediators).str() << "\n";
    if (!enumerate) return 0;
    DagEnumerator enumerator(treatments, mediators, limit);
    while (auto dag = enumerator.next()) {
        std::string line = "{";
        bool first = true;
        for (const auto& [source, target] : dag->edges()) {
            if (!first) line += ", ";
            line += source + "->" + target;
            first = false;
        }
        line += "}";
        out << line << "\n";
    }
    return 0;
}

int cmd_fit(const std::string& graph_path, const std::string& data_path,
            const std::string& out_path, const std::string& noise_mode, std::ostream& out,
            std::ostream& err) {
    CausalDag dag = load_graph_file(graph_path);
    Dataset data = load_table_file(data_path);
    for (const std::string& w : data.warnings) err << "warning: " << w << "\n";

    auto [scm, report] = fit_scm(dag, data, noise_mode_from_string(noise_mode));

    // Treatments keep their observed columns as resampling pools; the
    // multiplier is an identity placeholder for analyze to override.
    std::vector<TreatmentSpec> treatments;
    for (int t : dag.treatment_indices()) {
        const std::string& name = dag.name(t);
        EmpiricalDistribution baseline = observed_baseline(data, name);
        treatments.push_back(
            TreatmentSpec{name, ObservedSample{baseline.samples, name}, Multiplier{1.0}});
    }
    save_model_file({std::move(scm), std::move(treatments)}, out_path);

    out << "node\tterm\tvalue\n";
    for (const NodeFit& fit : report.nodes) {
        out << fit.node << "\tintercept\t" << six_digits(fit.intercept) << "\n";
        for (const auto& [parent, coef] : fit.coefficients) {
            out << fit.node << "\tcoef:" << parent << "\t" << six_digits(coef) << "\n";
        }
        out << fit.node << "\tresidual_stddev\t" << six_digits(fit.residual_stddev) << "\n";
        out << fit.node << "\tr_squared\t" << six_digits(fit.r_squared) << "\n";
    }
    out << "# rows_used\t" << report.rows_used << "\n";
    out << "# rows_dropped\t" << report.rows_dropped << "\n";
    out << "# model_written\t" << out_path << "\n";
    return 0;
}

int cmd_analyze(const std::string& model_path, const std::vector<std::string>& treatment_flags,
                std::uint64_t samples, std::uint64_t seed, unsigned workers,
                const std::string& format, std::ostream& out) {
    std::string text = read_file(model_path);
    ModelFile model = parse_model(text);
    auto specs = assemble_specs(model.scm, model.treatments, treatment_flags);

    McConfig cfg;
    cfg.n_draws = samples;
    cfg.seed = seed;
    cfg.parallel_workers = workers;

    AnalysisReport report;
    report.matrix = estimate_all_nies(model.scm, specs, cfg);
    for (const std::string& treatment : report.matrix.treatments) {
        report.total_effects.emplace_back(treatment,
                                          estimate_total_effect(model.scm, treatment, specs, cfg));
    }
    if (model.scm.dag().treatment_indices().size() == 1) {
        const std::string& treatment = report.matrix.treatments.front();
        report.direct_effect = {treatment, estimate_nde(model.scm, treatment, specs, cfg)};
    }
    report.seed = cfg.seed;
    report.n_draws = cfg.n_draws;
    report.model_hash = content_hash_hex(text);
    report.warnings = report.matrix.warnings;

    out << (format == "json" ? to_json_text(report) : to_tsv(report));
    return 0;
}

int cmd_oracle(const std::string& model_path, const std::vector<std::string>& treatment_flags,
               std::ostream& out) {
    ModelFile model = parse_model(read_file(model_path));
    auto specs = assemble_specs(model.scm, model.treatments, treatment_flags);
    const CausalDag& dag = model.scm.dag();
    out << "kind\ttreatment\tmediator\tvalue\n";
    char buf[48];
    for (int t : dag.treatment_indices()) {
        for (int m : dag.mediator_order()) {
            double value = exact_nie(model.scm, dag.name(t), dag.name(m), specs);
            std::snprintf(buf, sizeof(buf), "%.17g", value);
            out << "exact_nie\t" << dag.name(t) << "\t" << dag.name(m) << "\t" << buf << "\n";
        }
    }
    return 0;
}

std::optional<std::uint64_t> seed_from_environment() {
    const char* text = std::getenv("CAUSALMED_SEED");
    if (!text || !*text) return std::nullopt;
    char* end = nullptr;
    unsigned long long value = std::strtoull(text, &end, 10);
    if (!end || *end != '\0') {
        throw Error(ErrorCode::ParseError, "CAUSALMED_SEED is not an unsigned integer");
    }
    return value;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Structural-causal-model mediation engine"};
    app.require_subcommand(1);

    // validate ------------------------------------------------------------
    std::string graph_path;
    CLI::App* validate = app.add_subcommand("validate", "Check a graph file and print its edges");
    validate->add_option("graph", graph_path, "graph specification file")->required();

    // count-dags ----------------------------------------------------------
    int treatments = 1;
    int mediators = 0;
    bool enumerate = false;
    std::uint64_t limit = 0;
    CLI::App* count = app.add_subcommand("count-dags", "Count admissible DAG configurations");
    count->add_option("--treatments", treatments, "number of treatment nodes")->required();
    count->add_option("--mediators", mediators, "number of mediator nodes")->required();
    count->add_flag("--enumerate", enumerate, "list every edge set");
    CLI::Option* limit_opt =
        count->add_option("--limit", limit, "stop enumeration after this many graphs");

    // fit -----------------------------------------------------------------
    std::string fit_graph, fit_data, fit_out;
    std::string noise_mode = "empirical";
    CLI::App* fit = app.add_subcommand("fit", "Fit mechanisms to data for a given graph");
    fit->add_option("--graph", fit_graph, "graph specification file")->required();
    fit->add_option("--data", fit_data, "comma-separated data with a header row")->required();
    fit->add_option("--out", fit_out, "model file to write")->required();
    fit->add_option("--noise", noise_mode, "noise family: empirical|gaussian")
        ->check(CLI::IsMember({"empirical", "gaussian"}));

    // analyze ---------------------------------------------------------------
    std::string model_path;
    std::vector<std::string> treatment_flags;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string format = "tsv";
    CLI::App* analyze = app.add_subcommand("analyze", "Estimate all mediation effects");
    analyze->add_option("--model", model_path, "fully parameterized model file")->required();
    analyze->add_option("--treatment", treatment_flags,
                        "treatment values, NAME=U:T absolute or NAME=*K relative");
    analyze->add_option("--samples", samples, "Monte Carlo draws")->check(CLI::PositiveNumber);
    CLI::Option* seed_opt = analyze->add_option("--seed", seed, "root random seed");
    analyze->add_option("--workers", workers, "worker threads (never changes results)")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"tsv", "json"}));

    // oracle ----------------------------------------------------------------
    std::string oracle_model;
    std::vector<std::string> oracle_flags;
    CLI::App* oracle =
        app.add_subcommand("oracle", "Exact effects for finite-noise models (debugging aid)");
    oracle->add_option("--model", oracle_model, "fully parameterized model file")->required();
    oracle->add_option("--treatment", oracle_flags,
                       "treatment values, NAME=U:T absolute or NAME=*K relative");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (*validate) return cmd_validate(graph_path, out);
        if (*count) {
            std::optional<std::uint64_t> limit_value;
            if (limit_opt->count() > 0) limit_value = limit;
            return cmd_count_dags(treatments, mediators, enumerate, limit_value, out);
        }
        if (*fit) return cmd_fit(fit_graph, fit_data, fit_out, noise_mode, out, err);
        if (*analyze) {
            if (seed_opt->count() == 0) {
                if (auto env = seed_from_environment()) seed = *env;
            }
            return cmd_analyze(model_path, treatment_flags, samples, seed, workers, format, out);
        }
        if (*oracle) return cmd_oracle(oracle_model, oracle_flags, out);
        err << "no subcommand selected\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return e.code() == ErrorCode::ParseError ? 2 : 1;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }
}

}  // namespace causalmed
