// Python bindings for the mediation engine: graph construction and
// combinatorics, SCM evaluation/simulation, effect estimation, the exact
// discrete oracle, data fitting, and model file round trips. Opaque
// (function-valued) mechanisms stay C++-only.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "causalmed/discrete_oracle.hpp"
#include "causalmed/error.hpp"
#include "causalmed/fitting.hpp"
#include "causalmed/graph.hpp"
#include "causalmed/mediation.hpp"
#include "causalmed/model_io.hpp"
#include "causalmed/scm.hpp"

namespace py = pybind11;
using namespace causalmed;

namespace {

// Node declarations arrive as (name, role-string) pairs.
std::vector<NodeDecl> decode_nodes(const std::vector<std::pair<std::string, std::string>>& raw) {
    std::vector<NodeDecl> nodes;
    for (const auto& [name, role] : raw) nodes.push_back({name, role_from_string(role)});
    return nodes;
}

NoiseModel decode_noise(const py::dict& d) {
    std::string family = d["family"].cast<std::string>();
    if (family == "gaussian")
        return GaussianNoise{d.contains("mean") ? d["mean"].cast<double>() : 0.0,
                             d.contains("stddev") ? d["stddev"].cast<double>() : 1.0};
    if (family == "pmf")
        return PmfNoise{d["values"].cast<std::vector<double>>(),
                        d["probabilities"].cast<std::vector<double>>()};
    if (family == "empirical")
        return EmpiricalNoise{d["residuals"].cast<std::vector<double>>()};
    if (family == "degenerate")
        return DegenerateNoise{d.contains("value") ? d["value"].cast<double>() : 0.0};
    throw Error(ErrorCode::InvalidModel, "unknown noise family '" + family + "'");
}

Mechanism decode_mechanism(const py::dict& d) {
    std::string family = d["family"].cast<std::string>();
    if (family == "linear") {
        LinearMechanism lm;
        if (d.contains("intercept")) lm.intercept = d["intercept"].cast<double>();
        if (d.contains("coefficients"))
            lm.coefficients = d["coefficients"].cast<std::map<std::string, double>>();
        return lm;
    }
    if (family == "table") {
        TableMechanism tm;
        tm.combine = noise_combine_from_string(d["combine"].cast<std::string>());
        for (auto row : d["rows"].cast<py::list>()) {
            py::dict r = row.cast<py::dict>();
            tm.rows.push_back({r["key"].cast<std::vector<double>>(), r["value"].cast<double>()});
        }
        return tm;
    }
    throw Error(ErrorCode::InvalidModel, "unknown mechanism family '" + family + "'");
}

Scm make_scm(const CausalDag& dag, const py::dict& mechanisms, const py::dict& noise,
             const std::map<std::string, double>& treatment_defaults) {
    std::map<std::string, Mechanism> mech;
    for (auto item : mechanisms)
        mech[item.first.cast<std::string>()] = decode_mechanism(item.second.cast<py::dict>());
    std::map<std::string, NoiseModel> nm;
    for (auto item : noise)
        nm[item.first.cast<std::string>()] = decode_noise(item.second.cast<py::dict>());
    return Scm(dag, std::move(mech), std::move(nm), treatment_defaults);
}

TreatmentSpec decode_treatment(const py::dict& d) {
    TreatmentSpec spec;
    spec.node = d["node"].cast<std::string>();
    if (d.contains("baseline_samples")) {
        auto pool = std::make_shared<std::vector<double>>(
            d["baseline_samples"].cast<std::vector<double>>());
        std::string column =
            d.contains("baseline_column") ? d["baseline_column"].cast<std::string>() : spec.node;
        spec.untreated = ObservedSample{std::move(pool), column};
    } else {
        spec.untreated = d["untreated"].cast<double>();
    }
    if (d.contains("multiplier"))
        spec.treated = Multiplier{d["multiplier"].cast<double>()};
    else
        spec.treated = d["treated"].cast<double>();
    return spec;
}

std::vector<TreatmentSpec> decode_treatments(const py::list& raw) {
    std::vector<TreatmentSpec> specs;
    for (auto item : raw) specs.push_back(decode_treatment(item.cast<py::dict>()));
    return specs;
}

py::dict effect_to_dict(const EffectEstimate& e) {
    py::dict d;
    d["point"] = e.point;
    d["std_error"] = e.std_error;
    d["n_draws"] = e.n_draws;
    d["kind"] = std::string(to_string(e.kind));
    return d;
}

McConfig decode_config(std::uint64_t n_draws, std::uint64_t seed, unsigned workers) {
    McConfig cfg;
    cfg.n_draws = n_draws;
    cfg.seed = seed;
    cfg.parallel_workers = workers;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Structural-causal-model mediation engine";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<CausalDag>(m, "CausalDag")
        .def(py::init([](const std::vector<std::pair<std::string, std::string>>& nodes,
                         const std::vector<Edge>& edges) {
                 return build_dag(decode_nodes(nodes), edges);
             }),
             py::arg("nodes"), py::arg("edges"))
        .def_property_readonly("node_count", &CausalDag::node_count)
        .def("index_of", &CausalDag::index_of)
        .def("name", &CausalDag::name)
        .def("role",
             [](const CausalDag& dag, int node) { return std::string(to_string(dag.role(node))); })
        .def_property_readonly("nodes",
                               [](const CausalDag& dag) {
                                   std::vector<std::string> names;
                                   for (int i = 0; i < dag.node_count(); ++i)
                                       names.push_back(dag.name(i));
                                   return names;
                               })
        .def_property_readonly("edges", &CausalDag::edges)
        .def_property_readonly("treatments",
                               [](const CausalDag& dag) {
                                   std::vector<std::string> names;
                                   for (int i : dag.treatment_indices())
                                       names.push_back(dag.name(i));
                                   return names;
                               })
        .def_property_readonly("mediators",
                               [](const CausalDag& dag) {
                                   std::vector<std::string> names;
                                   for (int i : dag.mediator_order()) names.push_back(dag.name(i));
                                   return names;
                               })
        .def_property_readonly("outcome",
                               [](const CausalDag& dag) { return dag.name(dag.outcome_index()); })
        .def_property_readonly("topological_names", [](const CausalDag& dag) {
            std::vector<std::string> names;
            for (int i : dag.topological_indices()) names.push_back(dag.name(i));
            return names;
        });

    m.def("classify_edges", [](const CausalDag& dag) {
        EdgeCatalog catalog = classify_edges(dag);
        py::dict d;
        d["root_to_mediator"] = catalog.root_to_mediator;
        d["root_to_outcome"] = catalog.root_to_outcome;
        d["mediator_to_mediator"] = catalog.mediator_to_mediator;
        d["mediator_to_outcome"] = catalog.mediator_to_outcome;
        return d;
    });

    m.def(
        "count_dag_configurations",
        [](int treatments, int mediators) {
            // Exact big-integer count, handed to Python via its own bignum.
            return py::int_(py::str(count_dag_configurations(treatments, mediators).str()));
        },
        py::arg("treatments"), py::arg("mediators"));

    m.def(
        "enumerate_dag_configurations",
        [](int treatments, int mediators, std::optional<std::uint64_t> limit) {
            std::vector<std::vector<Edge>> all;
            DagEnumerator en(treatments, mediators, limit);
            while (auto dag = en.next()) all.push_back(dag->edges());
            return all;
        },
        py::arg("treatments"), py::arg("mediators"), py::arg("limit") = std::nullopt);

    m.def("mediation_relevant", &mediation_relevant, py::arg("dag"), py::arg("treatment"),
          py::arg("mediator"));

    py::class_<Scm>(m, "Scm")
        .def(py::init(&make_scm), py::arg("dag"), py::arg("mechanisms"), py::arg("noise"),
             py::arg("treatment_defaults") = std::map<std::string, double>{})
        .def_property_readonly("dag", &Scm::dag)
        .def_property_readonly("all_linear", &Scm::all_linear);

    m.def(
        "evaluate",
        [](const Scm& scm, const std::map<std::string, double>& interventions,
           const std::map<std::string, double>& noise) {
            return valuation_to_map(scm.dag(),
                                    evaluate(scm, interventions, noise_from_map(scm.dag(), noise)));
        },
        py::arg("scm"), py::arg("interventions"), py::arg("noise"));

    m.def(
        "simulate",
        [](const Scm& scm, const std::map<std::string, double>& treatment_values, std::uint64_t n,
           std::uint64_t seed) {
            std::vector<std::map<std::string, double>> rows;
            for (const Valuation& v : simulate(scm, treatment_values, n, seed))
                rows.push_back(valuation_to_map(scm.dag(), v));
            return rows;
        },
        py::arg("scm"), py::arg("treatment_values"), py::arg("n"), py::arg("seed") = 0);

    m.def(
        "estimate_nie",
        [](const Scm& scm, const std::string& treatment, const std::string& mediator,
           const py::list& specs, std::uint64_t n_draws, std::uint64_t seed, unsigned workers) {
            return effect_to_dict(estimate_nie(scm, treatment, mediator, decode_treatments(specs),
                                               decode_config(n_draws, seed, workers)));
        },
        py::arg("scm"), py::arg("treatment"), py::arg("mediator"), py::arg("treatments"),
        py::arg("n_draws") = 100000, py::arg("seed") = 0, py::arg("workers") = 1);

    m.def(
        "estimate_all_nies",
        [](const Scm& scm, const py::list& specs, std::uint64_t n_draws, std::uint64_t seed,
           unsigned workers) {
            NieMatrix grid = estimate_all_nies(scm, decode_treatments(specs),
                                               decode_config(n_draws, seed, workers));
            py::dict d;
            d["treatments"] = grid.treatments;
            d["mediators"] = grid.mediators;
            py::dict cells;
            for (size_t i = 0; i < grid.treatments.size(); ++i)
                for (size_t j = 0; j < grid.mediators.size(); ++j)
                    cells[py::make_tuple(grid.treatments[i], grid.mediators[j])] =
                        effect_to_dict(grid.at(i, j));
            d["cells"] = cells;
            d["warnings"] = grid.warnings;
            return d;
        },
        py::arg("scm"), py::arg("treatments"), py::arg("n_draws") = 100000, py::arg("seed") = 0,
        py::arg("workers") = 1);

    m.def(
        "estimate_total_effect",
        [](const Scm& scm, const std::string& treatment, const py::list& specs,
           std::uint64_t n_draws, std::uint64_t seed, unsigned workers) {
            return effect_to_dict(estimate_total_effect(scm, treatment, decode_treatments(specs),
                                                        decode_config(n_draws, seed, workers)));
        },
        py::arg("scm"), py::arg("treatment"), py::arg("treatments"), py::arg("n_draws") = 100000,
        py::arg("seed") = 0, py::arg("workers") = 1);

    m.def(
        "estimate_nde",
        [](const Scm& scm, const std::string& treatment, const py::list& specs,
           std::uint64_t n_draws, std::uint64_t seed, unsigned workers) {
            return effect_to_dict(estimate_nde(scm, treatment, decode_treatments(specs),
                                               decode_config(n_draws, seed, workers)));
        },
        py::arg("scm"), py::arg("treatment"), py::arg("treatments"), py::arg("n_draws") = 100000,
        py::arg("seed") = 0, py::arg("workers") = 1);

    m.def("closed_form_linear_nie", &closed_form_linear_nie, py::arg("scm"), py::arg("treatment"),
          py::arg("mediator"), py::arg("delta") = 1.0);
    m.def("closed_form_linear_total_effect", &closed_form_linear_total_effect, py::arg("scm"),
          py::arg("treatment"), py::arg("delta") = 1.0);
    m.def("closed_form_linear_nde", &closed_form_linear_nde, py::arg("scm"), py::arg("treatment"),
          py::arg("delta") = 1.0);

    m.def(
        "exact_nie",
        [](const Scm& scm, const std::string& treatment, const std::string& mediator,
           const py::list& specs) {
            return exact_nie(scm, treatment, mediator, decode_treatments(specs));
        },
        py::arg("scm"), py::arg("treatment"), py::arg("mediator"), py::arg("treatments"));
    m.def("exact_expected_outcome", &exact_expected_outcome, py::arg("scm"),
          py::arg("interventions"));
    m.def("finite_noise_support", &finite_noise_support, py::arg("scm"));

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("columns", [](const Dataset& d) { return d.columns; })
        .def_property_readonly("n_rows", &Dataset::n_rows)
        .def_property_readonly("dropped_rows", [](const Dataset& d) { return d.dropped_rows; })
        .def_property_readonly("warnings", [](const Dataset& d) { return d.warnings; })
        .def("column", &Dataset::column);

    m.def("load_table", [](const std::string& text) {
        std::istringstream in(text);
        return load_table(in);
    });
    m.def("load_table_file", &load_table_file);

    m.def(
        "fit_scm",
        [](const CausalDag& dag, const Dataset& data, const std::string& noise_mode) {
            auto [scm, report] = fit_scm(dag, data, noise_mode_from_string(noise_mode));
            py::dict rep;
            rep["rows_used"] = report.rows_used;
            rep["rows_dropped"] = report.rows_dropped;
            py::dict nodes;
            for (const NodeFit& nf : report.nodes) {
                py::dict entry;
                entry["intercept"] = nf.intercept;
                py::dict coefs;
                for (const auto& [parent, value] : nf.coefficients)
                    coefs[py::str(parent)] = value;
                entry["coefficients"] = coefs;
                entry["residual_stddev"] = nf.residual_stddev;
                entry["r_squared"] = nf.r_squared;
                nodes[py::str(nf.node)] = entry;
            }
            rep["nodes"] = nodes;
            return py::make_tuple(scm, rep);
        },
        py::arg("dag"), py::arg("data"), py::arg("noise_mode") = "empirical");

    m.def("parse_graph", &parse_graph, py::arg("text"));
    m.def("load_graph", &load_graph_file, py::arg("path"));

    m.def(
        "load_model",
        [](const std::string& path) {
            ModelFile model = load_model_file(path);
            py::list specs;
            for (const TreatmentSpec& spec : model.treatments) {
                py::dict d;
                d["node"] = spec.node;
                if (const auto* obs = std::get_if<ObservedSample>(&spec.untreated)) {
                    d["baseline_samples"] = *obs->pool;
                    d["baseline_column"] = obs->column;
                } else {
                    d["untreated"] = std::get<double>(spec.untreated);
                }
                if (const auto* mult = std::get_if<Multiplier>(&spec.treated))
                    d["multiplier"] = mult->factor;
                else
                    d["treated"] = std::get<double>(spec.treated);
                specs.append(d);
            }
            return py::make_tuple(model.scm, specs);
        },
        py::arg("path"));

    m.def(
        "save_model",
        [](const Scm& scm, const py::list& specs, const std::string& path) {
            save_model_file(ModelFile{scm, decode_treatments(specs)}, path);
        },
        py::arg("scm"), py::arg("treatments"), py::arg("path"));
}
