#include "causalmed/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace causalmed {

namespace {

using nlohmann::json;

// nlohmann reports parse failures by byte offset; humans want lines.
std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

double require_number(const json& j, const std::string& context) {
    if (!j.is_number()) {
        throw Error(ErrorCode::ParseError, context + " must be a number");
    }
    return j.get<double>();
}

std::vector<double> number_array(const json& j, const std::string& context) {
    if (!j.is_array()) {
        throw Error(ErrorCode::ParseError, context + " must be an array of numbers");
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const json& v : j) out.push_back(require_number(v, context));
    return out;
}

std::pair<std::vector<NodeDecl>, std::vector<Edge>> parse_graph_parts(const json& doc) {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
        throw Error(ErrorCode::ParseError, "document needs top-level 'nodes' and 'edges'");
    }
    std::vector<NodeDecl> nodes;
    for (const json& n : doc.at("nodes")) {
        if (!n.is_object() || !n.contains("name") || !n.contains("role")) {
            throw Error(ErrorCode::ParseError, "each node needs 'name' and 'role'");
        }
        nodes.push_back({n.at("name").get<std::string>(),
                         role_from_string(n.at("role").get<std::string>())});
    }
    std::vector<Edge> edges;
    for (const json& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw Error(ErrorCode::ParseError, "each edge must be a [source, target] pair");
        }
        edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
    return {std::move(nodes), std::move(edges)};
}

Mechanism parse_mechanism(const json& j, const std::string& node) {
    const std::string family = j.value("family", "");
    if (family == "linear") {
        LinearMechanism mech;
        mech.intercept = require_number(j.value("intercept", json(0.0)),
                                        "intercept of '" + node + "'");
        if (j.contains("coefficients")) {
            for (const auto& [parent, coef] : j.at("coefficients").items()) {
                mech.coefficients[parent] =
                    require_number(coef, "coefficient '" + parent + "' of '" + node + "'");
            }
        }
        return mech;
    }
    if (family == "table") {
        TableMechanism mech;
        if (j.contains("combine")) {
            mech.combine = noise_combine_from_string(j.at("combine").get<std::string>());
        }
        if (!j.contains("rows") || !j.at("rows").is_array()) {
            throw Error(ErrorCode::ParseError, "table mechanism of '" + node + "' needs 'rows'");
        }
        for (const json& row : j.at("rows")) {
            if (!row.is_object() || !row.contains("key") || !row.contains("value")) {
                throw Error(ErrorCode::ParseError,
                            "each table row of '" + node + "' needs 'key' and 'value'");
            }
            mech.rows.emplace_back(number_array(row.at("key"), "row key of '" + node + "'"),
                                   require_number(row.at("value"), "row value of '" + node + "'"));
        }
        return mech;
    }
    throw Error(ErrorCode::ParseError,
                "unknown mechanism family '" + family + "' for node '" + node + "'");
}

NoiseModel parse_noise(const json& j, const std::string& node) {
    const std::string family = j.value("family", "");
    if (family == "gaussian") {
        return GaussianNoise{require_number(j.value("mean", json(0.0)), "mean of '" + node + "'"),
                             require_number(j.value("stddev", json(1.0)),
                                            "stddev of '" + node + "'")};
    }
    if (family == "pmf") {
        return PmfNoise{number_array(j.value("values", json::array()), "values of '" + node + "'"),
                        number_array(j.value("probabilities", json::array()),
                                     "probabilities of '" + node + "'")};
    }
    if (family == "empirical") {
        return EmpiricalNoise{
            number_array(j.value("residuals", json::array()), "residuals of '" + node + "'")};
    }
    if (family == "degenerate") {
        return DegenerateNoise{
            require_number(j.value("value", json(0.0)), "value of '" + node + "'")};
    }
    throw Error(ErrorCode::ParseError,
                "unknown noise family '" + family + "' for node '" + node + "'");
}

TreatmentSpec parse_treatment(const json& j, const std::string& node) {
    TreatmentSpec spec;
    spec.node = node;
    const bool has_value = j.contains("untreated");
    const bool has_samples = j.contains("baseline_samples");
    if (has_value == has_samples) {
        throw Error(ErrorCode::ParseError,
                    "treatment '" + node +
                        "' needs exactly one of 'untreated' or 'baseline_samples'");
    }
    if (has_value) {
        spec.untreated = require_number(j.at("untreated"), "untreated value of '" + node + "'");
    } else {
        auto pool = std::make_shared<std::vector<double>>(
            number_array(j.at("baseline_samples"), "baseline samples of '" + node + "'"));
        if (pool->empty()) {
            throw Error(ErrorCode::ParseError,
                        "treatment '" + node + "' has an empty baseline sample pool");
        }
        spec.untreated = ObservedSample{std::move(pool), j.value("baseline_column", node)};
    }
    const bool has_treated = j.contains("treated");
    const bool has_multiplier = j.contains("multiplier");
    if (has_treated == has_multiplier) {
        throw Error(ErrorCode::ParseError,
                    "treatment '" + node + "' needs exactly one of 'treated' or 'multiplier'");
    }
    if (has_treated) {
        spec.treated = require_number(j.at("treated"), "treated value of '" + node + "'");
    } else {
        spec.treated =
            Multiplier{require_number(j.at("multiplier"), "multiplier of '" + node + "'")};
    }
    return spec;
}

}  // namespace

CausalDag parse_graph(const std::string& text) {
    auto [nodes, edges] = parse_graph_parts(parse_json(text));
    return build_dag(nodes, edges);
}

std::pair<std::vector<NodeDecl>, std::vector<Edge>> parse_graph_declarations(
    const std::string& text) {
    return parse_graph_parts(parse_json(text));
}

CausalDag load_graph_file(const std::string& path) { return parse_graph(read_file(path)); }

ModelFile parse_model(const std::string& text) {
    json doc = parse_json(text);
    auto [nodes, edges] = parse_graph_parts(doc);
    CausalDag dag = build_dag(nodes, edges);

    std::map<std::string, Mechanism> mechanisms;
    if (doc.contains("mechanisms")) {
        for (const auto& [node, j] : doc.at("mechanisms").items()) {
            mechanisms.emplace(node, parse_mechanism(j, node));
        }
    }
    std::map<std::string, NoiseModel> noise;
    if (doc.contains("noise")) {
        for (const auto& [node, j] : doc.at("noise").items()) {
            noise.emplace(node, parse_noise(j, node));
        }
    }

    std::vector<TreatmentSpec> treatments;
    if (doc.contains("treatments")) {
        for (const auto& [node, j] : doc.at("treatments").items()) {
            treatments.push_back(parse_treatment(j, node));
        }
    }

    return {Scm(std::move(dag), std::move(mechanisms), std::move(noise)), std::move(treatments)};
}

ModelFile load_model_file(const std::string& path) { return parse_model(read_file(path)); }

std::string model_to_text(const ModelFile& model) {
    const Scm& scm = model.scm;
    const CausalDag& dag = scm.dag();
    json doc;

    doc["nodes"] = json::array();
    for (const NodeDecl& n : dag.nodes()) {
        doc["nodes"].push_back({{"name", n.name}, {"role", std::string(to_string(n.role))}});
    }
    doc["edges"] = json::array();
    for (const auto& [source, target] : dag.edges()) {
        doc["edges"].push_back(json::array({source, target}));
    }

    json mechanisms = json::object();
    json noise = json::object();
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const int node = static_cast<int>(i);
        if (scm.is_treatment(node)) continue;
        const std::string& name = dag.name(node);

        const Mechanism& mech = scm.mechanism(node);
        if (const auto* lin = std::get_if<LinearMechanism>(&mech)) {
            json coefs = json::object();
            for (const auto& [parent, coef] : lin->coefficients) coefs[parent] = coef;
            mechanisms[name] = {{"family", "linear"},
                                {"intercept", lin->intercept},
                                {"coefficients", std::move(coefs)}};
        } else if (const auto* tab = std::get_if<TableMechanism>(&mech)) {
            json rows = json::array();
            for (const auto& [key, value] : tab->rows) {
                rows.push_back({{"key", key}, {"value", value}});
            }
            mechanisms[name] = {{"family", "table"},
                                {"combine", std::string(to_string(tab->combine))},
                                {"rows", std::move(rows)}};
        } else {
            throw Error(ErrorCode::InvalidModel,
                        "opaque mechanism of '" + name + "' cannot be serialized");
        }

        const NoiseModel& model_ = scm.noise_model(node);
        if (const auto* g = std::get_if<GaussianNoise>(&model_)) {
            noise[name] = {{"family", "gaussian"}, {"mean", g->mean}, {"stddev", g->stddev}};
        } else if (const auto* p = std::get_if<PmfNoise>(&model_)) {
            noise[name] = {{"family", "pmf"},
                           {"values", p->values},
                           {"probabilities", p->probabilities}};
        } else if (const auto* e = std::get_if<EmpiricalNoise>(&model_)) {
            noise[name] = {{"family", "empirical"}, {"residuals", e->residuals}};
        } else {
            noise[name] = {{"family", "degenerate"},
                           {"value", std::get<DegenerateNoise>(model_).value}};
        }
    }
    doc["mechanisms"] = std::move(mechanisms);
    doc["noise"] = std::move(noise);

    if (!model.treatments.empty()) {
        json treatments = json::object();
        for (const TreatmentSpec& spec : model.treatments) {
            json t = json::object();
            if (const double* value = std::get_if<double>(&spec.untreated)) {
                t["untreated"] = *value;
            } else {
                const auto& sample = std::get<ObservedSample>(spec.untreated);
                t["baseline_samples"] = *sample.pool;
                t["baseline_column"] = sample.column;
            }
            if (const double* value = std::get_if<double>(&spec.treated)) {
                t["treated"] = *value;
            } else {
                t["multiplier"] = std::get<Multiplier>(spec.treated).factor;
            }
            treatments[spec.node] = std::move(t);
        }
        doc["treatments"] = std::move(treatments);
    }

    return doc.dump(2) + "\n";
}

void save_model_file(const ModelFile& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    }
    out << model_to_text(model);
    if (!out) {
        throw Error(ErrorCode::IoError, "failed while writing '" + path + "'");
    }
}

std::uint64_t content_hash(std::string_view bytes) { return hash_name(bytes); }

std::string content_hash_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(content_hash(bytes)));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace causalmed
