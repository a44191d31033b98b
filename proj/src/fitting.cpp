#include "causalmed/fitting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "causalmed/summation.hpp"

namespace causalmed {

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw Error(ErrorCode::UnknownColumn, "no column named '" + name + "'");
}

std::vector<double> Dataset::column(const std::string& name) const {
    std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

namespace {

// Trims spaces and a trailing carriage return (files written on Windows).
std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() &&
           (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool parse_number(std::string_view text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !text.empty();
}

}  // namespace

Dataset load_table(std::istream& in) {
    Dataset ds;
    std::string line;

    // Header row: skip fully blank leading lines, then require one.
    while (std::getline(in, line)) {
        if (!trim(line).empty()) break;
        line.clear();
    }
    if (trim(line).empty()) {
        throw Error(ErrorCode::EmptyTable, "input has no header row");
    }
    for (std::string_view field : split_fields(line)) {
        ds.columns.emplace_back(field);
    }
    std::set<std::string> seen;
    for (const std::string& c : ds.columns) {
        if (!seen.insert(c).second) {
            throw Error(ErrorCode::HeaderMismatch, "duplicate column name '" + c + "'");
        }
        if (c.empty()) {
            throw Error(ErrorCode::HeaderMismatch, "empty column name in header");
        }
    }

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != ds.columns.size()) {
            ++ds.dropped_rows;
            ds.warnings.push_back("line " + std::to_string(line_number) + ": expected " +
                                  std::to_string(ds.columns.size()) + " fields, got " +
                                  std::to_string(fields.size()) + "; row dropped");
            continue;
        }
        std::vector<double> row(fields.size());
        bool ok = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_number(fields[i], row[i])) {
                ++ds.dropped_rows;
                ds.warnings.push_back("line " + std::to_string(line_number) + ": cell '" +
                                      std::string(fields[i]) + "' in column '" + ds.columns[i] +
                                      "' is not numeric; row dropped");
                ok = false;
                break;
            }
        }
        if (ok) ds.rows.push_back(std::move(row));
    }
    return ds;
}

Dataset load_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    }
    return load_table(in);
}

std::string_view to_string(NoiseMode mode) {
    return mode == NoiseMode::Empirical ? "empirical" : "gaussian";
}

NoiseMode noise_mode_from_string(std::string_view text) {
    if (text == "empirical") return NoiseMode::Empirical;
    if (text == "gaussian") return NoiseMode::Gaussian;
    throw Error(ErrorCode::ParseError, "unknown noise mode '" + std::string(text) + "'");
}

std::pair<Scm, FitReport> fit_scm(const CausalDag& dag, const Dataset& data, NoiseMode mode) {
    // Every node needs a column before any per-node work starts.
    std::vector<std::size_t> node_column(dag.node_count());
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const std::string& name = dag.name(static_cast<int>(i));
        bool found = false;
        for (std::size_t c = 0; c < data.columns.size(); ++c) {
            if (data.columns[c] == name) {
                node_column[i] = c;
                found = true;
                break;
            }
        }
        if (!found) {
            throw Error(ErrorCode::HeaderMismatch, "data has no column for node '" + name + "'");
        }
    }

    const auto n = static_cast<Eigen::Index>(data.n_rows());
    FitReport report;
    report.rows_used = data.n_rows();
    report.rows_dropped = data.dropped_rows;

    std::map<std::string, Mechanism> mechanisms;
    std::map<std::string, NoiseModel> noise;

    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const int node = static_cast<int>(i);
        if (dag.role(node) == NodeRole::Treatment) continue;
        const std::string& name = dag.name(node);
        const auto& parents = dag.parents(node);
        const auto p = static_cast<Eigen::Index>(parents.size());

        if (n <= p) {
            throw Error(ErrorCode::InsufficientRows,
                        "node '" + name + "' has " + std::to_string(parents.size()) +
                            " parents but only " + std::to_string(data.n_rows()) + " rows");
        }

        Eigen::MatrixXd design(n, p + 1);
        Eigen::VectorXd response(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto& row = data.rows[static_cast<std::size_t>(r)];
            design(r, 0) = 1.0;
            for (Eigen::Index c = 0; c < p; ++c) {
                design(r, c + 1) = row[node_column[static_cast<std::size_t>(
                    parents[static_cast<std::size_t>(c)])]];
            }
            response(r) = row[node_column[i]];
        }

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < p + 1) {
            throw Error(ErrorCode::RankDeficient,
                        "design for node '" + name + "' is rank-deficient (collinear parents)");
        }
        Eigen::VectorXd beta = qr.solve(response);
        Eigen::VectorXd residuals = response - design * beta;

        const double ss_res = residuals.squaredNorm();
        const double y_mean = response.mean();
        const double ss_tot = (response.array() - y_mean).matrix().squaredNorm();

        NodeFit fit;
        fit.node = name;
        fit.intercept = beta(0);
        for (Eigen::Index c = 0; c < p; ++c) {
            fit.coefficients.emplace_back(dag.name(parents[static_cast<std::size_t>(c)]),
                                          beta(c + 1));
        }
        const Eigen::Index dof = n - (p + 1);
        fit.residual_stddev = dof > 0 ? std::sqrt(ss_res / static_cast<double>(dof)) : 0.0;
        fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-24 ? 1.0 : 0.0);
        report.nodes.push_back(fit);

        LinearMechanism mech;
        mech.intercept = fit.intercept;
        for (const auto& [parent, coef] : fit.coefficients) mech.coefficients[parent] = coef;
        mechanisms.emplace(name, std::move(mech));

        if (mode == NoiseMode::Empirical) {
            noise.emplace(name, EmpiricalNoise{{residuals.data(), residuals.data() + n}});
        } else {
            noise.emplace(name, GaussianNoise{0.0, fit.residual_stddev});
        }
    }

    return {Scm(dag, std::move(mechanisms), std::move(noise)), std::move(report)};
}

double EmpiricalDistribution::mean() const {
    NeumaierSum sum;
    for (double v : *samples) sum.add(v);
    return sum.value() / static_cast<double>(samples->size());
}

EmpiricalDistribution observed_baseline(const Dataset& data, const std::string& node) {
    std::size_t idx = data.column_index(node);
    auto pool = std::make_shared<std::vector<double>>();
    pool->reserve(data.n_rows());
    for (const auto& row : data.rows) pool->push_back(row[idx]);
    if (pool->empty()) {
        throw Error(ErrorCode::EmptyColumn, "column '" + node + "' has no rows");
    }
    return {std::move(pool), node};
}

}  // namespace causalmed
