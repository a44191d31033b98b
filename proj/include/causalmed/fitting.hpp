#ifndef CAUSALMED_FITTING_HPP
#define CAUSALMED_FITTING_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "causalmed/scm.hpp"

namespace causalmed {

// Tabular numeric observations, one column per node. Rows with gaps or
// non-numeric cells are dropped at load time, never imputed.
struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t column_index(const std::string& name) const;  // UnknownColumn if absent
    std::vector<double> column(const std::string& name) const;
};

// Parses comma-separated text with a header row. Every cell must parse as a
// number; offending rows are dropped with a warning. Throws EmptyTable for
// input without a header and HeaderMismatch for duplicate column names.
Dataset load_table(std::istream& in);
Dataset load_table_file(const std::string& path);  // IoError when unreadable

struct NodeFit {
    std::string node;
    double intercept = 0.0;
    // Parent-name/estimate pairs in DAG parent order.
    std::vector<std::pair<std::string, double>> coefficients;
    double residual_stddev = 0.0;
    double r_squared = 1.0;
};

struct FitReport {
    std::vector<NodeFit> nodes;  // one per non-treatment node, DAG order
    std::size_t rows_used = 0;
    std::size_t rows_dropped = 0;
};

enum class NoiseMode { Empirical, Gaussian };

std::string_view to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(std::string_view text);

// Ordinary least squares of every non-treatment node on its DAG parents
// plus an intercept. Noise becomes either the empirical residual pool or
// Gaussian(0, residual stddev). Throws HeaderMismatch for a missing node
// column, InsufficientRows, and RankDeficient for collinear designs.
std::pair<Scm, FitReport> fit_scm(const CausalDag& dag, const Dataset& data, NoiseMode mode);

// Resampling handle over one observed column; feeds the observed-sample
// untreated source of a TreatmentSpec.
struct EmpiricalDistribution {
    std::shared_ptr<const std::vector<double>> samples;
    std::string column;

    double resample(SampleStream& stream) const { return (*samples)[stream.pick(samples->size())]; }
    double mean() const;
};

// Throws UnknownColumn for a missing column, EmptyColumn when it has no rows.
EmpiricalDistribution observed_baseline(const Dataset& data, const std::string& node);

}  // namespace causalmed

#endif  // CAUSALMED_FITTING_HPP
