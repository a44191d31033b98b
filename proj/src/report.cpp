#include "causalmed/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace causalmed {

namespace {

std::string six_digits(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

void append_row(std::string& out, EffectKind kind, const std::string& treatment,
                const std::string& mediator, const EffectEstimate& est) {
    out += to_string(kind);
    out += '\t';
    out += treatment;
    out += '\t';
    out += mediator.empty() ? "-" : mediator;
    out += '\t';
    out += six_digits(est.point);
    out += '\t';
    out += six_digits(est.std_error);
    out += '\t';
    out += std::to_string(est.n_draws);
    out += '\n';
}

}  // namespace

std::string to_tsv(const AnalysisReport& report) {
    std::string out;
    out += "# seed\t" + std::to_string(report.seed) + "\n";
    out += "# n_draws\t" + std::to_string(report.n_draws) + "\n";
    out += "# model_hash\t" + report.model_hash + "\n";
    for (const std::string& w : report.warnings) {
        out += "# warning\t" + w + "\n";
    }
    out += "kind\ttreatment\tmediator\tpoint\tstd_error\tn_draws\n";
    for (std::size_t t = 0; t < report.matrix.treatments.size(); ++t) {
        for (std::size_t m = 0; m < report.matrix.mediators.size(); ++m) {
            append_row(out, EffectKind::Nie, report.matrix.treatments[t],
                       report.matrix.mediators[m], report.matrix.at(t, m));
        }
    }
    for (const auto& [treatment, est] : report.total_effects) {
        append_row(out, EffectKind::Te, treatment, "", est);
    }
    if (report.direct_effect) {
        append_row(out, EffectKind::Nde, report.direct_effect->first, "",
                   report.direct_effect->second);
    }
    return out;
}

std::string to_json_text(const AnalysisReport& report) {
    nlohmann::json doc;
    doc["seed"] = report.seed;
    doc["n_draws"] = report.n_draws;
    doc["model_hash"] = report.model_hash;
    doc["warnings"] = report.warnings;

    nlohmann::json effects = nlohmann::json::array();
    auto push = [&effects](EffectKind kind, const std::string& treatment,
                           const std::string& mediator, const EffectEstimate& est) {
        nlohmann::json row = {{"kind", std::string(to_string(kind))},
                              {"treatment", treatment},
                              {"point", est.point},
                              {"std_error", est.std_error},
                              {"n_draws", est.n_draws}};
        if (mediator.empty()) {
            row["mediator"] = nullptr;
        } else {
            row["mediator"] = mediator;
        }
        effects.push_back(std::move(row));
    };

    for (std::size_t t = 0; t < report.matrix.treatments.size(); ++t) {
        for (std::size_t m = 0; m < report.matrix.mediators.size(); ++m) {
            push(EffectKind::Nie, report.matrix.treatments[t], report.matrix.mediators[m],
                 report.matrix.at(t, m));
        }
    }
    for (const auto& [treatment, est] : report.total_effects) {
        push(EffectKind::Te, treatment, "", est);
    }
    if (report.direct_effect) {
        push(EffectKind::Nde, report.direct_effect->first, "", report.direct_effect->second);
    }
    doc["effects"] = std::move(effects);
    return doc.dump(2) + "\n";
}

}  // namespace causalmed
