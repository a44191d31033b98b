#ifndef CAUSALMED_MODEL_IO_HPP
#define CAUSALMED_MODEL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "causalmed/counterfactual.hpp"
#include "causalmed/scm.hpp"

namespace causalmed {

// A fully parameterized model plus any treatment specs stored with it.
struct ModelFile {
    Scm scm;
    std::vector<TreatmentSpec> treatments;
};

// Graph-only load: `nodes` and `edges` keys; mechanisms/noise ignored.
// Parse failures throw ParseError with a line number.
CausalDag load_graph_file(const std::string& path);
CausalDag parse_graph(const std::string& text);

// The raw declarations before validation, for callers that want the full
// issue list from check_dag rather than the first thrown error.
std::pair<std::vector<NodeDecl>, std::vector<Edge>> parse_graph_declarations(
    const std::string& text);

// Full model load: `nodes`, `edges`, `mechanisms`, `noise`, optional
// `treatments`. Opaque mechanisms cannot be represented.
ModelFile load_model_file(const std::string& path);
ModelFile parse_model(const std::string& text);

std::string model_to_text(const ModelFile& model);
void save_model_file(const ModelFile& model, const std::string& path);

// FNV-1a over raw bytes; stamped into analysis reports so reruns are
// auditable against the exact model file they used.
std::uint64_t content_hash(std::string_view bytes);
std::string content_hash_hex(std::string_view bytes);

std::string read_file(const std::string& path);  // IoError when unreadable

}  // namespace causalmed

#endif  // CAUSALMED_MODEL_IO_HPP
