#ifndef CAUSALMED_GRAPH_HPP
#define CAUSALMED_GRAPH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "causalmed/error.hpp"

namespace causalmed {

using BigInt = boost::multiprecision::cpp_int;

enum class NodeRole { Treatment, Mediator, Outcome, Covariate };

std::string_view to_string(NodeRole role);
NodeRole role_from_string(std::string_view text);

/// Directed edge between two named nodes.
using Edge = std::pair<std::string, std::string>;

struct NodeDecl {
    std::string name;
    NodeRole role;
};

/// A non-fatal structural problem found while validating a node/edge list.
struct GraphIssue {
    ErrorCode code;
    std::string message;
};

/// Validated treatment/mediator/outcome DAG. Immutable after construction;
/// safe to share across threads.
///
/// Permitted edges for treatment/mediator/outcome roles: T->M, T->O,
/// M_i->M_j with i earlier than j in the mediator order, and M->O.
/// Covariate nodes sit outside that taxonomy; their edges are accepted as
/// long as they keep treatments root, the outcome a sink, and the graph
/// acyclic. The mediator order defaults to declaration order.
class CausalDag {
  public:
    CausalDag(std::vector<NodeDecl> nodes, std::vector<Edge> edges);

    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<NodeDecl>& nodes() const { return nodes_; }
    const NodeDecl& node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }

    /// Unique edges in deterministic (declaration) order.
    const std::vector<std::pair<int, int>>& edge_indices() const { return edges_; }
    std::vector<Edge> edges() const;
    bool has_edge(int source, int target) const;

    int index_of(const std::string& name) const;           // UnknownNode if absent
    std::optional<int> find(const std::string& name) const;

    NodeRole role(int index) const { return nodes_[static_cast<std::size_t>(index)].role; }
    const std::string& name(int index) const { return nodes_[static_cast<std::size_t>(index)].name; }

    /// Parent/child index lists sorted by declaration order.
    const std::vector<int>& parents(int index) const;
    const std::vector<int>& children(int index) const;

    int outcome_index() const { return outcome_; }
    const std::vector<int>& treatment_indices() const { return treatments_; }
    /// Mediator indices in mediator order (declaration order by default).
    const std::vector<int>& mediator_order() const { return mediator_order_; }

    /// Node indices in topological order, ties broken by declaration order.
    const std::vector<int>& topological_indices() const { return topo_; }

    bool reachable(int from, int to) const;

  private:
    std::vector<NodeDecl> nodes_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<int> treatments_;
    std::vector<int> mediator_order_;
    std::vector<int> topo_;
    int outcome_ = -1;
};

/// Collects every structural violation instead of stopping at the first;
/// an empty result means the inputs build a valid CausalDag.
std::vector<GraphIssue> check_dag(const std::vector<NodeDecl>& nodes,
                                  const std::vector<Edge>& edges);

/// Validated construction; throws the first issue check_dag would report.
CausalDag build_dag(const std::vector<NodeDecl>& nodes, const std::vector<Edge>& edges);

/// Node names in topological order (deterministic, declaration-order ties).
std::vector<std::string> topological_order(const CausalDag& dag);

/// The four permitted edge categories; partitions the edge set exactly.
struct EdgeCatalog {
    std::vector<Edge> root_to_mediator;
    std::vector<Edge> root_to_outcome;
    std::vector<Edge> mediator_to_mediator;
    std::vector<Edge> mediator_to_outcome;
};

/// Splits dag.edges() into the four permitted categories. Throws
/// UnclassifiableEdge if any edge touches a covariate node.
EdgeCatalog classify_edges(const CausalDag& dag);

/// Number of orderable-edge exponent bits for (num_treatments, num_mediators):
/// I*J + J*(J-1)/2 + J + I.
std::uint64_t dag_configuration_exponent(int num_treatments, int num_mediators);

/// Exact count of distinct DAG configurations: 2^(I*J + J(J-1)/2 + J + I).
BigInt count_dag_configurations(int num_treatments, int num_mediators);

/// Streams every subset of the permitted edge universe over nodes
/// T1..TI, M1..MJ, O as a validated CausalDag. Without an explicit limit
/// the exponent is capped at 24 (TooLarge beyond that).
class DagEnumerator {
  public:
    DagEnumerator(int num_treatments, int num_mediators,
                  std::optional<std::uint64_t> limit = std::nullopt);

    std::optional<CausalDag> next();

    /// The permitted edge universe, in the bit order used for enumeration.
    const std::vector<Edge>& universe() const { return universe_; }
    std::uint64_t total() const { return total_; }

  private:
    std::vector<NodeDecl> node_decls_;
    std::vector<Edge> universe_;
    std::uint64_t total_ = 0;
    std::uint64_t mask_ = 0;
    bool done_ = false;
};

/// Collects the full enumeration into a vector (same guard as DagEnumerator).
std::vector<CausalDag> enumerate_dag_configurations(
    int num_treatments, int num_mediators,
    std::optional<std::uint64_t> limit = std::nullopt);

/// True iff a directed path treatment->mediator exists and a directed path
/// mediator->outcome exists, i.e. the pair can carry an indirect effect.
bool mediation_relevant(const CausalDag& dag, const std::string& treatment,
                        const std::string& mediator);

}  // namespace causalmed

#endif  // CAUSALMED_GRAPH_HPP
