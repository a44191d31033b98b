#include "causalmed/graph.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace causalmed {

std::string_view to_string(NodeRole role) {
    switch (role) {
        case NodeRole::Treatment: return "treatment";
        case NodeRole::Mediator: return "mediator";
        case NodeRole::Outcome: return "outcome";
        case NodeRole::Covariate: return "covariate";
    }
    return "unknown";
}

NodeRole role_from_string(std::string_view text) {
    if (text == "treatment") return NodeRole::Treatment;
    if (text == "mediator") return NodeRole::Mediator;
    if (text == "outcome") return NodeRole::Outcome;
    if (text == "covariate") return NodeRole::Covariate;
    throw Error(ErrorCode::ParseError, "unknown node role '" + std::string(text) + "'");
}

namespace {

std::string edge_label(const Edge& e) { return e.first + "->" + e.second; }

// Deterministic Kahn topological sort over index-based adjacency; ties
// broken by declaration index. Returns nullopt on a cycle.
std::optional<std::vector<int>> kahn_order(std::size_t n,
                                           const std::vector<std::vector<int>>& children,
                                           const std::vector<std::vector<int>>& parents) {
    std::vector<int> in_degree(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        in_degree[v] = static_cast<int>(parents[v].size());
    }
    std::set<int> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (in_degree[v] == 0) ready.insert(static_cast<int>(v));
    }
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        int v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (int c : children[static_cast<std::size_t>(v)]) {
            if (--in_degree[static_cast<std::size_t>(c)] == 0) ready.insert(c);
        }
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

struct IndexedEdges {
    std::vector<std::pair<int, int>> edges;  // unique, declaration order
    std::vector<std::vector<int>> parents;
    std::vector<std::vector<int>> children;
};

// Resolves endpoint names and drops duplicate edges (set semantics).
// Dangling endpoints are reported through `issues`.
IndexedEdges index_edges(const std::vector<NodeDecl>& nodes, const std::vector<Edge>& edges,
                         const std::unordered_map<std::string, int>& by_name,
                         std::vector<GraphIssue>* issues) {
    IndexedEdges out;
    out.parents.resize(nodes.size());
    out.children.resize(nodes.size());
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : edges) {
        auto s = by_name.find(e.first);
        auto t = by_name.find(e.second);
        if (s == by_name.end() || t == by_name.end()) {
            if (issues) {
                issues->push_back({ErrorCode::DanglingEdge,
                                   "edge " + edge_label(e) + " references an undeclared node"});
            }
            continue;
        }
        std::pair<int, int> idx{s->second, t->second};
        if (!seen.insert(idx).second) continue;
        out.edges.push_back(idx);
        out.parents[static_cast<std::size_t>(idx.second)].push_back(idx.first);
        out.children[static_cast<std::size_t>(idx.first)].push_back(idx.second);
    }
    for (auto& p : out.parents) std::sort(p.begin(), p.end());
    for (auto& c : out.children) std::sort(c.begin(), c.end());
    return out;
}

}  // namespace

std::vector<GraphIssue> check_dag(const std::vector<NodeDecl>& nodes,
                                  const std::vector<Edge>& edges) {
    std::vector<GraphIssue> issues;

    std::unordered_map<std::string, int> by_name;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto [it, inserted] = by_name.emplace(nodes[i].name, static_cast<int>(i));
        if (!inserted) {
            issues.push_back({ErrorCode::DuplicateNode,
                              "node name '" + nodes[i].name + "' declared more than once"});
        }
    }

    int outcome_count = 0;
    for (const NodeDecl& n : nodes) {
        if (n.role == NodeRole::Outcome) ++outcome_count;
    }
    if (outcome_count > 1) {
        issues.push_back({ErrorCode::MultipleOutcomes,
                          "graph declares " + std::to_string(outcome_count) +
                              " outcome nodes; exactly one is required"});
    } else if (outcome_count == 0) {
        issues.push_back({ErrorCode::MissingOutcome, "graph declares no outcome node"});
    }

    IndexedEdges idx = index_edges(nodes, edges, by_name, &issues);

    // Mediator positions in the mediator order (declaration order).
    std::unordered_map<int, int> mediator_pos;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].role == NodeRole::Mediator) {
            int pos = static_cast<int>(mediator_pos.size());
            mediator_pos[static_cast<int>(i)] = pos;
        }
    }

    for (const auto& [s, t] : idx.edges) {
        const NodeDecl& src = nodes[static_cast<std::size_t>(s)];
        const NodeDecl& tgt = nodes[static_cast<std::size_t>(t)];
        const std::string label = src.name + "->" + tgt.name;
        if (tgt.role == NodeRole::Treatment) {
            issues.push_back({ErrorCode::ForbiddenEdge,
                              "edge " + label + " targets a treatment; treatments are root nodes"});
            continue;
        }
        if (src.role == NodeRole::Outcome) {
            issues.push_back({ErrorCode::ForbiddenEdge,
                              "edge " + label + " leaves the outcome; the outcome is a sink"});
            continue;
        }
        if (src.role == NodeRole::Mediator && tgt.role == NodeRole::Mediator &&
            mediator_pos.at(s) >= mediator_pos.at(t)) {
            issues.push_back({ErrorCode::ForbiddenEdge,
                              "edge " + label + " runs against the mediator order"});
        }
    }

    if (!kahn_order(nodes.size(), idx.children, idx.parents)) {
        issues.push_back({ErrorCode::CycleDetected, "graph contains a directed cycle"});
    }
    return issues;
}

CausalDag::CausalDag(std::vector<NodeDecl> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)) {
    auto issues = check_dag(nodes_, edges);
    if (!issues.empty()) {
        throw Error(issues.front().code, issues.front().message);
    }

    std::unordered_map<std::string, int> by_name;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        by_name.emplace(nodes_[i].name, static_cast<int>(i));
    }
    IndexedEdges idx = index_edges(nodes_, edges, by_name, nullptr);
    edges_ = std::move(idx.edges);
    parents_ = std::move(idx.parents);
    children_ = std::move(idx.children);

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        switch (nodes_[i].role) {
            case NodeRole::Treatment: treatments_.push_back(static_cast<int>(i)); break;
            case NodeRole::Mediator: mediator_order_.push_back(static_cast<int>(i)); break;
            case NodeRole::Outcome: outcome_ = static_cast<int>(i); break;
            case NodeRole::Covariate: break;
        }
    }
    topo_ = *kahn_order(nodes_.size(), children_, parents_);
}

std::vector<Edge> CausalDag::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& [s, t] : edges_) {
        out.emplace_back(name(s), name(t));
    }
    return out;
}

bool CausalDag::has_edge(int source, int target) const {
    const auto& ps = parents_[static_cast<std::size_t>(target)];
    return std::binary_search(ps.begin(), ps.end(), source);
}

int CausalDag::index_of(const std::string& node_name) const {
    if (auto idx = find(node_name)) return *idx;
    throw Error(ErrorCode::UnknownNode, "no node named '" + node_name + "'");
}

std::optional<int> CausalDag::find(const std::string& node_name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].name == node_name) return static_cast<int>(i);
    }
    return std::nullopt;
}

const std::vector<int>& CausalDag::parents(int index) const {
    return parents_[static_cast<std::size_t>(index)];
}

const std::vector<int>& CausalDag::children(int index) const {
    return children_[static_cast<std::size_t>(index)];
}

bool CausalDag::reachable(int from, int to) const {
    if (from == to) return true;
    std::vector<int> stack{from};
    std::vector<bool> seen(nodes_.size(), false);
    seen[static_cast<std::size_t>(from)] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int c : children_[static_cast<std::size_t>(v)]) {
            if (c == to) return true;
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = true;
                stack.push_back(c);
            }
        }
    }
    return false;
}

CausalDag build_dag(const std::vector<NodeDecl>& nodes, const std::vector<Edge>& edges) {
    return CausalDag(nodes, edges);
}

std::vector<std::string> topological_order(const CausalDag& dag) {
    std::vector<std::string> out;
    out.reserve(dag.node_count());
    for (int idx : dag.topological_indices()) out.push_back(dag.name(idx));
    return out;
}

EdgeCatalog classify_edges(const CausalDag& dag) {
    EdgeCatalog catalog;
    for (const auto& [s, t] : dag.edge_indices()) {
        NodeRole sr = dag.role(s);
        NodeRole tr = dag.role(t);
        Edge e{dag.name(s), dag.name(t)};
        if (sr == NodeRole::Covariate || tr == NodeRole::Covariate) {
            throw Error(ErrorCode::UnclassifiableEdge,
                        "edge " + edge_label(e) + " touches a covariate node");
        }
        if (sr == NodeRole::Treatment && tr == NodeRole::Mediator) {
            catalog.root_to_mediator.push_back(std::move(e));
        } else if (sr == NodeRole::Treatment && tr == NodeRole::Outcome) {
            catalog.root_to_outcome.push_back(std::move(e));
        } else if (sr == NodeRole::Mediator && tr == NodeRole::Mediator) {
            catalog.mediator_to_mediator.push_back(std::move(e));
        } else {
            catalog.mediator_to_outcome.push_back(std::move(e));
        }
    }
    return catalog;
}

std::uint64_t dag_configuration_exponent(int num_treatments, int num_mediators) {
    if (num_treatments < 1) {
        throw Error(ErrorCode::InvalidCount, "at least one treatment is required");
    }
    if (num_mediators < 0) {
        throw Error(ErrorCode::InvalidCount, "mediator count cannot be negative");
    }
    auto i = static_cast<std::uint64_t>(num_treatments);
    auto j = static_cast<std::uint64_t>(num_mediators);
    return i * j + j * (j - (j > 0 ? 1 : 0)) / 2 + j + i;
}

BigInt count_dag_configurations(int num_treatments, int num_mediators) {
    std::uint64_t exponent = dag_configuration_exponent(num_treatments, num_mediators);
    return BigInt(1) << exponent;
}

namespace {

// Universe bit order: T_i->M_j (treatment-major), T_i->O, M_i->M_j (i<j), M_j->O.
std::vector<Edge> edge_universe(int num_treatments, int num_mediators) {
    std::vector<Edge> universe;
    auto t_name = [](int i) { return "T" + std::to_string(i + 1); };
    auto m_name = [](int j) { return "M" + std::to_string(j + 1); };
    for (int i = 0; i < num_treatments; ++i) {
        for (int j = 0; j < num_mediators; ++j) {
            universe.emplace_back(t_name(i), m_name(j));
        }
    }
    for (int i = 0; i < num_treatments; ++i) universe.emplace_back(t_name(i), "O");
    for (int a = 0; a < num_mediators; ++a) {
        for (int b = a + 1; b < num_mediators; ++b) {
            universe.emplace_back(m_name(a), m_name(b));
        }
    }
    for (int j = 0; j < num_mediators; ++j) universe.emplace_back(m_name(j), "O");
    return universe;
}

}  // namespace

DagEnumerator::DagEnumerator(int num_treatments, int num_mediators,
                             std::optional<std::uint64_t> limit) {
    std::uint64_t exponent = dag_configuration_exponent(num_treatments, num_mediators);
    if (!limit && exponent > 24) {
        throw Error(ErrorCode::TooLarge,
                    "enumeration over 2^" + std::to_string(exponent) +
                        " configurations needs an explicit limit");
    }
    universe_ = edge_universe(num_treatments, num_mediators);
    if (exponent < 64) {
        total_ = std::uint64_t{1} << exponent;
    } else {
        total_ = std::numeric_limits<std::uint64_t>::max();
    }
    if (limit) total_ = std::min(total_, *limit);

    for (int i = 0; i < num_treatments; ++i) {
        node_decls_.push_back({"T" + std::to_string(i + 1), NodeRole::Treatment});
    }
    for (int j = 0; j < num_mediators; ++j) {
        node_decls_.push_back({"M" + std::to_string(j + 1), NodeRole::Mediator});
    }
    node_decls_.push_back({"O", NodeRole::Outcome});
}

std::optional<CausalDag> DagEnumerator::next() {
    if (done_ || mask_ >= total_) return std::nullopt;
    std::vector<Edge> edges;
    for (std::size_t bit = 0; bit < universe_.size() && bit < 64; ++bit) {
        if (mask_ & (std::uint64_t{1} << bit)) edges.push_back(universe_[bit]);
    }
    CausalDag dag(node_decls_, edges);
    if (mask_ == std::numeric_limits<std::uint64_t>::max()) {
        done_ = true;
    } else {
        ++mask_;
    }
    return dag;
}

std::vector<CausalDag> enumerate_dag_configurations(int num_treatments, int num_mediators,
                                                    std::optional<std::uint64_t> limit) {
    DagEnumerator enumerator(num_treatments, num_mediators, limit);
    std::vector<CausalDag> out;
    while (auto dag = enumerator.next()) out.push_back(std::move(*dag));
    return out;
}

bool mediation_relevant(const CausalDag& dag, const std::string& treatment,
                        const std::string& mediator) {
    int t = dag.index_of(treatment);
    int m = dag.index_of(mediator);
    if (dag.role(t) != NodeRole::Treatment) {
        throw Error(ErrorCode::InvalidRole, "'" + treatment + "' is not a treatment node");
    }
    if (dag.role(m) != NodeRole::Mediator) {
        throw Error(ErrorCode::InvalidRole, "'" + mediator + "' is not a mediator node");
    }
    if (dag.outcome_index() < 0) return false;
    return dag.reachable(t, m) && dag.reachable(m, dag.outcome_index());
}

}  // namespace causalmed
