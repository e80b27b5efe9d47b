#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace kgw {

using NodeId = std::uint32_t;
using RelId = std::uint32_t;

// A label-level edge. Graph internals use interned ids; everything that
// crosses a module boundary speaks labels.
struct Triple {
    std::string head;
    std::string relation;
    std::string tail;

    auto operator<=>(const Triple&) const = default;
};

enum class UpdateKind { AddEdge, RemoveEdge, AddNode, RemoveNode };

struct GraphUpdate {
    UpdateKind kind;
    Triple edge;       // AddEdge / RemoveEdge
    std::string node;  // AddNode / RemoveNode

    static GraphUpdate add_edge(Triple t) { return {UpdateKind::AddEdge, std::move(t), {}}; }
    static GraphUpdate remove_edge(Triple t) { return {UpdateKind::RemoveEdge, std::move(t), {}}; }
    static GraphUpdate add_node(std::string n) { return {UpdateKind::AddNode, {}, std::move(n)}; }
    static GraphUpdate remove_node(std::string n) { return {UpdateKind::RemoveNode, {}, std::move(n)}; }
};

// What an update touched: every node whose adjacency changed plus the
// affected edges. Empty for no-op updates.
struct ChangeSet {
    std::set<std::string> nodes;
    std::set<Triple> edges;

    bool empty() const { return nodes.empty() && edges.empty(); }
    void merge(const ChangeSet& other);
};

// Directed labeled multigraph with mirrored forward/reverse adjacency.
// Adjacency lists are kept sorted by (relation label, endpoint label), which
// makes every traversal downstream deterministic. Immutable after
// construction except through apply_update.
class Graph {
public:
    Graph() = default;

    // `.nt` subset: IRIs in angle brackets, plain literals in double quotes,
    // no blank nodes. Node labels are IRI local names or literal strings.
    static Graph parse_ntriples(const std::string& text);

    // Triple-per-line files with `|` or TAB separator, auto-detected from the
    // first data line.
    static Graph parse_tsv(const std::string& text);

    // Canonical serialization: TAB-separated, sorted by (head, relation, tail).
    // Edges only; isolated nodes are carried by the corpus file.
    std::string to_tsv() const;

    // Content hash over the sorted node set and the canonical edge list.
    std::string fingerprint() const;

    NodeId add_node(const std::string& label);
    // Returns false when the identical edge is already present.
    bool add_edge(const std::string& head, const std::string& relation, const std::string& tail);

    bool has_node(const std::string& label) const;
    std::size_t node_count() const { return active_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    // Upper bound for NodeId values; includes tombstoned slots.
    std::size_t node_slots() const { return node_labels_.size(); }

    const std::string& node_label(NodeId id) const { return node_labels_[id]; }
    const std::string& relation_label(RelId id) const { return rel_labels_[id]; }

    std::vector<std::string> node_labels_sorted() const;
    std::vector<Triple> edges_sorted() const;

    // Outgoing (relation, target) pairs sorted by relation label then target
    // label. Throws NotFound for unknown nodes.
    std::vector<std::pair<std::string, std::string>> neighbors(const std::string& label) const;
    std::vector<std::pair<std::string, std::string>> incoming(const std::string& label) const;

    // Id-level adjacency for traversal loops.
    NodeId node_id(const std::string& label) const;  // throws NotFound
    const std::vector<std::pair<RelId, NodeId>>& out_edges(NodeId id) const { return forward_[id]; }
    const std::vector<std::pair<RelId, NodeId>>& in_edges(NodeId id) const { return reverse_[id]; }

    ChangeSet apply_update(const GraphUpdate& u);

    // Nodes from which some directed path of length <= hops reaches a target;
    // targets themselves count with length 0. Unknown targets contribute
    // nothing.
    std::set<std::string> reverse_reachable(const std::set<std::string>& targets,
                                            std::size_t hops) const;

    // Graph whose edge set (and node set) is the union of both inputs.
    static Graph edge_union(const Graph& a, const Graph& b);

    // Adds (tail, relation + suffix, head) for every existing edge.
    void add_inverse_edges(const std::string& suffix = "_inv");

    // Checks the forward/reverse mirror and endpoint membership; test support.
    bool check_invariants() const;

    bool operator==(const Graph& other) const;

private:
    RelId add_relation(const std::string& label);
    void insert_adj(std::vector<std::pair<RelId, NodeId>>& list, RelId r, NodeId n) const;
    void erase_adj(std::vector<std::pair<RelId, NodeId>>& list, RelId r, NodeId n);
    bool adj_pair_less(const std::pair<RelId, NodeId>& a, const std::pair<RelId, NodeId>& b) const;
    void remove_edge_ids(NodeId h, RelId r, NodeId t);

    std::vector<std::string> node_labels_;
    std::unordered_map<std::string, NodeId> node_ids_;
    std::vector<bool> active_;  // RemoveNode tombstones; labels stay interned
    std::size_t active_count_ = 0;

    std::vector<std::string> rel_labels_;
    std::unordered_map<std::string, RelId> rel_ids_;

    std::vector<std::vector<std::pair<RelId, NodeId>>> forward_;
    std::vector<std::vector<std::pair<RelId, NodeId>>> reverse_;
    std::set<std::tuple<NodeId, RelId, NodeId>> edges_;
};

// Update stream file: one record per line, TAB-separated:
//   add-edge <head> <rel> <tail> | remove-edge <head> <rel> <tail>
//   add-node <label>             | remove-node <label>
std::vector<GraphUpdate> parse_updates(const std::string& text);

}  // namespace kgw
