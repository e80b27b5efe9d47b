#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "graph.hpp"

namespace kgw {

enum class TraversalKind { RW, BFS };

std::string traversal_name(TraversalKind k);
TraversalKind traversal_from_name(const std::string& name);  // throws Usage

// An alternating node/relation sequence rooted at a vertex. The root is the
// implicit first node; a zero-step walk is the degenerate sink/isolated case.
struct Walk {
    std::string root;
    std::vector<std::pair<std::string, std::string>> steps;  // (relation, node)
    TraversalKind kind = TraversalKind::RW;
    std::uint64_t seed = 0;  // RW provenance; not part of walk identity

    bool operator==(const Walk& other) const {
        return root == other.root && steps == other.steps && kind == other.kind;
    }
};

// Canonical identity: escaped (root, rel1, node1, ...) joined by TAB. Used as
// the multiplicity key, the verbalization cache key, and the index walk id.
std::string walk_key(const Walk& w);

// The walk as (head, relation, tail) triples.
std::vector<Triple> walk_triples(const Walk& w);

struct WalkConfig {
    TraversalKind traversal = TraversalKind::BFS;
    std::uint32_t depth = 4;
    std::uint32_t num_walks = 60;  // RW only
    std::uint64_t global_seed = 0;

    void validate() const;  // depth >= 1; num_walks >= 1 for RW
    bool operator==(const WalkConfig&) const = default;
};

// The walk corpus for a graph. Every node of the source graph has an entry;
// RW duplicates are collapsed into multiplicity counts keyed by walk_key.
struct Corpus {
    WalkConfig config;
    std::string graph_fingerprint;
    std::map<std::string, std::vector<Walk>> walks;       // root -> distinct walks
    std::map<std::string, std::uint32_t> multiplicity;    // RW only

    std::size_t distinct_walk_count() const;
    std::size_t instance_count() const;  // counts multiplicities

    // Line-delimited format with a header record; round-trips bit-exactly.
    std::string serialize() const;
    static Corpus deserialize(const std::string& text);

    bool operator==(const Corpus&) const = default;
};

// Single seeded walk; the next (relation, target) is drawn uniformly over the
// ordered neighbor list, terminating early at sinks.
Walk random_walk(const Graph& g, const std::string& root, std::uint32_t depth,
                 std::uint64_t seed);

// num_walks seeded walks per node, collapsed to distinct walks + multiplicity.
// Per-walk seed derives from (global_seed, root label hash, walk index).
Corpus generate_rw_corpus(const Graph& g, const WalkConfig& cfg);

// Nodes partitioned by shortest-path distance from root; L[0] = {root},
// layers disjoint, trailing empty layers trimmed. Sets are returned sorted.
std::vector<std::vector<std::string>> bfs_layers(const Graph& g, const std::string& root,
                                                 std::uint32_t max_depth);

// One walk per node reached within depth: the root-to-node path in the BFS
// spanning tree, first-parent under deterministic neighbor order.
Corpus generate_bfs_corpus(const Graph& g, const WalkConfig& cfg);

Corpus generate_corpus(const Graph& g, const WalkConfig& cfg);

// Superset of roots whose walk set can differ after an update: reverse
// reachability within config.depth hops over the union of the pre- and
// post-update graphs. Throws Stale on fingerprint mismatch.
std::set<std::string> affected_roots(const Graph& g_before, const Graph& g_after,
                                     const Corpus& corpus, const ChangeSet& changed);

// Regenerates walks only for affected roots; element-wise identical to a full
// regeneration on g_after with the same config.
Corpus incremental_update(const Graph& g_before, const Graph& g_after, const Corpus& corpus,
                          const ChangeSet& changed);

}  // namespace kgw
