#include "walks.hpp"

#include <algorithm>
#include <sstream>

#include "error.hpp"
#include "util.hpp"

namespace kgw {

std::string traversal_name(TraversalKind k) { return k == TraversalKind::RW ? "rw" : "bfs"; }

TraversalKind traversal_from_name(const std::string& name) {
    if (name == "rw") return TraversalKind::RW;
    if (name == "bfs") return TraversalKind::BFS;
    throw usage_error("unknown traversal: " + name + " (expected rw or bfs)");
}

std::string walk_key(const Walk& w) {
    std::vector<std::string> fields;
    fields.reserve(1 + 2 * w.steps.size());
    fields.push_back(w.root);
    for (const auto& [rel, node] : w.steps) {
        fields.push_back(rel);
        fields.push_back(node);
    }
    return join_record(fields);
}

std::vector<Triple> walk_triples(const Walk& w) {
    std::vector<Triple> out;
    out.reserve(w.steps.size());
    std::string head = w.root;
    for (const auto& [rel, node] : w.steps) {
        out.push_back({head, rel, node});
        head = node;
    }
    return out;
}

void WalkConfig::validate() const {
    if (depth < 1) throw usage_error("walk depth must be >= 1");
    if (traversal == TraversalKind::RW && num_walks < 1)
        throw usage_error("num_walks must be >= 1 for random walks");
}

std::size_t Corpus::distinct_walk_count() const {
    std::size_t n = 0;
    for (const auto& [root, list] : walks) n += list.size();
    return n;
}

std::size_t Corpus::instance_count() const {
    if (config.traversal == TraversalKind::BFS) return distinct_walk_count();
    std::size_t n = 0;
    for (const auto& [key, count] : multiplicity) n += count;
    return n;
}

Walk random_walk(const Graph& g, const std::string& root, std::uint32_t depth,
                 std::uint64_t seed) {
    NodeId cur = g.node_id(root);
    Walk w{root, {}, TraversalKind::RW, seed};
    SplitMix64 rng(seed);
    for (std::uint32_t i = 0; i < depth; ++i) {
        const auto& nb = g.out_edges(cur);
        if (nb.empty()) break;  // sink: every continuation has probability 0
        const auto& [rel, next] = nb[rng.bounded(nb.size())];
        w.steps.emplace_back(g.relation_label(rel), g.node_label(next));
        cur = next;
    }
    return w;
}

namespace {

// Appends root's walks and multiplicities to the corpus under construction.
void generate_rw_for_root(const Graph& g, const WalkConfig& cfg, const std::string& root,
                          Corpus& corpus) {
    const std::uint64_t root_hash = fnv1a64(root);
    std::vector<Walk> distinct;
    for (std::uint32_t j = 0; j < cfg.num_walks; ++j) {
        Walk w = random_walk(g, root, cfg.depth, derive_seed(cfg.global_seed, root_hash, j));
        std::string key = walk_key(w);
        auto [it, inserted] = corpus.multiplicity.try_emplace(key, 0);
        if (it->second == 0) distinct.push_back(std::move(w));
        ++it->second;
        (void)inserted;
    }
    corpus.walks[root] = std::move(distinct);
}

// Reusable traversal state. Visited marks are generation stamps, so running
// the search from the next root costs the explored set, not the node count;
// without this a whole-graph corpus build degrades to quadratic.
struct BfsWorkspace {
    std::vector<std::uint32_t> stamp;
    std::vector<std::uint32_t> depth_of;
    std::vector<std::pair<NodeId, RelId>> parent;
    std::vector<NodeId> order;  // discovery order, root excluded
    std::vector<NodeId> queue;
    std::uint32_t round = 0;

    void run(const Graph& g, NodeId root, std::uint32_t max_depth) {
        if (stamp.size() < g.node_slots()) {
            stamp.resize(g.node_slots(), 0);
            depth_of.resize(g.node_slots(), 0);
            parent.resize(g.node_slots(), {0, 0});
        }
        if (++round == 0) {  // stamp wrap
            std::fill(stamp.begin(), stamp.end(), 0);
            round = 1;
        }
        order.clear();
        queue.clear();
        stamp[root] = round;
        depth_of[root] = 0;
        queue.push_back(root);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            NodeId u = queue[head];
            if (depth_of[u] >= max_depth) continue;
            for (const auto& [rel, v] : g.out_edges(u)) {
                if (stamp[v] == round) continue;  // first parent wins
                stamp[v] = round;
                depth_of[v] = depth_of[u] + 1;
                parent[v] = {u, rel};
                order.push_back(v);
                queue.push_back(v);
            }
        }
    }
};

void generate_bfs_for_root(const Graph& g, const WalkConfig& cfg, const std::string& root,
                           Corpus& corpus, BfsWorkspace& ws) {
    NodeId root_id = g.node_id(root);
    ws.run(g, root_id, cfg.depth);
    std::vector<Walk> list;
    list.reserve(ws.order.size());
    for (NodeId v : ws.order) {
        Walk w{root, {}, TraversalKind::BFS, 0};
        std::vector<std::pair<std::string, std::string>> rev;
        for (NodeId cur = v; cur != root_id; cur = ws.parent[cur].first) {
            rev.emplace_back(g.relation_label(ws.parent[cur].second), g.node_label(cur));
        }
        w.steps.assign(rev.rbegin(), rev.rend());
        list.push_back(std::move(w));
    }
    corpus.walks[root] = std::move(list);
}

}  // namespace

Corpus generate_rw_corpus(const Graph& g, const WalkConfig& cfg) {
    cfg.validate();
    if (cfg.traversal != TraversalKind::RW) throw usage_error("config traversal is not rw");
    Corpus corpus;
    corpus.config = cfg;
    corpus.graph_fingerprint = g.fingerprint();
    for (const std::string& root : g.node_labels_sorted())
        generate_rw_for_root(g, cfg, root, corpus);
    return corpus;
}

std::vector<std::vector<std::string>> bfs_layers(const Graph& g, const std::string& root,
                                                 std::uint32_t max_depth) {
    NodeId root_id = g.node_id(root);
    BfsWorkspace ws;
    ws.run(g, root_id, max_depth);
    std::vector<std::vector<std::string>> layers(1, {root});
    for (NodeId v : ws.order) {
        std::uint32_t d = ws.depth_of[v];
        if (layers.size() <= d) layers.resize(d + 1);
        layers[d].push_back(g.node_label(v));
    }
    for (auto& layer : layers) std::sort(layer.begin(), layer.end());
    return layers;
}

Corpus generate_bfs_corpus(const Graph& g, const WalkConfig& cfg) {
    cfg.validate();
    if (cfg.traversal != TraversalKind::BFS) throw usage_error("config traversal is not bfs");
    Corpus corpus;
    corpus.config = cfg;
    corpus.graph_fingerprint = g.fingerprint();
    BfsWorkspace ws;
    for (const std::string& root : g.node_labels_sorted())
        generate_bfs_for_root(g, cfg, root, corpus, ws);
    return corpus;
}

Corpus generate_corpus(const Graph& g, const WalkConfig& cfg) {
    return cfg.traversal == TraversalKind::RW ? generate_rw_corpus(g, cfg)
                                              : generate_bfs_corpus(g, cfg);
}

std::set<std::string> affected_roots(const Graph& g_before, const Graph& g_after,
                                     const Corpus& corpus, const ChangeSet& changed) {
    if (corpus.graph_fingerprint != g_before.fingerprint())
        throw Error(ErrorCode::Stale,
                    "corpus fingerprint does not match the pre-update graph; rebuild required");
    if (changed.empty()) return {};
    Graph u = Graph::edge_union(g_before, g_after);
    std::set<std::string> endpoints = changed.nodes;
    for (const Triple& e : changed.edges) {
        endpoints.insert(e.head);
        endpoints.insert(e.tail);
    }
    return u.reverse_reachable(endpoints, corpus.config.depth);
}

Corpus incremental_update(const Graph& g_before, const Graph& g_after, const Corpus& corpus,
                          const ChangeSet& changed) {
    std::set<std::string> affected = affected_roots(g_before, g_after, corpus, changed);
    Corpus result = corpus;
    result.graph_fingerprint = g_after.fingerprint();
    BfsWorkspace ws;
    for (const std::string& root : affected) {
        auto it = result.walks.find(root);
        if (it != result.walks.end()) {
            for (const Walk& w : it->second) result.multiplicity.erase(walk_key(w));
            result.walks.erase(it);
        }
        if (!g_after.has_node(root)) continue;
        if (corpus.config.traversal == TraversalKind::RW)
            generate_rw_for_root(g_after, corpus.config, root, result);
        else
            generate_bfs_for_root(g_after, corpus.config, root, result, ws);
    }
    return result;
}

// --- serialization ---

std::string Corpus::serialize() const {
    std::string out = "#corpus\tv1\t" + traversal_name(config.traversal) + '\t' +
                      std::to_string(config.depth) + '\t' + std::to_string(config.num_walks) +
                      '\t' + std::to_string(config.global_seed) + '\t' + graph_fingerprint + '\n';
    for (const auto& [root, list] : walks) {
        if (list.empty()) {
            out += join_record({root, traversal_name(config.traversal), "0", "0"});
            out.push_back('\n');
            continue;
        }
        for (const Walk& w : list) {
            std::uint32_t mult = 1;
            if (config.traversal == TraversalKind::RW) {
                auto it = multiplicity.find(walk_key(w));
                mult = it == multiplicity.end() ? 1 : it->second;
            }
            std::vector<std::string> fields{root, traversal_name(w.kind),
                                            std::to_string(w.steps.size()), std::to_string(mult)};
            for (const auto& [rel, node] : w.steps) {
                fields.push_back(rel);
                fields.push_back(node);
            }
            out += join_record(fields);
            out.push_back('\n');
        }
    }
    return out;
}

Corpus Corpus::deserialize(const std::string& text) {
    Corpus corpus;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing corpus header");
    ++lineno;
    try {
        std::vector<std::string> h = split(line, '\t');
        if (h.size() != 7 || h[0] != "#corpus" || h[1] != "v1")
            throw ParseError(1, "bad corpus header");
        corpus.config.traversal = traversal_from_name(h[2]);
        corpus.config.depth = static_cast<std::uint32_t>(std::stoul(h[3]));
        corpus.config.num_walks = static_cast<std::uint32_t>(std::stoul(h[4]));
        corpus.config.global_seed = std::stoull(h[5]);
        corpus.graph_fingerprint = h[6];
    } catch (const std::logic_error&) {
        throw ParseError(1, "bad corpus header");
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f = split_record(line);
        if (f.size() < 4) throw ParseError(lineno, "short corpus record");
        const std::string& root = f[0];
        TraversalKind kind = traversal_from_name(f[1]);
        std::size_t steps = 0;
        std::uint32_t mult = 0;
        try {
            steps = std::stoul(f[2]);
            mult = static_cast<std::uint32_t>(std::stoul(f[3]));
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "bad numeric field in corpus record");
        }
        if (f.size() != 4 + 2 * steps) throw ParseError(lineno, "step count mismatch");
        corpus.walks.try_emplace(root);
        if (mult == 0) {
            if (steps != 0) throw ParseError(lineno, "zero multiplicity with steps");
            continue;  // empty-root marker
        }
        Walk w{root, {}, kind, 0};
        w.steps.reserve(steps);
        for (std::size_t i = 0; i < steps; ++i) w.steps.emplace_back(f[4 + 2 * i], f[5 + 2 * i]);
        if (corpus.config.traversal == TraversalKind::RW) corpus.multiplicity[walk_key(w)] = mult;
        corpus.walks[root].push_back(std::move(w));
    }
    return corpus;
}

}  // namespace kgw
