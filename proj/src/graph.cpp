#include "graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "error.hpp"
#include "util.hpp"

namespace kgw {

void ChangeSet::merge(const ChangeSet& other) {
    nodes.insert(other.nodes.begin(), other.nodes.end());
    edges.insert(other.edges.begin(), other.edges.end());
}

// --- N-Triples subset parsing ---

namespace {

struct NtCursor {
    std::string_view line;
    std::size_t pos = 0;
    std::size_t lineno;

    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineno, msg); }

    bool at_end() {
        skip_ws();
        return pos >= line.size();
    }
};

std::string iri_local_name(std::string_view iri) {
    std::size_t cut = iri.find_last_of("/#");
    if (cut == std::string_view::npos || cut + 1 == iri.size()) return std::string(iri);
    return std::string(iri.substr(cut + 1));
}

// Parses one term: <iri> or "literal". Returns the node label.
std::string parse_nt_term(NtCursor& c, bool allow_literal) {
    c.skip_ws();
    if (c.pos >= c.line.size()) c.fail("unexpected end of line");
    char ch = c.line[c.pos];
    if (ch == '_')
        throw Error(ErrorCode::Unsupported,
                    "line " + std::to_string(c.lineno) + ": blank nodes are not supported");
    if (ch == '<') {
        std::size_t close = c.line.find('>', c.pos + 1);
        if (close == std::string_view::npos) c.fail("unterminated IRI");
        std::string_view iri = c.line.substr(c.pos + 1, close - c.pos - 1);
        c.pos = close + 1;
        return iri_local_name(iri);
    }
    if (ch == '"') {
        if (!allow_literal) c.fail("literal not allowed as predicate");
        std::string out;
        std::size_t i = c.pos + 1;
        for (; i < c.line.size(); ++i) {
            char lc = c.line[i];
            if (lc == '\\') {
                if (i + 1 == c.line.size()) c.fail("dangling escape in literal");
                char esc = c.line[++i];
                switch (esc) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    default: c.fail("unsupported escape in literal");
                }
            } else if (lc == '"') {
                break;
            } else {
                out.push_back(lc);
            }
        }
        if (i >= c.line.size()) c.fail("unterminated literal");
        c.pos = i + 1;
        if (c.pos < c.line.size() && (c.line[c.pos] == '@' || c.line[c.pos] == '^'))
            throw Error(ErrorCode::Unsupported,
                        "line " + std::to_string(c.lineno) +
                            ": language tags and datatyped literals are not supported");
        return out;
    }
    c.fail("expected IRI or literal");
}

}  // namespace

Graph Graph::parse_ntriples(const std::string& text) {
    Graph g;
    std::size_t lineno = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        NtCursor c{line, 0, lineno};
        std::string subject = parse_nt_term(c, true);
        std::string predicate = parse_nt_term(c, false);
        std::string object = parse_nt_term(c, true);
        c.skip_ws();
        if (c.pos >= line.size() || line[c.pos] != '.') c.fail("expected terminating '.'");
        ++c.pos;
        c.skip_ws();
        if (c.pos < line.size() && line[c.pos] != '#') c.fail("trailing content after '.'");

        g.add_edge(subject, predicate, object);
    }
    return g;
}

Graph Graph::parse_tsv(const std::string& text) {
    Graph g;
    std::size_t lineno = 0;
    char sep = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        if (sep == 0) {
            // Auto-detect once per file from the first data line.
            if (raw.find('\t') != std::string::npos) sep = '\t';
            else if (raw.find('|') != std::string::npos) sep = '|';
            else throw ParseError(lineno, "cannot detect separator (no TAB or '|')");
        }
        std::vector<std::string> fields = split(raw, sep);
        if (fields.size() != 3)
            throw ParseError(lineno, "expected 3 fields, got " + std::to_string(fields.size()));
        for (const std::string& f : fields)
            if (f.empty()) throw ParseError(lineno, "empty field");
        g.add_edge(fields[0], fields[1], fields[2]);
    }
    return g;
}

std::string Graph::to_tsv() const {
    std::vector<Triple> triples = edges_sorted();
    std::string out;
    for (const Triple& t : triples) {
        out += t.head;
        out.push_back('\t');
        out += t.relation;
        out.push_back('\t');
        out += t.tail;
        out.push_back('\n');
    }
    return out;
}

std::string Graph::fingerprint() const {
    std::string content;
    for (const std::string& n : node_labels_sorted()) {
        content += n;
        content.push_back('\n');
    }
    content.push_back('\x1e');
    content += to_tsv();
    std::uint64_t h = fnv1a64(content);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

NodeId Graph::add_node(const std::string& label) {
    auto it = node_ids_.find(label);
    if (it != node_ids_.end()) {
        NodeId id = it->second;
        if (!active_[id]) {
            active_[id] = true;
            ++active_count_;
        }
        return id;
    }
    NodeId id = static_cast<NodeId>(node_labels_.size());
    node_labels_.push_back(label);
    node_ids_.emplace(label, id);
    active_.push_back(true);
    ++active_count_;
    forward_.emplace_back();
    reverse_.emplace_back();
    return id;
}

RelId Graph::add_relation(const std::string& label) {
    auto it = rel_ids_.find(label);
    if (it != rel_ids_.end()) return it->second;
    RelId id = static_cast<RelId>(rel_labels_.size());
    rel_labels_.push_back(label);
    rel_ids_.emplace(label, id);
    return id;
}

bool Graph::adj_pair_less(const std::pair<RelId, NodeId>& a,
                          const std::pair<RelId, NodeId>& b) const {
    int c = rel_labels_[a.first].compare(rel_labels_[b.first]);
    if (c != 0) return c < 0;
    return node_labels_[a.second] < node_labels_[b.second];
}

void Graph::insert_adj(std::vector<std::pair<RelId, NodeId>>& list, RelId r, NodeId n) const {
    std::pair<RelId, NodeId> entry{r, n};
    auto it = std::lower_bound(list.begin(), list.end(), entry,
                               [this](const auto& a, const auto& b) { return adj_pair_less(a, b); });
    list.insert(it, entry);
}

void Graph::erase_adj(std::vector<std::pair<RelId, NodeId>>& list, RelId r, NodeId n) {
    auto it = std::find(list.begin(), list.end(), std::pair<RelId, NodeId>{r, n});
    if (it != list.end()) list.erase(it);
}

bool Graph::add_edge(const std::string& head, const std::string& relation,
                     const std::string& tail) {
    NodeId h = add_node(head);
    NodeId t = add_node(tail);
    RelId r = add_relation(relation);
    if (!edges_.insert({h, r, t}).second) return false;
    insert_adj(forward_[h], r, t);
    insert_adj(reverse_[t], r, h);
    return true;
}

bool Graph::has_node(const std::string& label) const {
    auto it = node_ids_.find(label);
    return it != node_ids_.end() && active_[it->second];
}

NodeId Graph::node_id(const std::string& label) const {
    auto it = node_ids_.find(label);
    if (it == node_ids_.end() || !active_[it->second])
        throw Error(ErrorCode::NotFound, "unknown node: " + label);
    return it->second;
}

std::vector<std::string> Graph::node_labels_sorted() const {
    std::vector<std::string> out;
    out.reserve(active_count_);
    for (NodeId id = 0; id < node_labels_.size(); ++id)
        if (active_[id]) out.push_back(node_labels_[id]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Triple> Graph::edges_sorted() const {
    std::vector<Triple> out;
    out.reserve(edges_.size());
    for (const auto& [h, r, t] : edges_)
        out.push_back({node_labels_[h], rel_labels_[r], node_labels_[t]});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::string, std::string>> Graph::neighbors(const std::string& label) const {
    NodeId id = node_id(label);
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(forward_[id].size());
    for (const auto& [r, t] : forward_[id]) out.emplace_back(rel_labels_[r], node_labels_[t]);
    return out;
}

std::vector<std::pair<std::string, std::string>> Graph::incoming(const std::string& label) const {
    NodeId id = node_id(label);
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(reverse_[id].size());
    for (const auto& [r, h] : reverse_[id]) out.emplace_back(rel_labels_[r], node_labels_[h]);
    return out;
}

void Graph::remove_edge_ids(NodeId h, RelId r, NodeId t) {
    edges_.erase({h, r, t});
    erase_adj(forward_[h], r, t);
    erase_adj(reverse_[t], r, h);
}

ChangeSet Graph::apply_update(const GraphUpdate& u) {
    ChangeSet changed;
    switch (u.kind) {
        case UpdateKind::AddEdge: {
            if (add_edge(u.edge.head, u.edge.relation, u.edge.tail)) {
                changed.nodes.insert(u.edge.head);
                changed.nodes.insert(u.edge.tail);
                changed.edges.insert(u.edge);
            }
            break;
        }
        case UpdateKind::RemoveEdge: {
            auto hit = node_ids_.find(u.edge.head);
            auto tit = node_ids_.find(u.edge.tail);
            auto rit = rel_ids_.find(u.edge.relation);
            if (hit == node_ids_.end() || tit == node_ids_.end() || rit == rel_ids_.end() ||
                !edges_.count({hit->second, rit->second, tit->second}))
                throw Error(ErrorCode::NotFound, "edge not found: " + u.edge.head + " " +
                                                     u.edge.relation + " " + u.edge.tail);
            remove_edge_ids(hit->second, rit->second, tit->second);
            changed.nodes.insert(u.edge.head);
            changed.nodes.insert(u.edge.tail);
            changed.edges.insert(u.edge);
            break;
        }
        case UpdateKind::AddNode: {
            if (!has_node(u.node)) {
                add_node(u.node);
                changed.nodes.insert(u.node);
            }
            break;
        }
        case UpdateKind::RemoveNode: {
            auto it = node_ids_.find(u.node);
            if (it == node_ids_.end() || !active_[it->second])
                throw Error(ErrorCode::NotFound, "node not found: " + u.node);
            NodeId id = it->second;
            changed.nodes.insert(u.node);
            // Incident edges go in the same update application.
            auto out = forward_[id];
            for (const auto& [r, t] : out) {
                changed.edges.insert({u.node, rel_labels_[r], node_labels_[t]});
                changed.nodes.insert(node_labels_[t]);
                remove_edge_ids(id, r, t);
            }
            auto in = reverse_[id];
            for (const auto& [r, h] : in) {
                changed.edges.insert({node_labels_[h], rel_labels_[r], u.node});
                changed.nodes.insert(node_labels_[h]);
                remove_edge_ids(h, r, id);
            }
            active_[id] = false;
            --active_count_;
            break;
        }
    }
    return changed;
}

std::set<std::string> Graph::reverse_reachable(const std::set<std::string>& targets,
                                               std::size_t hops) const {
    std::set<std::string> result;
    std::vector<bool> seen(node_labels_.size(), false);
    std::deque<std::pair<NodeId, std::size_t>> queue;
    for (const std::string& t : targets) {
        auto it = node_ids_.find(t);
        if (it == node_ids_.end() || !active_[it->second]) continue;
        seen[it->second] = true;
        result.insert(t);
        queue.emplace_back(it->second, 0);
    }
    while (!queue.empty()) {
        auto [id, dist] = queue.front();
        queue.pop_front();
        if (dist >= hops) continue;
        for (const auto& [r, h] : reverse_[id]) {
            (void)r;
            if (seen[h]) continue;
            seen[h] = true;
            result.insert(node_labels_[h]);
            queue.emplace_back(h, dist + 1);
        }
    }
    return result;
}

Graph Graph::edge_union(const Graph& a, const Graph& b) {
    Graph g;
    for (const Graph* src : {&a, &b}) {
        for (const std::string& n : src->node_labels_sorted()) g.add_node(n);
        for (const Triple& t : src->edges_sorted()) g.add_edge(t.head, t.relation, t.tail);
    }
    return g;
}

void Graph::add_inverse_edges(const std::string& suffix) {
    for (const Triple& t : edges_sorted()) add_edge(t.tail, t.relation + suffix, t.head);
}

bool Graph::check_invariants() const {
    for (const auto& [h, r, t] : edges_) {
        if (!active_[h] || !active_[t]) return false;
        const auto& fwd = forward_[h];
        const auto& rev = reverse_[t];
        if (std::find(fwd.begin(), fwd.end(), std::pair<RelId, NodeId>{r, t}) == fwd.end())
            return false;
        if (std::find(rev.begin(), rev.end(), std::pair<RelId, NodeId>{r, h}) == rev.end())
            return false;
    }
    std::size_t fwd_total = 0, rev_total = 0;
    for (NodeId id = 0; id < node_labels_.size(); ++id) {
        fwd_total += forward_[id].size();
        rev_total += reverse_[id].size();
        for (std::size_t i = 1; i < forward_[id].size(); ++i)
            if (adj_pair_less(forward_[id][i], forward_[id][i - 1])) return false;
        for (const auto& [r, t] : forward_[id])
            if (!edges_.count({id, r, t})) return false;
        for (const auto& [r, h] : reverse_[id])
            if (!edges_.count({h, r, id})) return false;
    }
    return fwd_total == edges_.size() && rev_total == edges_.size();
}

bool Graph::operator==(const Graph& other) const {
    return node_labels_sorted() == other.node_labels_sorted() &&
           edges_sorted() == other.edges_sorted();
}

std::vector<GraphUpdate> parse_updates(const std::string& text) {
    std::vector<GraphUpdate> updates;
    std::size_t lineno = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        std::vector<std::string> f = split_record(raw);
        const std::string& kind = f[0];
        if ((kind == "add-edge" || kind == "remove-edge") && f.size() == 4) {
            Triple t{f[1], f[2], f[3]};
            updates.push_back(kind == "add-edge" ? GraphUpdate::add_edge(std::move(t))
                                                 : GraphUpdate::remove_edge(std::move(t)));
        } else if ((kind == "add-node" || kind == "remove-node") && f.size() == 2) {
            updates.push_back(kind == "add-node" ? GraphUpdate::add_node(f[1])
                                                 : GraphUpdate::remove_node(f[1]));
        } else {
            throw ParseError(lineno, "bad update record: " + raw);
        }
    }
    return updates;
}

}  // namespace kgw
