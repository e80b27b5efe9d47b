#include "embedding.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace kgw {

std::vector<float> HashedBowEmbedder::embed(const std::string& text) {
    std::vector<double> acc(dimension_, 0.0);
    bool any = false;
    for (const std::string& token : tokenize_alnum(text)) {
        std::uint64_t h = fnv1a64(token);
        double sign = (h >> 63) ? -1.0 : 1.0;
        acc[h % dimension_] += sign;
        any = true;
    }
    std::vector<float> out(dimension_, 0.0f);
    if (!any) return out;
    double norm_sq = 0.0;
    for (double v : acc) norm_sq += v * v;
    if (norm_sq == 0.0) return out;  // tokens cancelled exactly
    double norm = std::sqrt(norm_sq);
    for (std::uint32_t i = 0; i < dimension_; ++i)
        out[i] = static_cast<float>(acc[i] / norm);
    return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string model, double timeout_s)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_s_(timeout_s) {
    if (endpoint_.empty()) throw usage_error("embedding endpoint is empty");
}

std::vector<float> HttpEmbedder::embed(const std::string& text) {
    std::size_t scheme = endpoint_.find("://");
    std::size_t path_start = endpoint_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    std::string base = path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : endpoint_.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client cli(base);
    cli.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
    cli.set_read_timeout(std::chrono::duration<double>(timeout_s_));
    httplib::Headers headers;
    if (const char* key = std::getenv("KGWALK_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body = {{"model", model_}, {"input", text}};
    auto res = cli.Post(prefix + "/v1/embeddings", headers, body.dump(), "application/json");
    if (!res) throw external_error("embedding transport error: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw external_error("embedding endpoint returned HTTP " + std::to_string(res->status));
    try {
        nlohmann::json parsed = nlohmann::json::parse(res->body);
        const auto& arr = parsed.at("data").at(0).at("embedding");
        std::vector<float> out;
        out.reserve(arr.size());
        for (const auto& v : arr) out.push_back(v.get<float>());
        std::uint32_t expected = 0;
        dimension_.compare_exchange_strong(expected, static_cast<std::uint32_t>(out.size()));
        if (out.size() != dimension_.load())
            throw external_error("embedding dimension changed across calls");
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw external_error(std::string("malformed embedding response: ") + e.what());
    }
}

std::vector<float> node_representation(std::vector<std::string> walk_texts, Embedder& e) {
    if (walk_texts.empty()) return std::vector<float>(e.dimension(), 0.0f);
    std::sort(walk_texts.begin(), walk_texts.end());
    std::string joined;
    for (std::size_t i = 0; i < walk_texts.size(); ++i) {
        if (i) joined.push_back('\n');
        joined += walk_texts[i];
    }
    return e.embed(joined);
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::Usage, "cosine dimension mismatch: " + std::to_string(a.size()) +
                                          " vs " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

void EmbeddingIndex::check_dimension(const std::vector<float>& v) const {
    if (v.size() != dimension_)
        throw Error(ErrorCode::Usage,
                    "vector dimension " + std::to_string(v.size()) + " does not match index " +
                        std::to_string(dimension_));
}

void EmbeddingIndex::upsert_node(const std::string& id, std::vector<float> vec) {
    check_dimension(vec);
    node_vectors_[id] = std::move(vec);
}

void EmbeddingIndex::upsert_walk(const std::string& key, const std::string& owner,
                                 std::vector<float> vec) {
    check_dimension(vec);
    if (!node_vectors_.count(owner))
        throw Error(ErrorCode::Usage, "walk owner has no node vector: " + owner);
    auto it = walk_vectors_.find(key);
    if (it != walk_vectors_.end() && it->second.owner != owner)
        owner_walks_[it->second.owner].erase(key);
    walk_vectors_[key] = {std::move(vec), owner};
    owner_walks_[owner].insert(key);
}

void EmbeddingIndex::remove(const std::string& id) {
    auto nit = node_vectors_.find(id);
    if (nit != node_vectors_.end()) {
        auto oit = owner_walks_.find(id);
        if (oit != owner_walks_.end()) {
            for (const std::string& key : oit->second) walk_vectors_.erase(key);
            owner_walks_.erase(oit);
        }
        node_vectors_.erase(nit);
        return;
    }
    auto wit = walk_vectors_.find(id);
    if (wit == walk_vectors_.end())
        throw Error(ErrorCode::NotFound, "index entry not found: " + id);
    auto oit = owner_walks_.find(wit->second.owner);
    if (oit != owner_walks_.end()) {
        oit->second.erase(id);
        if (oit->second.empty()) owner_walks_.erase(oit);
    }
    walk_vectors_.erase(wit);
}

const std::vector<float>* EmbeddingIndex::node_vector(const std::string& id) const {
    auto it = node_vectors_.find(id);
    return it == node_vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> EmbeddingIndex::walks_of(const std::string& owner) const {
    auto it = owner_walks_.find(owner);
    if (it == owner_walks_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

const std::string& EmbeddingIndex::walk_owner(const std::string& key) const {
    auto it = walk_vectors_.find(key);
    if (it == walk_vectors_.end()) throw Error(ErrorCode::NotFound, "walk key not found: " + key);
    return it->second.owner;
}

namespace {

// Descending similarity, ascending id on ties.
struct Scored {
    double sim;
    const std::string* id;
};

std::vector<std::pair<std::string, double>> top_k(std::vector<Scored>& scored, std::size_t k) {
    auto less = [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return *a.id < *b.id;
    };
    std::size_t keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), less);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.emplace_back(*scored[i].id, scored[i].sim);
    return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> EmbeddingIndex::knn(const std::vector<float>& query,
                                                                std::size_t k,
                                                                VectorKind kind) const {
    if (k < 1) throw usage_error("k must be >= 1");
    check_dimension(query);
    std::vector<Scored> scored;
    if (kind == VectorKind::Node) {
        scored.reserve(node_vectors_.size());
        for (const auto& [id, vec] : node_vectors_) scored.push_back({cosine(query, vec), &id});
    } else {
        scored.reserve(walk_vectors_.size());
        for (const auto& [id, entry] : walk_vectors_)
            scored.push_back({cosine(query, entry.vec), &id});
    }
    return top_k(scored, k);
}

std::vector<std::pair<std::string, double>> EmbeddingIndex::knn_walks_of(
    const std::string& owner, const std::vector<float>& query, std::size_t k) const {
    if (k < 1) throw usage_error("k must be >= 1");
    check_dimension(query);
    auto it = owner_walks_.find(owner);
    if (it == owner_walks_.end()) return {};
    std::vector<Scored> scored;
    scored.reserve(it->second.size());
    for (const std::string& key : it->second)
        scored.push_back({cosine(query, walk_vectors_.at(key).vec), &key});
    return top_k(scored, k);
}

// --- persistence ---

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw ParseError(0, "truncated index file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 4;
    return v;
}

void put_string(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

std::string get_string(const std::string& in, std::size_t& pos) {
    std::uint32_t len = get_u32(in, pos);
    if (pos + len > in.size()) throw ParseError(0, "truncated index file");
    std::string s = in.substr(pos, len);
    pos += len;
    return s;
}

void put_vector(std::string& out, const std::vector<float>& v) {
    for (float f : v) {
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
}

std::vector<float> get_vector(const std::string& in, std::size_t& pos, std::uint32_t dim) {
    std::vector<float> v(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
        std::uint32_t bits = get_u32(in, pos);
        std::memcpy(&v[i], &bits, 4);
    }
    return v;
}

}  // namespace

std::string EmbeddingIndex::serialize() const {
    std::string out = "#index\tv1\t" + std::to_string(dimension_) + '\t' +
                      escape_field(embedder_id_) + '\t' + std::to_string(node_vectors_.size()) +
                      '\t' + std::to_string(walk_vectors_.size()) + '\n';
    for (const auto& [id, vec] : node_vectors_) {
        put_string(out, id);
        put_vector(out, vec);
    }
    for (const auto& [key, entry] : walk_vectors_) {
        put_string(out, key);
        put_string(out, entry.owner);
        put_vector(out, entry.vec);
    }
    return out;
}

EmbeddingIndex EmbeddingIndex::deserialize(const std::string& bytes) {
    std::size_t header_end = bytes.find('\n');
    if (header_end == std::string::npos) throw ParseError(1, "missing index header");
    std::vector<std::string> h = split(bytes.substr(0, header_end), '\t');
    if (h.size() != 6 || h[0] != "#index" || h[1] != "v1") throw ParseError(1, "bad index header");
    std::uint32_t dim = 0;
    std::size_t node_count = 0, walk_count = 0;
    try {
        dim = static_cast<std::uint32_t>(std::stoul(h[2]));
        node_count = std::stoul(h[4]);
        walk_count = std::stoul(h[5]);
    } catch (const std::logic_error&) {
        throw ParseError(1, "bad index header");
    }
    EmbeddingIndex idx(dim, unescape_field(h[3]));
    std::size_t pos = header_end + 1;
    for (std::size_t i = 0; i < node_count; ++i) {
        std::string id = get_string(bytes, pos);
        idx.node_vectors_[id] = get_vector(bytes, pos, idx.dimension_);
    }
    for (std::size_t i = 0; i < walk_count; ++i) {
        std::string key = get_string(bytes, pos);
        std::string owner = get_string(bytes, pos);
        idx.walk_vectors_[key] = {get_vector(bytes, pos, idx.dimension_), owner};
        idx.owner_walks_[owner].insert(key);
    }
    if (pos != bytes.size()) throw ParseError(0, "trailing bytes in index file");
    return idx;
}

bool EmbeddingIndex::operator==(const EmbeddingIndex& other) const {
    return dimension_ == other.dimension_ && embedder_id_ == other.embedder_id_ &&
           node_vectors_ == other.node_vectors_ && walk_vectors_ == other.walk_vectors_;
}

}  // namespace kgw
