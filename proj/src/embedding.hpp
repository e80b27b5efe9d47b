#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace kgw {

// Text to fixed-dimension vector. Conforming implementations are
// deterministic (same text, same vector) and safe for concurrent callers.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::vector<float> embed(const std::string& text) = 0;
    virtual std::string id() const = 0;
    virtual std::uint32_t dimension() const = 0;
};

// Deterministic offline embedder: signed hashed bag of words over lowercase
// alphanumeric tokens, L2-normalized. Keeps the full pipeline and its tests
// independent of any model service.
class HashedBowEmbedder : public Embedder {
public:
    explicit HashedBowEmbedder(std::uint32_t dimension = 256) : dimension_(dimension) {}

    std::vector<float> embed(const std::string& text) override;
    std::string id() const override { return "hashed-bow-" + std::to_string(dimension_); }
    std::uint32_t dimension() const override { return dimension_; }

private:
    std::uint32_t dimension_;
};

// OpenAI-style /v1/embeddings endpoint. Dimension is fixed by the first
// response.
class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(std::string endpoint, std::string model, double timeout_s);

    std::vector<float> embed(const std::string& text) override;
    std::string id() const override { return "remote-" + model_; }
    std::uint32_t dimension() const override { return dimension_.load(); }

private:
    std::string endpoint_;
    std::string model_;
    double timeout_s_;
    std::atomic<std::uint32_t> dimension_{0};
};

// dot(a,b)/(|a||b|); 0 when either norm is 0. Throws on dimension mismatch.
double cosine(const std::vector<float>& a, const std::vector<float>& b);

// Global node representation: the node's verbalized walk texts sorted
// lexicographically, joined by single newlines, embedded once. An empty list
// (isolated node) yields the zero vector, so such nodes never outrank a
// match.
std::vector<float> node_representation(std::vector<std::string> walk_texts, Embedder& e);

enum class VectorKind { Node, Walk };

// Exact-cosine kNN store over node and walk vectors. Walk vectors carry an
// owning node; removing a node removes its owned walks. Ties break by
// ascending lexicographic id, which makes retrieval deterministic.
class EmbeddingIndex {
public:
    EmbeddingIndex() = default;
    EmbeddingIndex(std::uint32_t dimension, std::string embedder_id)
        : dimension_(dimension), embedder_id_(std::move(embedder_id)) {}

    std::uint32_t dimension() const { return dimension_; }
    const std::string& embedder_id() const { return embedder_id_; }
    std::size_t node_count() const { return node_vectors_.size(); }
    std::size_t walk_count() const { return walk_vectors_.size(); }
    bool empty() const { return node_vectors_.empty() && walk_vectors_.empty(); }

    // Idempotent upserts; vectors must match the index dimension.
    void upsert_node(const std::string& id, std::vector<float> vec);
    // The owner must already have a node vector.
    void upsert_walk(const std::string& key, const std::string& owner, std::vector<float> vec);

    // Removes a node id (cascading to its owned walks) or a walk key.
    void remove(const std::string& id);

    bool has_node(const std::string& id) const { return node_vectors_.count(id) > 0; }
    const std::vector<float>* node_vector(const std::string& id) const;

    // Walk keys owned by a node, ascending.
    std::vector<std::string> walks_of(const std::string& owner) const;

    // Exact top-k by cosine, descending, ties by ascending id. Returns fewer
    // than k only when the index holds fewer entries of that kind.
    std::vector<std::pair<std::string, double>> knn(const std::vector<float>& query,
                                                    std::size_t k, VectorKind kind) const;

    // Same rule restricted to one node's owned walks.
    std::vector<std::pair<std::string, double>> knn_walks_of(const std::string& owner,
                                                             const std::vector<float>& query,
                                                             std::size_t k) const;

    const std::string& walk_owner(const std::string& key) const;

    // Binary format: text header (dimension, embedder id, counts) followed by
    // length-prefixed ids and little-endian float32 records. Bit-exact
    // round-trip.
    std::string serialize() const;
    static EmbeddingIndex deserialize(const std::string& bytes);

    bool operator==(const EmbeddingIndex& other) const;

private:
    struct WalkEntry {
        std::vector<float> vec;
        std::string owner;
        bool operator==(const WalkEntry&) const = default;
    };

    void check_dimension(const std::vector<float>& v) const;

    std::uint32_t dimension_ = 0;
    std::string embedder_id_;
    std::map<std::string, std::vector<float>> node_vectors_;
    std::map<std::string, WalkEntry> walk_vectors_;
    std::map<std::string, std::set<std::string>> owner_walks_;
};

}  // namespace kgw
