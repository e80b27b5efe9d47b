#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "embedding.hpp"
#include "error.hpp"
#include "util.hpp"

using namespace kgw;

namespace {

std::vector<float> unit2(float x, float y) { return {x, y}; }

double norm_of(const std::vector<float>& v) {
    double s = 0;
    for (float f : v) s += static_cast<double>(f) * f;
    return std::sqrt(s);
}

// Full-scan reference for knn: score everything, sort by (-sim, id).
std::vector<std::pair<std::string, double>> scan_oracle(
    const std::vector<std::pair<std::string, std::vector<float>>>& entries,
    const std::vector<float>& query, std::size_t k) {
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& [id, vec] : entries) scored.emplace_back(id, cosine(query, vec));
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace

TEST_CASE("hashed bow embeds empty text to the zero vector") {
    HashedBowEmbedder e(64);
    std::vector<float> v = e.embed("");
    CHECK(v.size() == 64);
    CHECK(norm_of(v) == 0.0);
}

TEST_CASE("hashed bow is scale-invariant under cosine") {
    HashedBowEmbedder e;
    CHECK(cosine(e.embed("abc abc"), e.embed("abc")) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hashed bow is deterministic across instances") {
    HashedBowEmbedder a, b;
    CHECK(a.embed("some text with Tokens 123") == b.embed("some text with Tokens 123"));
}

TEST_CASE("hashed bow outputs unit vectors for non-empty text") {
    HashedBowEmbedder e;
    for (const char* text : {"a", "a b c", "The quick brown fox", "x y x y z"}) {
        double n = norm_of(e.embed(text));
        CHECK(n > 1.0 - 1e-6);
        CHECK(n < 1.0 + 1e-6);
    }
}

TEST_CASE("cosine closed forms") {
    CHECK(cosine(unit2(1, 0), unit2(1, 0)) == doctest::Approx(1.0));
    CHECK(cosine(unit2(1, 0), unit2(0, 1)) == doctest::Approx(0.0));
    CHECK(cosine(unit2(1, 1), unit2(1, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(cosine(unit2(0, 0), unit2(1, 0)) == 0.0);
    CHECK_THROWS_AS(cosine(unit2(1, 0), {1.0f, 0.0f, 0.0f}), Error);
}

TEST_CASE("node representation ignores input order and embeds joined text") {
    HashedBowEmbedder e;
    std::vector<std::string> texts{"b sentence.", "a sentence."};
    std::vector<float> rep = node_representation(texts, e);
    std::vector<std::string> flipped{"a sentence.", "b sentence."};
    CHECK(rep == node_representation(flipped, e));
    CHECK(rep == e.embed("a sentence.\nb sentence."));
    CHECK(norm_of(node_representation({}, e)) == 0.0);
}

TEST_CASE("single-walk node representation equals that walk's embedding") {
    HashedBowEmbedder e;
    CHECK(node_representation({"only walk."}, e) == e.embed("only walk."));
}

TEST_CASE("index upsert then remove restores the original") {
    EmbeddingIndex idx(2, "test");
    idx.upsert_node("a", unit2(1, 0));
    EmbeddingIndex before = idx;
    idx.upsert_node("b", unit2(0, 1));
    idx.upsert_walk("w1", "b", unit2(1, 1));
    idx.remove("b");
    CHECK(idx == before);
}

TEST_CASE("index upserts are idempotent") {
    EmbeddingIndex idx(2, "test");
    idx.upsert_node("a", unit2(1, 0));
    idx.upsert_node("a", unit2(1, 0));
    CHECK(idx.node_count() == 1);
}

TEST_CASE("removing a node cascades to its owned walks") {
    EmbeddingIndex idx(2, "test");
    idx.upsert_node("a", unit2(1, 0));
    idx.upsert_node("b", unit2(0, 1));
    for (int i = 0; i < 3; ++i)
        idx.upsert_walk("aw" + std::to_string(i), "a", unit2(1, 1));
    idx.upsert_walk("bw", "b", unit2(1, 1));
    CHECK(idx.walk_count() == 4);
    idx.remove("a");
    CHECK(idx.walk_count() == 1);  // shrinks by the 3 owned walks
    CHECK(idx.node_count() == 1);
}

TEST_CASE("removing an unknown id is a not-found error") {
    EmbeddingIndex idx(2, "test");
    CHECK_THROWS_AS(idx.remove("ghost"), Error);
}

TEST_CASE("walk upsert requires an owner vector") {
    EmbeddingIndex idx(2, "test");
    CHECK_THROWS_AS(idx.upsert_walk("w", "nobody", unit2(1, 0)), Error);
}

TEST_CASE("knn finds the matching orthogonal vector") {
    EmbeddingIndex idx(2, "test");
    idx.upsert_node("x", unit2(1, 0));
    idx.upsert_node("y", unit2(0, 1));
    auto out = idx.knn(unit2(1, 0), 1, VectorKind::Node);
    REQUIRE(out.size() == 1);
    CHECK(out[0].first == "x");
    CHECK(out[0].second == doctest::Approx(1.0));
}

TEST_CASE("knn ties resolve to lexicographically smallest ids") {
    EmbeddingIndex idx(2, "test");
    for (const char* id : {"delta", "alpha", "charlie", "bravo"})
        idx.upsert_node(id, unit2(1, 0));
    auto out = idx.knn(unit2(1, 0), 2, VectorKind::Node);
    REQUIRE(out.size() == 2);
    CHECK(out[0].first == "alpha");
    CHECK(out[1].first == "bravo");
}

TEST_CASE("knn returns fewer than k when the index is small") {
    EmbeddingIndex idx(2, "test");
    idx.upsert_node("only", unit2(1, 0));
    CHECK(idx.knn(unit2(1, 0), 5, VectorKind::Node).size() == 1);
}

TEST_CASE("knn equals the full-scan oracle on random indices") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        SplitMix64 rng(seed);
        std::size_t dim = 4;
        EmbeddingIndex idx(static_cast<std::uint32_t>(dim), "test");
        std::vector<std::pair<std::string, std::vector<float>>> entries;
        std::size_t count = 1 + rng.bounded(50);
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<float> v(dim);
            // Small integer coordinates make exact ties common, which is
            // what the tie rule needs exercised against.
            for (auto& f : v) f = static_cast<float>(static_cast<int>(rng.bounded(5)) - 2);
            std::string id = "e" + std::to_string(i);
            idx.upsert_node(id, v);
            entries.emplace_back(id, v);
        }
        std::vector<float> q(dim);
        for (auto& f : q) f = static_cast<float>(static_cast<int>(rng.bounded(5)) - 2);
        for (std::size_t k : {1ul, 3ul, count, count + 5}) {
            CHECK(idx.knn(q, k, VectorKind::Node) == scan_oracle(entries, q, k));
        }
    }
}

TEST_CASE("knn with k = index size gives a total order consistent with cosine") {
    SplitMix64 rng(7);
    EmbeddingIndex idx(3, "test");
    std::vector<std::pair<std::string, std::vector<float>>> entries;
    for (int i = 0; i < 30; ++i) {
        std::vector<float> v{static_cast<float>(rng.bounded(7)),
                             static_cast<float>(rng.bounded(7)),
                             static_cast<float>(rng.bounded(7))};
        idx.upsert_node("n" + std::to_string(i), v);
        entries.emplace_back("n" + std::to_string(i), v);
    }
    std::vector<float> q{1.0f, 2.0f, 0.5f};
    auto order = idx.knn(q, entries.size(), VectorKind::Node);
    REQUIRE(order.size() == entries.size());
    for (std::size_t i = 1; i < order.size(); ++i) {
        CHECK(order[i - 1].second >= order[i].second);
        if (order[i - 1].second == order[i].second)
            CHECK(order[i - 1].first < order[i].first);
    }
}

TEST_CASE("upsert/remove sequences commute with rebuilding from survivors") {
    for (std::uint64_t seed = 60; seed < 75; ++seed) {
        SplitMix64 rng(seed);
        EmbeddingIndex idx(2, "test");
        std::map<std::string, std::vector<float>> nodes;
        std::map<std::string, std::pair<std::vector<float>, std::string>> walks;
        for (int step = 0; step < 40; ++step) {
            std::string node = "n" + std::to_string(rng.bounded(6));
            switch (rng.bounded(3)) {
                case 0: {
                    std::vector<float> v{static_cast<float>(rng.bounded(4)),
                                         static_cast<float>(rng.bounded(4))};
                    idx.upsert_node(node, v);
                    nodes[node] = v;
                    break;
                }
                case 1: {
                    if (!nodes.count(node)) break;
                    std::string key = node + "/w" + std::to_string(rng.bounded(3));
                    std::vector<float> v{static_cast<float>(rng.bounded(4)),
                                         static_cast<float>(rng.bounded(4))};
                    idx.upsert_walk(key, node, v);
                    walks[key] = {v, node};
                    break;
                }
                default: {
                    if (!nodes.count(node)) break;
                    idx.remove(node);
                    nodes.erase(node);
                    for (auto it = walks.begin(); it != walks.end();)
                        it = it->second.second == node ? walks.erase(it) : std::next(it);
                    break;
                }
            }
        }
        EmbeddingIndex rebuilt(2, "test");
        for (const auto& [id, v] : nodes) rebuilt.upsert_node(id, v);
        for (const auto& [key, entry] : walks)
            rebuilt.upsert_walk(key, entry.second, entry.first);
        CHECK(idx == rebuilt);
        std::vector<float> q{1.0f, 0.5f};
        CHECK(idx.knn(q, 5, VectorKind::Node) == rebuilt.knn(q, 5, VectorKind::Node));
        CHECK(idx.knn(q, 5, VectorKind::Walk) == rebuilt.knn(q, 5, VectorKind::Walk));
    }
}

TEST_CASE("index serialization round-trips bit-exactly") {
    HashedBowEmbedder e(16);
    EmbeddingIndex idx(16, e.id());
    idx.upsert_node("node one", e.embed("walk text one."));
    idx.upsert_node("node\ttwo", e.embed("walk text two."));
    idx.upsert_walk("node one\tr\tx", "node one", e.embed("walk text one."));
    std::string bytes = idx.serialize();
    EmbeddingIndex back = EmbeddingIndex::deserialize(bytes);
    CHECK(back == idx);
    CHECK(back.serialize() == bytes);
    CHECK(back.walk_owner("node one\tr\tx") == "node one");
}

TEST_CASE("dimension mismatches are rejected") {
    EmbeddingIndex idx(3, "test");
    CHECK_THROWS_AS(idx.upsert_node("a", unit2(1, 0)), Error);
    idx.upsert_node("a", {1.0f, 0.0f, 0.0f});
    CHECK_THROWS_AS((void)idx.knn(unit2(1, 0), 1, VectorKind::Node), Error);
}
