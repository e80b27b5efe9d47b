#include "retrieve.hpp"

#include <algorithm>
#include <map>

#include "error.hpp"

namespace kgw {

std::vector<std::string> RetrievalResult::context_texts() const {
    std::vector<std::string> out;
    out.reserve(walks.size());
    for (const RetrievedWalk& w : walks) out.push_back(w.text);
    return out;
}

RetrievalResult retrieve(const std::string& query_text, const EmbeddingIndex& index,
                         const VerbalizationCache& verbal, Embedder& embedder, std::size_t k) {
    if (k < 1) throw usage_error("k must be >= 1");
    if (index.empty()) throw Error(ErrorCode::NotFound, "embedding index is empty");

    RetrievalResult result;
    result.query_text = query_text;
    result.k = k;

    std::vector<float> q = embedder.embed(query_text);
    result.nodes = index.knn(q, k, VectorKind::Node);

    // Union of per-node top-k walks, deduplicated by key keeping the highest
    // similarity.
    std::map<std::string, RetrievedWalk> best;
    for (const auto& [node_id, node_sim] : result.nodes) {
        (void)node_sim;
        for (const auto& [key, sim] : index.knn_walks_of(node_id, q, k)) {
            auto it = best.find(key);
            if (it != best.end() && it->second.similarity >= sim) continue;
            std::string text;
            if (auto vw = verbal.get(key)) text = vw->text;
            best[key] = RetrievedWalk{key, index.walk_owner(key), sim, std::move(text)};
        }
    }
    result.walks.reserve(best.size());
    for (auto& [key, rw] : best) result.walks.push_back(std::move(rw));
    std::sort(result.walks.begin(), result.walks.end(),
              [](const RetrievedWalk& a, const RetrievedWalk& b) {
                  if (a.similarity != b.similarity) return a.similarity > b.similarity;
                  return a.key < b.key;
              });
    return result;
}

}  // namespace kgw
