#pragma once

#include <string>
#include <vector>

#include "embedding.hpp"
#include "verbalize.hpp"

namespace kgw {

struct RetrievedWalk {
    std::string key;
    std::string owner;
    double similarity;
    std::string text;

    bool operator==(const RetrievedWalk&) const = default;
};

struct RetrievalResult {
    std::string query_text;
    std::vector<std::pair<std::string, double>> nodes;  // top-k nodes, descending
    std::vector<RetrievedWalk> walks;                   // deduplicated context set
    std::size_t k = 0;

    std::vector<std::string> context_texts() const;
};

// Embeds the query, takes the k most similar nodes, then per node the k most
// similar owned walks; the union is deduplicated by walk key (keeping the
// max similarity) and ordered by similarity descending, key ascending.
RetrievalResult retrieve(const std::string& query_text, const EmbeddingIndex& index,
                         const VerbalizationCache& verbal, Embedder& embedder, std::size_t k);

}  // namespace kgw
