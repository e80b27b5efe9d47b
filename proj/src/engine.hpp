#pragma once

#include <memory>
#include <optional>
#include <string>

#include "answer.hpp"
#include "embedding.hpp"
#include "evaluate.hpp"
#include "graph.hpp"
#include "llm_client.hpp"
#include "retrieve.hpp"
#include "verbalize.hpp"
#include "walks.hpp"

namespace kgw {

// Everything a command invocation needs. Corpus-shaping fields (traversal,
// depth, num_walks, seed, embedder, dimension, undirected) are persisted with
// the artifacts and win over the invocation on update/query/eval; runtime
// fields (k, llm settings, mocks) come from the invocation.
struct RunConfig {
    std::string graph_path;
    std::string traversal = "bfs";
    std::uint32_t depth = 4;
    std::uint32_t num_walks = 60;
    std::uint64_t seed = 0;
    std::uint32_t k = 3;
    std::string embedder = "hashed-bow";
    std::uint32_t dimension = 256;
    std::string llm_endpoint;
    std::string llm_model;
    double llm_timeout_s = 60.0;
    std::string mock_llm;  // "", "echo", "refuse"
    bool undirected = false;
    std::string out_dir;

    void validate(bool require_graph) const;
    WalkConfig walk_config() const;

    std::string to_json() const;
    static RunConfig from_json(const std::string& json_text);
};

struct BuildSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t distinct_walks = 0;
    std::size_t walk_instances = 0;
    std::size_t verbalized = 0;
    double duplicate_ratio = 0.0;  // RW: 1 - distinct/instances
    double elapsed_s = 0.0;
    std::string to_json() const;
};

struct UpdateSummary {
    std::size_t updates_applied = 0;
    std::size_t affected_roots = 0;
    std::size_t roots_regenerated = 0;
    std::size_t roots_removed = 0;
    std::size_t walks_regenerated = 0;
    std::size_t new_verbalizations = 0;
    double elapsed_s = 0.0;
    std::string to_json() const;
};

struct QueryOutput {
    RetrievalResult retrieval;
    Answer answer;
    double elapsed_s = 0.0;
    std::string to_json() const;
};

struct EvalOutput {
    EvalReport report;
    std::vector<EvalRecord> records;
    std::string answers_path;
    std::string records_path;
    std::string report_path;
    std::string report_json() const;
};

// Artifact filenames inside the output directory.
struct ArtifactPaths {
    explicit ArtifactPaths(const std::string& out_dir);
    std::string config_json;
    std::string graph_tsv;
    std::string corpus_tsv;
    std::string verbal_tsv;
    std::string index_bin;
    std::string answers_tsv;
    std::string records_tsv;
    std::string report_json;
    std::string lock;
};

class Engine {
public:
    explicit Engine(RunConfig config);

    BuildSummary build();
    UpdateSummary update(const std::string& updates_path);
    QueryOutput query(const std::string& question);
    EvalOutput evaluate(const std::string& questions_path,
                        std::optional<std::size_t> limit = {});

    const RunConfig& config() const { return config_; }

private:
    struct Artifacts {
        RunConfig stored;
        Graph graph;
        Corpus corpus;
        VerbalizationCache verbal;
        EmbeddingIndex index;
    };

    Graph load_source_graph() const;
    Artifacts load_artifacts() const;
    void write_artifacts(const Graph& g, const Corpus& corpus, const VerbalizationCache& verbal,
                         const EmbeddingIndex& index, const RunConfig& stored) const;
    std::unique_ptr<Embedder> make_embedder(const RunConfig& effective) const;
    std::unique_ptr<LlmClient> make_answer_client() const;
    std::unique_ptr<LlmClient> make_verbalize_client() const;  // null -> template

    void index_root(const std::string& root, const Corpus& corpus,
                    const VerbalizationCache& verbal, Embedder& embedder,
                    EmbeddingIndex& index) const;

    RunConfig config_;
    ArtifactPaths paths_;
};

}  // namespace kgw
