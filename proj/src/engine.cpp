#include "engine.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace fs = std::filesystem;

namespace kgw {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Exclusive per-directory lock; prevents concurrent commands against the
// same artifact set.
class DirLock {
public:
    explicit DirLock(const std::string& path) : path_(path) {
        std::error_code ec;
        fs::create_directories(fs::path(path).parent_path(), ec);
        if (fs::exists(path_))
            throw Error(ErrorCode::Conflict,
                        "artifact directory is locked by another command; remove " + path_ +
                            " if that command crashed");
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw Error(ErrorCode::Internal, "cannot create lock file: " + path_);
        out << "locked\n";
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::string path_;
};

nlohmann::json config_to_json_obj(const RunConfig& c) {
    return {
        {"graph", c.graph_path},
        {"traversal", c.traversal},
        {"depth", c.depth},
        {"num_walks", c.num_walks},
        {"seed", c.seed},
        {"k", c.k},
        {"embedder", c.embedder},
        {"dimension", c.dimension},
        {"llm_endpoint", c.llm_endpoint},
        {"llm_model", c.llm_model},
        {"llm_timeout_s", c.llm_timeout_s},
        {"mock_llm", c.mock_llm},
        {"undirected", c.undirected},
        {"out", c.out_dir},
    };
}

}  // namespace

void RunConfig::validate(bool require_graph) const {
    if (out_dir.empty()) throw usage_error("output directory is required");
    if (require_graph && graph_path.empty()) throw usage_error("graph path is required");
    traversal_from_name(traversal);
    walk_config().validate();
    if (k < 1) throw usage_error("k must be >= 1");
    if (dimension < 1) throw usage_error("dimension must be >= 1");
    if (embedder != "hashed-bow" && embedder != "remote")
        throw usage_error("unknown embedder: " + embedder + " (expected hashed-bow or remote)");
    if (embedder == "remote" && llm_endpoint.empty())
        throw usage_error("remote embedder requires an llm endpoint");
    if (!mock_llm.empty() && mock_llm != "echo" && mock_llm != "refuse")
        throw usage_error("unknown mock llm: " + mock_llm);
    if (llm_timeout_s <= 0) throw usage_error("llm timeout must be positive");
}

WalkConfig RunConfig::walk_config() const {
    return {traversal_from_name(traversal), depth, num_walks, seed};
}

std::string RunConfig::to_json() const { return config_to_json_obj(*this).dump(2) + "\n"; }

RunConfig RunConfig::from_json(const std::string& json_text) {
    RunConfig c;
    try {
        nlohmann::json j = nlohmann::json::parse(json_text);
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("graph", c.graph_path);
        get("traversal", c.traversal);
        get("depth", c.depth);
        get("num_walks", c.num_walks);
        get("seed", c.seed);
        get("k", c.k);
        get("embedder", c.embedder);
        get("dimension", c.dimension);
        get("llm_endpoint", c.llm_endpoint);
        get("llm_model", c.llm_model);
        get("llm_timeout_s", c.llm_timeout_s);
        get("mock_llm", c.mock_llm);
        get("undirected", c.undirected);
        get("out", c.out_dir);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("bad config json: ") + e.what());
    }
    return c;
}

std::string BuildSummary::to_json() const {
    nlohmann::json j = {{"nodes", nodes},
                        {"edges", edges},
                        {"distinct_walks", distinct_walks},
                        {"walk_instances", walk_instances},
                        {"verbalized", verbalized},
                        {"duplicate_ratio", duplicate_ratio},
                        {"elapsed_s", elapsed_s}};
    return j.dump();
}

std::string UpdateSummary::to_json() const {
    nlohmann::json j = {{"updates_applied", updates_applied},
                        {"affected_roots", affected_roots},
                        {"roots_regenerated", roots_regenerated},
                        {"roots_removed", roots_removed},
                        {"walks_regenerated", walks_regenerated},
                        {"new_verbalizations", new_verbalizations},
                        {"elapsed_s", elapsed_s}};
    return j.dump();
}

std::string QueryOutput::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [id, sim] : retrieval.nodes) nodes.push_back({{"id", id}, {"sim", sim}});
    nlohmann::json walks = nlohmann::json::array();
    for (const RetrievedWalk& w : retrieval.walks)
        walks.push_back({{"key", w.key}, {"owner", w.owner}, {"sim", w.similarity}, {"text", w.text}});
    nlohmann::json j = {{"question", answer.question},
                        {"answer", answer.response_text},
                        {"abstained", answer.abstained},
                        {"model", answer.llm_model},
                        {"k", retrieval.k},
                        {"nodes", nodes},
                        {"walks", walks},
                        {"elapsed_s", elapsed_s}};
    return j.dump();
}

namespace {

nlohmann::json bucket_json(const EvalReport::Bucket& b) {
    return {{"n", b.total},
            {"accurate", b.accurate},
            {"hallucinated", b.hallucinated},
            {"missing", b.missing},
            {"hits", b.hits},
            {"hits_at_1", b.hits_at_1()},
            {"accuracy", b.accuracy()},
            {"hallucination", b.hallucination()},
            {"missing_rate", b.missing_rate()},
            {"truthfulness", b.truthfulness()}};
}

}  // namespace

std::string EvalOutput::report_json() const {
    nlohmann::json per_hop = nlohmann::json::object();
    for (const auto& [hop, bucket] : report.per_hop)
        per_hop[hop ? std::to_string(hop) + "-hop" : "untagged"] = bucket_json(bucket);
    nlohmann::json j = {{"overall", bucket_json(report.overall)},
                        {"per_hop", per_hop},
                        {"latency_mean_s", report.latency_mean_s},
                        {"latency_median_s", report.latency_median_s}};
    return j.dump(2) + "\n";
}

ArtifactPaths::ArtifactPaths(const std::string& out_dir) {
    fs::path base(out_dir);
    config_json = (base / "config.json").string();
    graph_tsv = (base / "graph.tsv").string();
    corpus_tsv = (base / "corpus.tsv").string();
    verbal_tsv = (base / "verbal.tsv").string();
    index_bin = (base / "index.bin").string();
    answers_tsv = (base / "answers.tsv").string();
    records_tsv = (base / "records.tsv").string();
    report_json = (base / "report.json").string();
    lock = (base / ".lock").string();
}

Engine::Engine(RunConfig config) : config_(std::move(config)), paths_(config_.out_dir) {}

Graph Engine::load_source_graph() const {
    std::string text = read_file(config_.graph_path);
    Graph g = config_.graph_path.ends_with(".nt") ? Graph::parse_ntriples(text)
                                                  : Graph::parse_tsv(text);
    if (config_.undirected) g.add_inverse_edges();
    return g;
}

std::unique_ptr<Embedder> Engine::make_embedder(const RunConfig& effective) const {
    if (effective.embedder == "remote") {
        // The embedding space is artifact-bound: the stored model wins, the
        // endpoint may be overridden per invocation.
        std::string endpoint =
            !config_.llm_endpoint.empty() ? config_.llm_endpoint : effective.llm_endpoint;
        return std::make_unique<HttpEmbedder>(endpoint, effective.llm_model,
                                              config_.llm_timeout_s);
    }
    return std::make_unique<HashedBowEmbedder>(effective.dimension);
}

std::unique_ptr<LlmClient> Engine::make_answer_client() const {
    if (!config_.mock_llm.empty()) return make_mock_client(config_.mock_llm);
    if (!config_.llm_endpoint.empty())
        return std::make_unique<HttpChatClient>(config_.llm_endpoint, config_.llm_model,
                                                config_.llm_timeout_s);
    throw usage_error("no llm configured: pass --llm-endpoint or --mock-llm");
}

std::unique_ptr<LlmClient> Engine::make_verbalize_client() const {
    // Mocks never verbalize; the template path is the offline default.
    if (config_.llm_endpoint.empty() || !config_.mock_llm.empty()) return nullptr;
    return std::make_unique<HttpChatClient>(config_.llm_endpoint, config_.llm_model,
                                            config_.llm_timeout_s);
}

void Engine::index_root(const std::string& root, const Corpus& corpus,
                        const VerbalizationCache& verbal, Embedder& embedder,
                        EmbeddingIndex& index) const {
    auto it = corpus.walks.find(root);
    if (it == corpus.walks.end()) throw Error(ErrorCode::Internal, "root missing from corpus");
    std::vector<std::string> texts;
    std::vector<std::pair<std::string, std::string>> keyed_texts;  // (key, text)
    for (const Walk& w : it->second) {
        if (w.steps.empty()) continue;
        std::string key = walk_key(w);
        auto vw = verbal.get(key);
        if (!vw) throw Error(ErrorCode::Internal, "walk not verbalized: " + key);
        texts.push_back(vw->text);
        keyed_texts.emplace_back(std::move(key), vw->text);
    }
    index.upsert_node(root, node_representation(std::move(texts), embedder));
    for (const auto& [key, text] : keyed_texts)
        index.upsert_walk(key, root, embedder.embed(text));
}

void Engine::write_artifacts(const Graph& g, const Corpus& corpus,
                             const VerbalizationCache& verbal, const EmbeddingIndex& index,
                             const RunConfig& stored) const {
    write_file_atomic(paths_.graph_tsv, g.to_tsv());
    write_file_atomic(paths_.corpus_tsv, corpus.serialize());
    write_file_atomic(paths_.verbal_tsv, verbal.serialize());
    write_file_atomic(paths_.index_bin, index.serialize());
    write_file_atomic(paths_.config_json, stored.to_json());
}

BuildSummary Engine::build() {
    config_.validate(/*require_graph=*/true);
    auto start = Clock::now();
    fs::create_directories(config_.out_dir);
    DirLock lock(paths_.lock);

    Graph g = load_source_graph();
    if (g.node_count() == 0)
        throw Error(ErrorCode::Parse, "graph " + config_.graph_path + " has no nodes");
    Corpus corpus = generate_corpus(g, config_.walk_config());

    VerbalizationCache verbal;
    auto client = make_verbalize_client();
    std::size_t verbalized = verbalize_corpus(corpus, client.get(), verbal);

    auto embedder = make_embedder(config_);
    EmbeddingIndex index(embedder->dimension(), embedder->id());
    for (const auto& [root, list] : corpus.walks)
        index_root(root, corpus, verbal, *embedder, index);

    write_artifacts(g, corpus, verbal, index, config_);

    BuildSummary s;
    s.nodes = g.node_count();
    s.edges = g.edge_count();
    s.distinct_walks = corpus.distinct_walk_count();
    s.walk_instances = corpus.instance_count();
    s.verbalized = verbalized;
    s.duplicate_ratio =
        s.walk_instances ? 1.0 - double(s.distinct_walks) / double(s.walk_instances) : 0.0;
    s.elapsed_s = seconds_since(start);
    return s;
}

Engine::Artifacts Engine::load_artifacts() const {
    for (const std::string* path :
         {&paths_.config_json, &paths_.graph_tsv, &paths_.corpus_tsv, &paths_.verbal_tsv,
          &paths_.index_bin})
        if (!fs::exists(*path))
            throw Error(ErrorCode::NotFound, "missing artifact " + *path + "; run build first");

    Artifacts a;
    a.stored = RunConfig::from_json(read_file(paths_.config_json));
    std::string graph_text = read_file(paths_.graph_tsv);
    a.graph = graph_text.empty() ? Graph() : Graph::parse_tsv(graph_text);
    a.corpus = Corpus::deserialize(read_file(paths_.corpus_tsv));
    // graph.tsv carries edges only; isolated nodes live in the corpus roots.
    for (const auto& [root, list] : a.corpus.walks) a.graph.add_node(root);
    a.verbal = VerbalizationCache::deserialize(read_file(paths_.verbal_tsv));
    a.index = EmbeddingIndex::deserialize(read_file(paths_.index_bin));

    if (a.corpus.graph_fingerprint != a.graph.fingerprint())
        throw Error(ErrorCode::Stale,
                    "artifacts are inconsistent (corpus fingerprint mismatch); run build again");
    return a;
}

UpdateSummary Engine::update(const std::string& updates_path) {
    config_.validate(/*require_graph=*/false);
    auto start = Clock::now();
    DirLock lock(paths_.lock);
    Artifacts a = load_artifacts();

    std::vector<GraphUpdate> updates = parse_updates(read_file(updates_path));
    if (a.stored.undirected) {
        // Mirror edge updates the same way build mirrored the base edges.
        std::vector<GraphUpdate> augmented;
        augmented.reserve(updates.size() * 2);
        for (const GraphUpdate& u : updates) {
            augmented.push_back(u);
            if (u.kind == UpdateKind::AddEdge || u.kind == UpdateKind::RemoveEdge)
                augmented.push_back({u.kind,
                                     Triple{u.edge.tail, u.edge.relation + "_inv", u.edge.head},
                                     {}});
        }
        updates = std::move(augmented);
    }

    Graph g_after = a.graph;
    ChangeSet changed;
    for (const GraphUpdate& u : updates) changed.merge(g_after.apply_update(u));

    std::set<std::string> affected = affected_roots(a.graph, g_after, a.corpus, changed);
    Corpus corpus = incremental_update(a.graph, g_after, a.corpus, changed);

    UpdateSummary s;
    s.updates_applied = updates.size();
    s.affected_roots = affected.size();
    for (const std::string& root : affected) {
        if (g_after.has_node(root)) {
            ++s.roots_regenerated;
            s.walks_regenerated += corpus.walks.at(root).size();
        } else {
            ++s.roots_removed;
        }
    }

    VerbalizationCache verbal = a.verbal;
    if (!corpus.walks.empty()) {
        auto client = make_verbalize_client();
        s.new_verbalizations = verbalize_corpus(corpus, client.get(), verbal);
    }
    // Keep the cache aligned with the corpus so incremental and full builds
    // produce identical artifacts.
    std::set<std::string> live_keys;
    for (const auto& [root, list] : corpus.walks)
        for (const Walk& w : list)
            if (!w.steps.empty()) live_keys.insert(walk_key(w));
    verbal.retain(live_keys);

    auto embedder = make_embedder(a.stored);
    EmbeddingIndex index = a.index;
    for (const std::string& root : affected)
        if (index.has_node(root)) index.remove(root);
    for (const std::string& root : affected)
        if (g_after.has_node(root)) index_root(root, corpus, verbal, *embedder, index);

    write_artifacts(g_after, corpus, verbal, index, a.stored);
    s.elapsed_s = seconds_since(start);
    return s;
}

QueryOutput Engine::query(const std::string& question) {
    config_.validate(/*require_graph=*/false);
    DirLock lock(paths_.lock);
    Artifacts a = load_artifacts();
    auto embedder = make_embedder(a.stored);
    if (a.index.embedder_id() != embedder->id())
        throw Error(ErrorCode::Stale, "index was built with embedder " + a.index.embedder_id() +
                                          "; rebuild or switch embedders");
    auto client = make_answer_client();

    auto start = Clock::now();
    QueryOutput out;
    out.retrieval = retrieve(question, a.index, a.verbal, *embedder, config_.k);
    out.answer = answer_with_context(question, out.retrieval, *client);
    out.elapsed_s = seconds_since(start);
    return out;
}

EvalOutput Engine::evaluate(const std::string& questions_path,
                            std::optional<std::size_t> limit) {
    config_.validate(/*require_graph=*/false);
    DirLock lock(paths_.lock);
    Artifacts a = load_artifacts();
    auto embedder = make_embedder(a.stored);
    if (a.index.embedder_id() != embedder->id())
        throw Error(ErrorCode::Stale, "index was built with embedder " + a.index.embedder_id() +
                                          "; rebuild or switch embedders");
    auto client = make_answer_client();

    std::vector<QaExample> examples =
        load_metaqa(read_file(questions_path), hop_from_filename(questions_path));
    if (limit) {
        if (*limit == 0) throw usage_error("--limit must be >= 1");
        if (*limit < examples.size()) {
            // Seeded sample without replacement, original order preserved.
            std::vector<std::size_t> idx(examples.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            SplitMix64 rng(mix64(config_.seed ^ 0x5eedfeedULL));
            for (std::size_t i = 0; i < *limit; ++i) {
                std::size_t j = i + rng.bounded(idx.size() - i);
                std::swap(idx[i], idx[j]);
            }
            idx.resize(*limit);
            std::sort(idx.begin(), idx.end());
            std::vector<QaExample> sampled;
            sampled.reserve(*limit);
            for (std::size_t i : idx) sampled.push_back(std::move(examples[i]));
            examples = std::move(sampled);
        }
    }
    if (examples.empty()) throw Error(ErrorCode::Parse, "no questions in " + questions_path);

    ExactMatchJudge judge;
    EvalOutput out;
    std::string answers_log;
    for (QaExample& ex : examples) {
        auto start = Clock::now();
        Answer ans = answer_question(ex.question, a.index, a.verbal, *embedder, *client,
                                     config_.k);
        double latency = seconds_since(start);
        answers_log += answer_log_record(ans, config_.k);
        answers_log.push_back('\n');
        out.records.push_back(
            make_record(std::move(ex), ans.response_text, ans.abstained, latency, judge));
    }
    out.report = aggregate(out.records);

    write_file_atomic(paths_.answers_tsv, answers_log);
    write_file_atomic(paths_.records_tsv, eval_records_tsv(out.records));
    write_file_atomic(paths_.report_json, out.report_json());
    out.answers_path = paths_.answers_tsv;
    out.records_path = paths_.records_tsv;
    out.report_path = paths_.report_json;
    return out;
}

}  // namespace kgw
