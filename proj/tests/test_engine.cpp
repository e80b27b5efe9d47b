#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "engine.hpp"
#include "error.hpp"
#include "util.hpp"

using namespace kgw;
namespace fs = std::filesystem;

namespace {

const std::string kToyGraph = std::string(KGW_DATA_DIR) + "/toy/movies.txt";
const std::string kToy1Hop = std::string(KGW_DATA_DIR) + "/toy/questions_1hop.txt";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("kgw_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

RunConfig toy_config(const std::string& out, const std::string& mock = "echo") {
    RunConfig c;
    c.graph_path = kToyGraph;
    c.traversal = "bfs";
    c.depth = 2;
    c.k = 3;
    c.mock_llm = mock;
    c.out_dir = out;
    return c;
}

}  // namespace

TEST_CASE("build writes a complete, reloadable artifact set") {
    TempDir dir("build");
    Engine engine(toy_config(dir.str()));
    BuildSummary s = engine.build();
    CHECK(s.nodes == 12);
    CHECK(s.edges == 24);
    CHECK(s.distinct_walks > 0);
    for (const char* f : {"config.json", "graph.tsv", "corpus.tsv", "verbal.tsv", "index.bin"})
        CHECK(fs::exists(dir.path / f));
    CHECK_FALSE(fs::exists(dir.path / ".lock"));  // released

    Corpus corpus = Corpus::deserialize(read_file((dir.path / "corpus.tsv").string()));
    CHECK(corpus.walks.size() == 12);
    EmbeddingIndex index =
        EmbeddingIndex::deserialize(read_file((dir.path / "index.bin").string()));
    CHECK(index.node_count() == 12);
}

TEST_CASE("config round-trips through json") {
    RunConfig c = toy_config("/tmp/x", "refuse");
    c.seed = 99;
    c.undirected = true;
    RunConfig back = RunConfig::from_json(c.to_json());
    CHECK(back.graph_path == c.graph_path);
    CHECK(back.seed == 99);
    CHECK(back.undirected);
    CHECK(back.mock_llm == "refuse");
}

TEST_CASE("two builds with the same config produce byte-identical artifacts") {
    TempDir a("det_a"), b("det_b");
    RunConfig ca = toy_config(a.str());
    RunConfig cb = toy_config(b.str());
    ca.traversal = cb.traversal = "rw";
    ca.depth = cb.depth = 3;
    ca.seed = cb.seed = 42;
    Engine(ca).build();
    Engine(cb).build();
    CHECK(read_file(a.str() + "/corpus.tsv") == read_file(b.str() + "/corpus.tsv"));
    CHECK(read_file(a.str() + "/index.bin") == read_file(b.str() + "/index.bin"));
    CHECK(read_file(a.str() + "/verbal.tsv") == read_file(b.str() + "/verbal.tsv"));
}

TEST_CASE("query with the echo mock returns the top context line") {
    TempDir dir("query");
    Engine engine(toy_config(dir.str()));
    engine.build();
    QueryOutput out = engine.query("who directed Silver Canyon");
    CHECK(out.retrieval.nodes.size() == 3);
    REQUIRE_FALSE(out.retrieval.walks.empty());
    CHECK(out.answer.response_text == out.retrieval.walks[0].text);
    CHECK_FALSE(out.answer.abstained);
    std::string response_lower = to_lower_ascii(out.answer.response_text);
    CHECK(response_lower.find("rosa delgado") != std::string::npos);
}

TEST_CASE("query with the refuse mock abstains") {
    TempDir dir("refuse");
    Engine engine(toy_config(dir.str(), "refuse"));
    engine.build();
    QueryOutput out = engine.query("who directed Silver Canyon");
    CHECK(out.answer.abstained);
}

TEST_CASE("incremental update produces the same artifacts as a fresh build") {
    TempDir dir("upd"), fresh("upd_fresh");

    Engine engine(toy_config(dir.str()));
    engine.build();

    std::string updates_path = (dir.path / "updates.tsv").string();
    {
        std::ofstream u(updates_path);
        u << "add-edge\tIron Meadow\twritten_by\tOmar Said\n"
          << "add-edge\tOmar Said\twrote\tIron Meadow\n"
          << "remove-edge\tSilver Canyon\thas_genre\tWestern\n"
          << "add-node\tNew Star\n";
    }
    UpdateSummary s = engine.update(updates_path);
    CHECK(s.updates_applied == 4);
    CHECK(s.affected_roots > 0);

    // Fresh build of the post-update graph.
    std::string updated_graph = (fresh.path / "graph_input.txt").string();
    {
        Graph g = Graph::parse_tsv(read_file(kToyGraph));
        g.apply_update(GraphUpdate::add_edge({"Iron Meadow", "written_by", "Omar Said"}));
        g.apply_update(GraphUpdate::add_edge({"Omar Said", "wrote", "Iron Meadow"}));
        g.apply_update(GraphUpdate::remove_edge({"Silver Canyon", "has_genre", "Western"}));
        std::ofstream out(updated_graph);
        out << g.to_tsv();
    }
    RunConfig fc = toy_config(fresh.str());
    fc.graph_path = updated_graph;
    Engine(fc).build();
    // The fresh graph file cannot carry the isolated "New Star" node, so
    // compare corpora through their walk maps minus that entry.
    Corpus updated = Corpus::deserialize(read_file(dir.str() + "/corpus.tsv"));
    Corpus rebuilt = Corpus::deserialize(read_file(fresh.str() + "/corpus.tsv"));
    CHECK(updated.walks.count("New Star"));
    CHECK(updated.walks.at("New Star").empty());
    updated.walks.erase("New Star");
    updated.graph_fingerprint.clear();
    rebuilt.graph_fingerprint.clear();
    CHECK(updated == rebuilt);
    CHECK(read_file(dir.str() + "/verbal.tsv") == read_file(fresh.str() + "/verbal.tsv"));
}

TEST_CASE("update rejects tampered artifacts with a rebuild instruction") {
    TempDir dir("stale");
    Engine engine(toy_config(dir.str()));
    engine.build();
    {
        std::ofstream g(dir.str() + "/graph.tsv", std::ios::app);
        g << "Sneaky\tedit\tHere\n";
    }
    std::string updates_path = (dir.path / "u.tsv").string();
    {
        std::ofstream u(updates_path);
        u << "add-node\tx\n";
    }
    try {
        engine.update(updates_path);
        FAIL("expected stale error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Stale);
        CHECK(std::string(e.what()).find("build") != std::string::npos);
    }
}

TEST_CASE("an empty update file recomputes nothing") {
    TempDir dir("noop");
    Engine engine(toy_config(dir.str()));
    engine.build();
    std::string before = read_file(dir.str() + "/corpus.tsv");
    std::string updates_path = (dir.path / "empty.tsv").string();
    std::ofstream(updates_path).close();
    UpdateSummary s = engine.update(updates_path);
    CHECK(s.affected_roots == 0);
    CHECK(s.walks_regenerated == 0);
    CHECK(s.new_verbalizations == 0);
    CHECK(read_file(dir.str() + "/corpus.tsv") == before);
}

TEST_CASE("query without artifacts reports not-found") {
    TempDir dir("noart");
    Engine engine(toy_config(dir.str()));
    try {
        engine.query("anything");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
}

TEST_CASE("a held lock blocks concurrent commands") {
    TempDir dir("lock");
    Engine engine(toy_config(dir.str()));
    engine.build();
    std::ofstream(dir.str() + "/.lock") << "held\n";
    try {
        engine.query("q");
        FAIL("expected conflict");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Conflict);
    }
}

TEST_CASE("failed builds leave no partial final artifacts") {
    TempDir dir("fail");
    RunConfig c = toy_config(dir.str());
    c.graph_path = (dir.path / "missing.txt").string();
    Engine engine(c);
    CHECK_THROWS(engine.build());
    CHECK_FALSE(fs::exists(dir.path / "corpus.tsv"));
    CHECK_FALSE(fs::exists(dir.path / "index.bin"));
    CHECK_FALSE(fs::exists(dir.path / ".lock"));
}

TEST_CASE("undirected builds traverse edges both ways") {
    TempDir dir("undir");
    RunConfig c = toy_config(dir.str());
    c.undirected = true;
    Engine(c).build();
    Graph g = Graph::parse_tsv(read_file(dir.str() + "/graph.tsv"));
    CHECK(g.edge_count() == 48);
    CHECK(g.neighbors("Western").size() == 2);  // has_genre_inv back-edges
    // Updates mirror through the same augmentation.
    std::string updates_path = (dir.path / "u.tsv").string();
    std::ofstream(updates_path) << "add-edge\tA\tr\tB\n";
    Engine(c).update(updates_path);
    Graph g2 = Graph::parse_tsv(read_file(dir.str() + "/graph.tsv"));
    CHECK(g2.edge_count() == 50);
    CHECK(g2.neighbors("B")[0] == std::pair<std::string, std::string>{"r_inv", "A"});
}

TEST_CASE("an embedder mismatch with the stored index is reported as stale") {
    TempDir dir("embmatch");
    Engine engine(toy_config(dir.str()));
    engine.build();
    // Tamper the stored dimension; the index header still says 256.
    RunConfig stored = RunConfig::from_json(read_file(dir.str() + "/config.json"));
    stored.dimension = 128;
    std::ofstream(dir.str() + "/config.json") << stored.to_json();
    try {
        engine.query("q");
        FAIL("expected stale error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Stale);
    }
}

TEST_CASE("evaluation with the echo mock hits the constructed one-hop answers") {
    TempDir dir("eval");
    Engine engine(toy_config(dir.str()));
    engine.build();
    EvalOutput out = engine.evaluate(kToy1Hop);
    CHECK(out.report.overall.total == 10);
    CHECK(out.report.overall.hits_at_1() >= 0.90);
    CHECK(out.report.per_hop.count(1));
    CHECK(fs::exists(out.answers_path));
    CHECK(fs::exists(out.records_path));
    CHECK(fs::exists(out.report_path));
}

TEST_CASE("evaluation with the refuse mock is all-missing, exactly") {
    TempDir dir("eval_refuse");
    Engine engine(toy_config(dir.str(), "refuse"));
    engine.build();
    EvalOutput out = engine.evaluate(kToy1Hop);
    CHECK(out.report.overall.missing == out.report.overall.total);
    CHECK(out.report.overall.missing_rate() == 1.0);
    CHECK(out.report.overall.truthfulness() == 0.0);
}

TEST_CASE("evaluation limit samples deterministically under a fixed seed") {
    TempDir dir("limit");
    RunConfig c = toy_config(dir.str());
    c.seed = 5;
    Engine engine(c);
    engine.build();
    EvalOutput a = engine.evaluate(kToy1Hop, 4);
    EvalOutput b = engine.evaluate(kToy1Hop, 4);
    REQUIRE(a.records.size() == 4);
    REQUIRE(b.records.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(a.records[i].example.question == b.records[i].example.question);
    CHECK_THROWS_AS(engine.evaluate(kToy1Hop, 0), Error);
}

TEST_CASE("validation rejects bad configurations up front") {
    RunConfig c;
    c.out_dir = "/tmp/x";
    c.graph_path = "g.txt";
    c.traversal = "zigzag";
    CHECK_THROWS_AS(c.validate(true), Error);
    c.traversal = "bfs";
    c.k = 0;
    CHECK_THROWS_AS(c.validate(true), Error);
    c.k = 3;
    c.embedder = "quantum";
    CHECK_THROWS_AS(c.validate(true), Error);
}
