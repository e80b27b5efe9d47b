#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "kgwalk.h"

namespace fs = std::filesystem;

namespace {

const std::string kToyGraph = std::string(KGW_DATA_DIR) + "/toy/movies.txt";
const std::string kToy1Hop = std::string(KGW_DATA_DIR) + "/toy/questions_1hop.txt";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("kgw_capi_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string toy_config_json(const std::string& out, const std::string& mock = "echo") {
    nlohmann::json j = {{"graph", kToyGraph}, {"traversal", "bfs"}, {"depth", 2},
                        {"k", 3},            {"mock_llm", mock},   {"out", out}};
    return j.dump();
}

struct EngineHandle {
    kgw_engine* ptr = nullptr;
    ~EngineHandle() { kgw_engine_destroy(ptr); }
};

}  // namespace

TEST_CASE("version string is present") {
    CHECK(std::string(kgw_version()).find('.') != std::string::npos);
}

TEST_CASE("create rejects malformed config with a thread-local message") {
    kgw_engine* engine = nullptr;
    kgw_status status = kgw_engine_create("{not json", &engine);
    CHECK(status == KGW_ERR_DATA);
    CHECK(engine == nullptr);
    CHECK(std::string(kgw_last_error(nullptr)).find("config") != std::string::npos);
}

TEST_CASE("build, query, and eval through the C surface") {
    TempDir dir("full");
    EngineHandle h;
    REQUIRE(kgw_engine_create(toy_config_json(dir.path.string()).c_str(), &h.ptr) == KGW_OK);

    char* summary = nullptr;
    REQUIRE(kgw_build(h.ptr, &summary) == KGW_OK);
    nlohmann::json s = nlohmann::json::parse(summary);
    kgw_string_free(summary);
    CHECK(s["nodes"] == 12);
    CHECK(s["edges"] == 24);

    char* result = nullptr;
    REQUIRE(kgw_query(h.ptr, "who directed Silver Canyon", &result) == KGW_OK);
    nlohmann::json q = nlohmann::json::parse(result);
    kgw_string_free(result);
    CHECK(q["abstained"] == false);
    CHECK(q["nodes"].size() == 3);
    std::string answer = q["answer"].get<std::string>();
    CHECK(answer.find("Rosa Delgado") != std::string::npos);

    char* report = nullptr;
    REQUIRE(kgw_eval(h.ptr, kToy1Hop.c_str(), -1, &report) == KGW_OK);
    nlohmann::json r = nlohmann::json::parse(report);
    kgw_string_free(report);
    CHECK(r["overall"]["n"] == 10);
    CHECK(r["overall"]["hits_at_1"].get<double>() >= 0.90);
}

TEST_CASE("update through the C surface") {
    TempDir dir("update");
    EngineHandle h;
    REQUIRE(kgw_engine_create(toy_config_json(dir.path.string()).c_str(), &h.ptr) == KGW_OK);
    REQUIRE(kgw_build(h.ptr, nullptr) == KGW_OK);

    fs::path updates = dir.path / "u.tsv";
    {
        FILE* f = std::fopen(updates.string().c_str(), "wb");
        std::fputs("add-edge\tIron Meadow\twritten_by\tOmar Said\n", f);
        std::fclose(f);
    }
    char* summary = nullptr;
    REQUIRE(kgw_update(h.ptr, updates.string().c_str(), &summary) == KGW_OK);
    nlohmann::json s = nlohmann::json::parse(summary);
    kgw_string_free(summary);
    CHECK(s["updates_applied"] == 1);
    CHECK(s["affected_roots"].get<int>() > 0);
}

TEST_CASE("status codes map usage, data, and missing-artifact failures") {
    TempDir dir("errors");
    EngineHandle h;
    REQUIRE(kgw_engine_create(toy_config_json(dir.path.string()).c_str(), &h.ptr) == KGW_OK);

    // No artifacts yet: data error.
    char* out = nullptr;
    CHECK(kgw_query(h.ptr, "q", &out) == KGW_ERR_DATA);
    CHECK(std::string(kgw_last_error(h.ptr)).find("build") != std::string::npos);

    REQUIRE(kgw_build(h.ptr, nullptr) == KGW_OK);
    CHECK(kgw_eval(h.ptr, kToy1Hop.c_str(), 0, &out) == KGW_ERR_USAGE);
    CHECK(kgw_eval(h.ptr, "/nonexistent/questions.txt", -1, &out) == KGW_ERR_DATA);
    CHECK(kgw_query(nullptr, "q", &out) == KGW_ERR_USAGE);
    CHECK(kgw_query(h.ptr, nullptr, &out) == KGW_ERR_USAGE);
}

TEST_CASE("mock-free query configuration is a usage error") {
    TempDir dir("nollm");
    EngineHandle h;
    nlohmann::json j = {{"graph", kToyGraph}, {"traversal", "bfs"}, {"depth", 2},
                        {"out", dir.path.string()}};
    REQUIRE(kgw_engine_create(j.dump().c_str(), &h.ptr) == KGW_OK);
    REQUIRE(kgw_build(h.ptr, nullptr) == KGW_OK);
    char* out = nullptr;
    CHECK(kgw_query(h.ptr, "q", &out) == KGW_ERR_USAGE);
    CHECK(std::string(kgw_last_error(h.ptr)).find("llm") != std::string::npos);
}
