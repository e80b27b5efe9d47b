// kgwalk command line: build / update / query / eval over an artifact
// directory. Talks to the engine exclusively through the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgwalk.h"

namespace {

struct CliOptions {
    std::string graph;
    std::string traversal = "bfs";
    unsigned depth = 4;
    unsigned num_walks = 60;
    unsigned long long seed = 0;
    unsigned k = 3;
    std::string embedder = "hashed-bow";
    unsigned dimension = 256;
    std::string llm_endpoint;
    std::string llm_model;
    double llm_timeout = 60.0;
    std::string mock_llm;
    bool undirected = false;
    std::string out;
    long limit = -1;

    std::string question;
    std::string updates_file;
    std::string questions_file;

    std::string to_config_json() const {
        nlohmann::json j = {
            {"graph", graph},
            {"traversal", traversal},
            {"depth", depth},
            {"num_walks", num_walks},
            {"seed", seed},
            {"k", k},
            {"embedder", embedder},
            {"dimension", dimension},
            {"llm_endpoint", llm_endpoint},
            {"llm_model", llm_model},
            {"llm_timeout_s", llm_timeout},
            {"mock_llm", mock_llm},
            {"undirected", undirected},
            {"out", out},
        };
        return j.dump();
    }
};

void add_llm_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--llm-endpoint", opt.llm_endpoint,
                    "Chat-completions endpoint, e.g. http://host:8000");
    cmd->add_option("--llm-model", opt.llm_model, "Model identifier sent to the endpoint");
    cmd->add_option("--llm-timeout", opt.llm_timeout, "Request timeout in seconds");
    cmd->add_option("--mock-llm", opt.mock_llm, "Offline mock client")
        ->check(CLI::IsMember({"echo", "refuse"}));
}

void add_out_flag(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--out", opt.out, "Artifact directory")->required();
}

int exit_code(kgw_status status) {
    switch (status) {
        case KGW_OK: return 0;
        case KGW_ERR_USAGE: return 1;
        case KGW_ERR_EXTERNAL: return 3;
        default: return 2;  // data / internal
    }
}

int fail(kgw_engine* engine, kgw_status status) {
    std::fprintf(stderr, "error: %s\n", kgw_last_error(engine));
    return exit_code(status);
}

// Takes ownership of the C string.
nlohmann::json parse_and_free(char* json) {
    nlohmann::json parsed = nlohmann::json::parse(json);
    kgw_string_free(json);
    return parsed;
}

int run_build(kgw_engine* engine) {
    char* summary_json = nullptr;
    kgw_status status = kgw_build(engine, &summary_json);
    if (status != KGW_OK) return fail(engine, status);
    nlohmann::json s = parse_and_free(summary_json);
    std::printf("build complete\n");
    std::printf("  nodes            %llu\n", s["nodes"].get<unsigned long long>());
    std::printf("  edges            %llu\n", s["edges"].get<unsigned long long>());
    std::printf("  distinct walks   %llu\n", s["distinct_walks"].get<unsigned long long>());
    std::printf("  walk instances   %llu\n", s["walk_instances"].get<unsigned long long>());
    std::printf("  walks per node   %.2f\n", s["nodes"].get<double>() > 0
                                                 ? s["distinct_walks"].get<double>() /
                                                       s["nodes"].get<double>()
                                                 : 0.0);
    std::printf("  duplicate ratio  %.4f\n", s["duplicate_ratio"].get<double>());
    std::printf("  elapsed          %.3fs\n", s["elapsed_s"].get<double>());
    return 0;
}

int run_update(kgw_engine* engine, const std::string& updates_file) {
    char* summary_json = nullptr;
    kgw_status status = kgw_update(engine, updates_file.c_str(), &summary_json);
    if (status != KGW_OK) return fail(engine, status);
    nlohmann::json s = parse_and_free(summary_json);
    std::printf("update complete\n");
    std::printf("  updates applied    %llu\n", s["updates_applied"].get<unsigned long long>());
    std::printf("  affected roots     %llu\n", s["affected_roots"].get<unsigned long long>());
    std::printf("  roots regenerated  %llu\n", s["roots_regenerated"].get<unsigned long long>());
    std::printf("  roots removed      %llu\n", s["roots_removed"].get<unsigned long long>());
    std::printf("  walks regenerated  %llu\n", s["walks_regenerated"].get<unsigned long long>());
    std::printf("  new verbalizations %llu\n",
                s["new_verbalizations"].get<unsigned long long>());
    std::printf("  elapsed            %.3fs\n", s["elapsed_s"].get<double>());
    return 0;
}

int run_query(kgw_engine* engine, const std::string& question) {
    char* result_json = nullptr;
    kgw_status status = kgw_query(engine, question.c_str(), &result_json);
    if (status != KGW_OK) return fail(engine, status);
    nlohmann::json r = parse_and_free(result_json);
    for (const auto& node : r["nodes"])
        std::printf("node\t%s\t%.6f\n", node["id"].get<std::string>().c_str(),
                    node["sim"].get<double>());
    for (const auto& walk : r["walks"])
        std::printf("walk\t%s\t%.6f\t%s\n", walk["owner"].get<std::string>().c_str(),
                    walk["sim"].get<double>(), walk["text"].get<std::string>().c_str());
    std::printf("answer\t%s\n", r["answer"].get<std::string>().c_str());
    std::printf("abstained\t%s\n", r["abstained"].get<bool>() ? "yes" : "no");
    std::printf("elapsed\t%.4fs\n", r["elapsed_s"].get<double>());
    return 0;
}

int run_eval(kgw_engine* engine, const std::string& questions_file, long limit) {
    char* report_json = nullptr;
    kgw_status status = kgw_eval(engine, questions_file.c_str(), limit, &report_json);
    if (status != KGW_OK) return fail(engine, status);
    nlohmann::json r = parse_and_free(report_json);
    std::fputs(r["report_text"].get<std::string>().c_str(), stdout);
    std::printf("  answers  %s\n", r["answers_path"].get<std::string>().c_str());
    std::printf("  records  %s\n", r["records_path"].get<std::string>().c_str());
    std::printf("  report   %s\n", r["report_path"].get<std::string>().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walk-based knowledge-graph retrieval pipeline"};
    app.set_version_flag("--version", kgw_version());
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App* build = app.add_subcommand("build", "Generate corpus, verbalizations, and index");
    build->add_option("--graph", opt.graph, "Graph file (.nt, .tsv, or .txt)")->required();
    build->add_option("--traversal", opt.traversal, "Walk strategy")
        ->check(CLI::IsMember({"rw", "bfs"}));
    build->add_option("--depth", opt.depth, "Walk depth");
    build->add_option("--num-walks", opt.num_walks, "Random walks per node");
    build->add_option("--seed", opt.seed, "Global random seed");
    build->add_option("--embedder", opt.embedder, "Embedding backend")
        ->check(CLI::IsMember({"hashed-bow", "remote"}));
    build->add_option("--dim", opt.dimension, "Hashed bag-of-words dimension");
    build->add_flag("--undirected", opt.undirected,
                    "Also traverse each edge backwards via <relation>_inv");
    add_out_flag(build, opt);
    add_llm_flags(build, opt);

    CLI::App* update = app.add_subcommand("update", "Apply graph updates incrementally");
    update->add_option("updates", opt.updates_file, "Update file")->required();
    add_out_flag(update, opt);
    add_llm_flags(update, opt);

    CLI::App* query = app.add_subcommand("query", "Answer one question");
    query->add_option("question", opt.question, "Question text")->required();
    query->add_option("--k", opt.k, "Retrieved nodes and walks per node");
    add_out_flag(query, opt);
    add_llm_flags(query, opt);

    CLI::App* eval = app.add_subcommand("eval", "Score a question file");
    eval->add_option("questions", opt.questions_file, "Question file (MetaQA format)")
        ->required();
    eval->add_option("--k", opt.k, "Retrieved nodes and walks per node");
    eval->add_option("--limit", opt.limit, "Evaluate a seeded sample of N questions");
    eval->add_option("--seed", opt.seed, "Sampling seed");
    add_out_flag(eval, opt);
    add_llm_flags(eval, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage errors exit 1
    }

    kgw_engine* engine = nullptr;
    kgw_status status = kgw_engine_create(opt.to_config_json().c_str(), &engine);
    if (status != KGW_OK) {
        std::fprintf(stderr, "error: %s\n", kgw_last_error(nullptr));
        return exit_code(status);
    }

    int rc = 1;
    if (build->parsed()) rc = run_build(engine);
    else if (update->parsed()) rc = run_update(engine, opt.updates_file);
    else if (query->parsed()) rc = run_query(engine, opt.question);
    else if (eval->parsed()) rc = run_eval(engine, opt.questions_file, opt.limit);

    kgw_engine_destroy(engine);
    return rc;
}
