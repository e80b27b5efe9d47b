#include "kgwalk.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "engine.hpp"
#include "error.hpp"
#include "evaluate.hpp"

namespace {

thread_local std::string g_create_error;

kgw_status status_for(kgw::ErrorCode code) {
    switch (code) {
        case kgw::ErrorCode::Usage: return KGW_ERR_USAGE;
        case kgw::ErrorCode::Parse:
        case kgw::ErrorCode::NotFound:
        case kgw::ErrorCode::Unsupported:
        case kgw::ErrorCode::Stale:
        case kgw::ErrorCode::Conflict: return KGW_ERR_DATA;
        case kgw::ErrorCode::External: return KGW_ERR_EXTERNAL;
        case kgw::ErrorCode::Internal: return KGW_ERR_INTERNAL;
    }
    return KGW_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct kgw_engine {
    kgw::Engine engine;
    std::string last_error;

    explicit kgw_engine(kgw::RunConfig config) : engine(std::move(config)) {}

    template <typename Fn>
    kgw_status run(Fn&& fn) {
        try {
            fn();
            return KGW_OK;
        } catch (const kgw::Error& e) {
            last_error = e.what();
            return status_for(e.code());
        } catch (const std::exception& e) {
            last_error = e.what();
            return KGW_ERR_INTERNAL;
        }
    }
};

extern "C" {

const char* kgw_version(void) { return "0.1.0"; }

kgw_status kgw_engine_create(const char* config_json, kgw_engine** out_engine) {
    if (!out_engine) return KGW_ERR_USAGE;
    *out_engine = nullptr;
    try {
        kgw::RunConfig config = kgw::RunConfig::from_json(config_json ? config_json : "{}");
        *out_engine = new kgw_engine(std::move(config));
        return KGW_OK;
    } catch (const kgw::Error& e) {
        g_create_error = e.what();
        return status_for(e.code());
    } catch (const std::exception& e) {
        g_create_error = e.what();
        return KGW_ERR_INTERNAL;
    }
}

void kgw_engine_destroy(kgw_engine* engine) { delete engine; }

const char* kgw_last_error(const kgw_engine* engine) {
    return engine ? engine->last_error.c_str() : g_create_error.c_str();
}

kgw_status kgw_build(kgw_engine* engine, char** out_summary_json) {
    if (!engine) return KGW_ERR_USAGE;
    return engine->run([&] {
        kgw::BuildSummary summary = engine->engine.build();
        if (out_summary_json) *out_summary_json = dup_string(summary.to_json());
    });
}

kgw_status kgw_update(kgw_engine* engine, const char* updates_path, char** out_summary_json) {
    if (!engine || !updates_path) return KGW_ERR_USAGE;
    return engine->run([&] {
        kgw::UpdateSummary summary = engine->engine.update(updates_path);
        if (out_summary_json) *out_summary_json = dup_string(summary.to_json());
    });
}

kgw_status kgw_query(kgw_engine* engine, const char* question, char** out_result_json) {
    if (!engine || !question) return KGW_ERR_USAGE;
    return engine->run([&] {
        kgw::QueryOutput output = engine->engine.query(question);
        if (out_result_json) *out_result_json = dup_string(output.to_json());
    });
}

kgw_status kgw_eval(kgw_engine* engine, const char* questions_path, long limit,
                    char** out_report_json) {
    if (!engine || !questions_path) return KGW_ERR_USAGE;
    return engine->run([&] {
        std::optional<std::size_t> lim;
        if (limit == 0) throw kgw::usage_error("--limit must be >= 1");
        if (limit > 0) lim = static_cast<std::size_t>(limit);
        kgw::EvalOutput output = engine->engine.evaluate(questions_path, lim);
        if (out_report_json) {
            nlohmann::json j = nlohmann::json::parse(output.report_json());
            j["report_text"] = kgw::format_report(output.report);
            j["answers_path"] = output.answers_path;
            j["records_path"] = output.records_path;
            j["report_path"] = output.report_path;
            *out_report_json = dup_string(j.dump(2) + "\n");
        }
    });
}

void kgw_string_free(char* s) { std::free(s); }

}  // extern "C"
