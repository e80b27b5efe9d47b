/* kgwalk C API: build, update, query, and evaluate walk-based knowledge-graph
 * retrieval artifacts through an opaque engine handle.
 *
 * Every command function returns KGW_OK or an error status; the message for
 * the most recent failure is available via kgw_last_error. Strings returned
 * through out-parameters are heap-allocated JSON and must be released with
 * kgw_string_free.
 */
#ifndef KGWALK_H
#define KGWALK_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgw_status {
    KGW_OK = 0,
    KGW_ERR_USAGE = 1,    /* bad arguments or configuration */
    KGW_ERR_DATA = 2,     /* malformed or inconsistent data / artifacts */
    KGW_ERR_EXTERNAL = 3, /* LLM or embedding service failure */
    KGW_ERR_INTERNAL = 4
} kgw_status;

typedef struct kgw_engine kgw_engine;

const char* kgw_version(void);

/* config_json keys mirror the CLI flags: graph, traversal, depth, num_walks,
 * seed, k, embedder, dimension, llm_endpoint, llm_model, llm_timeout_s,
 * mock_llm, undirected, out. Unknown keys are ignored; missing keys take
 * defaults. */
kgw_status kgw_engine_create(const char* config_json, kgw_engine** out_engine);
void kgw_engine_destroy(kgw_engine* engine);

/* Message for the most recent failure on this engine. Passing NULL returns
 * the most recent kgw_engine_create failure on this thread. The pointer stays
 * valid until the next failing call on the same engine (or thread). */
const char* kgw_last_error(const kgw_engine* engine);

/* Generates the walk corpus, verbalizations, and embedding index under the
 * configured output directory. */
kgw_status kgw_build(kgw_engine* engine, char** out_summary_json);

/* Applies a graph update file and recomputes only the affected walks,
 * verbalizations, and vectors. */
kgw_status kgw_update(kgw_engine* engine, const char* updates_path, char** out_summary_json);

/* Retrieves context for the question and generates one answer. */
kgw_status kgw_query(kgw_engine* engine, const char* question, char** out_result_json);

/* Runs a question file through the pipeline and scores it. limit < 0 means
 * all questions; limit == 0 is a usage error. */
kgw_status kgw_eval(kgw_engine* engine, const char* questions_path, long limit,
                    char** out_report_json);

void kgw_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* KGWALK_H */
