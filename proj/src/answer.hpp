#pragma once

#include <string>
#include <vector>

#include "error.hpp"
#include "llm_client.hpp"
#include "retrieve.hpp"

namespace kgw {

struct Answer {
    std::string question;
    std::string response_text;
    bool abstained = false;
    std::vector<std::string> context_used;   // walk texts, prompt order
    std::vector<std::string> context_keys;   // matching walk keys
    std::string llm_model;
};

// True when the response, after trimming and ASCII case-folding, equals the
// abstention sentence, is the sentence plus terminal punctuation, or contains
// it as its full first sentence.
bool detect_abstention(const std::string& response_text);

// Client failure during answering. Carries the already-computed retrieval so
// callers can retry the model call without re-running retrieval.
class AnswerError : public Error {
public:
    AnswerError(ErrorCode code, std::string message, RetrievalResult retrieval)
        : Error(code, std::move(message)), retrieval_(std::move(retrieval)) {}

    const RetrievalResult& retrieval() const { return retrieval_; }

private:
    RetrievalResult retrieval_;
};

// Retrieves context, builds the answer prompt, and issues exactly one client
// call at temperature 0.
Answer answer_question(const std::string& question, const EmbeddingIndex& index,
                       const VerbalizationCache& verbal, Embedder& embedder, LlmClient& client,
                       std::size_t k);

// As above but over an already-computed retrieval result (keeps retries from
// re-running retrieval).
Answer answer_with_context(const std::string& question, const RetrievalResult& retrieval,
                           LlmClient& client);

// Answer log record: question, response, abstained, k, model, context walk
// keys. One line per answer, TAB-separated with field escaping.
std::string answer_log_record(const Answer& a, std::size_t k);

}  // namespace kgw
