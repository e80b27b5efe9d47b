#include "answer.hpp"

#include "prompts.hpp"
#include "util.hpp"

namespace kgw {

bool detect_abstention(const std::string& response_text) {
    const std::string needle = to_lower_ascii(abstention_sentence());
    std::string body = to_lower_ascii(trim(response_text));
    if (body == needle) return true;
    // Sentence plus terminal punctuation.
    if (body.size() == needle.size() + 1 && body.compare(0, needle.size(), needle) == 0 &&
        (body.back() == '.' || body.back() == '!'))
        return true;
    // Full first sentence of a longer response.
    std::size_t cut = body.find_first_of(".!?");
    if (cut == std::string::npos) return false;
    return trim(body.substr(0, cut)) == needle;
}

Answer answer_with_context(const std::string& question, const RetrievalResult& retrieval,
                           LlmClient& client) {
    Answer a;
    a.question = question;
    a.context_used = retrieval.context_texts();
    for (const RetrievedWalk& w : retrieval.walks) a.context_keys.push_back(w.key);
    a.llm_model = client.model();
    auto [system_text, human_text] = build_answer_prompt(question, a.context_used);
    try {
        a.response_text = client.send(system_text, human_text, 0.0);
    } catch (const Error& e) {
        throw AnswerError(e.code(), e.what(), retrieval);
    }
    a.abstained = detect_abstention(a.response_text);
    return a;
}

Answer answer_question(const std::string& question, const EmbeddingIndex& index,
                       const VerbalizationCache& verbal, Embedder& embedder, LlmClient& client,
                       std::size_t k) {
    RetrievalResult retrieval = retrieve(question, index, verbal, embedder, k);
    return answer_with_context(question, retrieval, client);
}

std::string answer_log_record(const Answer& a, std::size_t k) {
    std::vector<std::string> fields{a.question, a.response_text, a.abstained ? "1" : "0",
                                    std::to_string(k), a.llm_model};
    fields.insert(fields.end(), a.context_keys.begin(), a.context_keys.end());
    return join_record(fields);
}

}  // namespace kgw
