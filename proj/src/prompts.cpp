#include "prompts.hpp"

namespace kgw {

namespace {

const std::string kVerbalizeSystem =
    "Please provide me from an extracted triple set of a Knowledge Graph a sentence. "
    "The triple set consists of one extracted random walk. Therefore, a logical order "
    "of the shown triples is present. Please consider this fact when constructing the "
    "sentence. Prevent introduction words.";

const std::string kVerbalizeHuman =
    "Please return only the constructed sentence from the following set of node and "
    "edge labels extracted from the Knowledge Graph: {triples}.";

const std::string kAnswerSystem =
    "You are provided with context information from a RAG retrieval, which gives you "
    "the top k context information. Please use the provided context information to "
    "answer the question. If you are not able to answer the question based on the "
    "context information, please return the following sentence: \"I do not know the "
    "answer\".";

const std::string kAnswerHuman =
    "Please answer the following question: {question}. Use the following context "
    "information to answer the question: {context}.";

const std::string kAbstention = "I do not know the answer";

// Single-pass placeholder substitution over the template only; substituted
// values are never re-scanned, so braces in questions or context cannot
// re-expand another placeholder.
std::string substitute(const std::string& tmpl,
                       const std::vector<std::pair<std::string, std::string>>& repl) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t best = std::string::npos;
        const std::pair<std::string, std::string>* hit = nullptr;
        for (const auto& r : repl) {
            std::size_t p = tmpl.find(r.first, pos);
            if (p < best) {
                best = p;
                hit = &r;
            }
        }
        if (!hit) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, best - pos);
        out += hit->second;
        pos = best + hit->first.size();
    }
    return out;
}

}  // namespace

const std::string& verbalize_system_prompt() { return kVerbalizeSystem; }
const std::string& verbalize_human_template() { return kVerbalizeHuman; }
const std::string& answer_system_prompt() { return kAnswerSystem; }
const std::string& answer_human_template() { return kAnswerHuman; }
const std::string& abstention_sentence() { return kAbstention; }

std::pair<std::string, std::string> build_verbalize_prompt(const std::vector<Triple>& triples) {
    std::string rendered;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        if (i) rendered += ", ";
        rendered += "(" + triples[i].head + ", " + triples[i].relation + ", " + triples[i].tail + ")";
    }
    return {kVerbalizeSystem, substitute(kVerbalizeHuman, {{"{triples}", rendered}})};
}

std::pair<std::string, std::string> build_answer_prompt(const std::string& question,
                                                        const std::vector<std::string>& context) {
    std::string rendered;
    if (context.empty()) {
        rendered = "No context retrieved.";
    } else {
        for (std::size_t i = 0; i < context.size(); ++i) {
            if (i) rendered.push_back('\n');
            rendered += std::to_string(i + 1) + ". " + context[i];
        }
    }
    std::string human =
        substitute(kAnswerHuman, {{"{question}", question}, {"{context}", rendered}});
    return {kAnswerSystem, human};
}

}  // namespace kgw
