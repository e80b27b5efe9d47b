#pragma once

#include <string>
#include <vector>

#include "graph.hpp"

namespace kgw {

// The two prompt templates, embedded verbatim. The same texts live under
// assets/prompts/ and are golden-file tested against these constants.
const std::string& verbalize_system_prompt();
const std::string& verbalize_human_template();  // contains {triples}
const std::string& answer_system_prompt();
const std::string& answer_human_template();  // contains {question} and {context}

// The sentence the model is instructed to return when the context is
// insufficient.
const std::string& abstention_sentence();

// {triples} -> "(h, r, t), (h2, r2, t2)" in walk order; raw labels.
std::pair<std::string, std::string> build_verbalize_prompt(const std::vector<Triple>& triples);

// {question} substituted verbatim (no re-expansion); {context} becomes
// numbered lines in retrieval order, or "No context retrieved." when empty.
std::pair<std::string, std::string> build_answer_prompt(const std::string& question,
                                                        const std::vector<std::string>& context);

}  // namespace kgw
