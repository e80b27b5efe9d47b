#include "verbalize.hpp"

#include <atomic>
#include <cctype>
#include <iostream>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "prompts.hpp"
#include "util.hpp"

namespace kgw {

std::string method_name(VerbalizeMethod m) {
    return m == VerbalizeMethod::LLM ? "llm" : "template";
}

VerbalizeMethod method_from_name(const std::string& name) {
    if (name == "llm") return VerbalizeMethod::LLM;
    if (name == "template") return VerbalizeMethod::Template;
    throw usage_error("unknown verbalization method: " + name);
}

std::string relation_words(const std::string& relation) {
    // Split on underscores and camelCase boundaries, lowercase the pieces.
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    };
    const std::size_t n = relation.size();
    for (std::size_t i = 0; i < n; ++i) {
        char c = relation[i];
        if (c == '_' || c == ' ') {
            flush();
            continue;
        }
        bool upper = c >= 'A' && c <= 'Z';
        if (upper && !cur.empty()) {
            char prev = relation[i - 1];
            bool prev_lower = (prev >= 'a' && prev <= 'z') || (prev >= '0' && prev <= '9');
            bool acronym_end = (prev >= 'A' && prev <= 'Z') && i + 1 < n &&
                               relation[i + 1] >= 'a' && relation[i + 1] <= 'z';
            if (prev_lower || acronym_end) flush();
        }
        cur.push_back(upper ? static_cast<char>(c - 'A' + 'a') : c);
    }
    flush();
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out.push_back(' ');
        out += words[i];
    }
    return out;
}

VerbalizedWalk verbalize_template(const Walk& w) {
    if (w.steps.empty())
        throw Error(ErrorCode::Usage, "cannot verbalize a zero-step walk: " + w.root);
    std::string text;
    for (const Triple& t : walk_triples(w)) {
        if (!text.empty()) text += ", and ";
        text += t.head + " " + relation_words(t.relation) + " " + t.tail;
    }
    text.push_back('.');
    return {walk_key(w), std::move(text), VerbalizeMethod::Template};
}

VerbalizedWalk verbalize_llm(const Walk& w, LlmClient& client) {
    if (w.steps.empty())
        throw Error(ErrorCode::Usage, "cannot verbalize a zero-step walk: " + w.root);
    auto [system_text, human_text] = build_verbalize_prompt(walk_triples(w));
    try {
        std::string text = trim(client.send(system_text, human_text, 0.0));
        if (text.empty()) {
            std::cerr << "warning: empty verbalization response, using template for walk of "
                      << w.root << "\n";
            return verbalize_template(w);
        }
        return {walk_key(w), std::move(text), VerbalizeMethod::LLM};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::External) throw;
        std::cerr << "warning: verbalization call failed (" << e.what()
                  << "), using template for walk of " << w.root << "\n";
        return verbalize_template(w);
    }
}

VerbalizationCache::VerbalizationCache(const VerbalizationCache& other) {
    std::lock_guard lock(other.mutex_);
    entries_ = other.entries_;
}

VerbalizationCache& VerbalizationCache::operator=(const VerbalizationCache& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    entries_ = other.entries_;
    return *this;
}

std::optional<VerbalizedWalk> VerbalizationCache::get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void VerbalizationCache::put(VerbalizedWalk vw) {
    if (vw.text.empty()) throw Error(ErrorCode::Usage, "verbalization text is empty");
    std::lock_guard lock(mutex_);
    auto it = entries_.find(vw.key);
    if (it != entries_.end()) {
        if (it->second.text != vw.text)
            throw Error(ErrorCode::Conflict,
                        "conflicting verbalization for walk key: " + vw.key);
        return;
    }
    entries_.emplace(vw.key, std::move(vw));
}

std::size_t VerbalizationCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void VerbalizationCache::retain(const std::set<std::string>& keys) {
    std::lock_guard lock(mutex_);
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (keys.count(it->first)) ++it;
        else it = entries_.erase(it);
    }
}

std::string VerbalizationCache::serialize() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& [key, vw] : entries_) {
        out += join_record({key, method_name(vw.method), vw.text});
        out.push_back('\n');
    }
    return out;
}

VerbalizationCache VerbalizationCache::deserialize(const std::string& text) {
    VerbalizationCache cache;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f = split_record(line);
        if (f.size() != 3) throw ParseError(lineno, "bad verbalization record");
        cache.entries_.emplace(f[0], VerbalizedWalk{f[0], f[2], method_from_name(f[1])});
    }
    return cache;
}

std::size_t verbalize_corpus(const Corpus& corpus, LlmClient* client, VerbalizationCache& cache,
                             std::size_t parallelism) {
    if (corpus.walks.empty()) throw usage_error("corpus is empty");

    // Distinct pending walks, multiplicity and duplicates across roots ignored.
    std::vector<const Walk*> pending;
    std::set<std::string> seen;
    for (const auto& [root, list] : corpus.walks) {
        for (const Walk& w : list) {
            if (w.steps.empty()) continue;
            std::string key = walk_key(w);
            if (cache.get(key) || !seen.insert(key).second) continue;
            pending.push_back(&w);
        }
    }

    if (!client || pending.size() <= 1 || parallelism <= 1) {
        for (const Walk* w : pending) {
            try {
                cache.put(client ? verbalize_llm(*w, *client) : verbalize_template(*w));
            } catch (const Error& e) {
                throw Error(e.code(), std::string(e.what()) + " (completed " +
                                          std::to_string(cache.size()) + " verbalizations)");
            }
        }
        return pending.size();
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            try {
                cache.put(verbalize_llm(*pending[i], *client));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < std::min(parallelism, pending.size()); ++i)
        threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (completed " +
                                      std::to_string(cache.size()) + " verbalizations)");
        }
    }
    return pending.size();
}

}  // namespace kgw
