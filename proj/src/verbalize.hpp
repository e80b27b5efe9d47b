#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include "llm_client.hpp"
#include "walks.hpp"

namespace kgw {

enum class VerbalizeMethod { LLM, Template };

std::string method_name(VerbalizeMethod m);
VerbalizeMethod method_from_name(const std::string& name);

struct VerbalizedWalk {
    std::string key;   // canonical walk key
    std::string text;  // non-empty natural-language rendering
    VerbalizeMethod method = VerbalizeMethod::Template;

    bool operator==(const VerbalizedWalk&) const = default;
};

// "directedBy" -> "directed by"; "release_year" -> "release year";
// "IMDBRating" -> "imdb rating".
std::string relation_words(const std::string& relation);

// Deterministic rendering: triple segments "<head> <relation words> <tail>"
// joined by ", and ", terminated by ".". Throws on zero-step walks.
VerbalizedWalk verbalize_template(const Walk& w);

// Asks the client with the verbalization prompt; trims the response. Falls
// back to the template on client failure or empty response.
VerbalizedWalk verbalize_llm(const Walk& w, LlmClient& client);

// Persistent walk_key -> text map. Concurrent inserts of distinct keys are
// fine; inserting a conflicting value for an existing key throws.
class VerbalizationCache {
public:
    VerbalizationCache() = default;
    VerbalizationCache(const VerbalizationCache& other);
    VerbalizationCache& operator=(const VerbalizationCache& other);

    std::optional<VerbalizedWalk> get(const std::string& key) const;
    void put(VerbalizedWalk vw);
    std::size_t size() const;

    // Drops every entry whose key is not in `keys`.
    void retain(const std::set<std::string>& keys);

    const std::map<std::string, VerbalizedWalk>& entries() const { return entries_; }

    std::string serialize() const;
    static VerbalizationCache deserialize(const std::string& text);

    bool operator==(const VerbalizationCache& other) const { return entries_ == other.entries_; }

private:
    std::map<std::string, VerbalizedWalk> entries_;
    mutable std::mutex mutex_;
};

// Verbalizes every distinct walk with >= 1 step exactly once (multiplicity
// ignored), consulting the cache so reruns and incremental updates only touch
// new walks. Null client means template rendering. Returns the number of
// newly verbalized walks.
std::size_t verbalize_corpus(const Corpus& corpus, LlmClient* client, VerbalizationCache& cache,
                             std::size_t parallelism = 4);

}  // namespace kgw
