#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kgw {

// 64-bit FNV-1a. Stable across platforms; used for token hashing,
// seed derivation, and content fingerprints.
std::uint64_t fnv1a64(std::string_view data);

// splitmix64 finalizer step.
std::uint64_t mix64(std::uint64_t x);

// Combines a global seed, a root-label hash, and a walk index into one
// per-walk seed, so regeneration of a single root reproduces its walks
// regardless of iteration order.
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t root_hash,
                          std::uint64_t walk_index);

// Deterministic PRNG over the splitmix64 stream. std:: distributions are
// implementation-defined, so bounded draws are done by hand here.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Uniform draw in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n);

private:
    std::uint64_t state_;
};

// --- string helpers ---

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

// Maximal runs of ASCII alphanumerics, lowercased.
std::vector<std::string> tokenize_alnum(std::string_view text);

// Backslash escaping for TAB-separated record files: \t \n \r \\.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

// Splits on a separator character with no unescaping.
std::vector<std::string> split(std::string_view s, char sep);

// Splits a record line on real TABs, then unescapes each field.
std::vector<std::string> split_record(std::string_view line);
std::string join_record(const std::vector<std::string>& fields);

// --- file helpers ---

std::string read_file(const std::string& path);

// Writes to "<path>.tmp" and renames into place, so failures never leave a
// partially written final artifact.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace kgw
