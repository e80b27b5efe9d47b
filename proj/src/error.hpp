#pragma once

#include <stdexcept>
#include <string>

namespace kgw {

// Error categories; they map onto C API status values and CLI exit codes.
enum class ErrorCode {
    Usage,        // bad arguments / configuration
    Parse,        // malformed input data
    NotFound,     // missing node, edge, or index entry
    Unsupported,  // recognized but unsupported input feature
    Stale,        // artifact fingerprint mismatch
    Conflict,     // concurrent access or cache value conflict
    External,     // LLM / embedding service failure
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline Error usage_error(std::string msg) { return Error(ErrorCode::Usage, std::move(msg)); }
inline Error not_found_error(std::string msg) { return Error(ErrorCode::NotFound, std::move(msg)); }
inline Error external_error(std::string msg) { return Error(ErrorCode::External, std::move(msg)); }

// Parse failures carry the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string message)
        : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace kgw
