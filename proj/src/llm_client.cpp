#include "llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "prompts.hpp"

namespace kgw {

std::string EchoClient::send(const std::string&, const std::string& human_text, double) {
    std::size_t pos = human_text.find("1. ");
    if (pos != std::string::npos && (pos == 0 || human_text[pos - 1] == '\n' ||
                                     human_text[pos - 1] == ' ')) {
        std::size_t start = pos + 3;
        std::size_t end = human_text.find('\n', start);
        std::string line = human_text.substr(start, end == std::string::npos ? end : end - start);
        // A lone context line absorbs the template's closing period; drop it.
        if (line.size() >= 2 && line.ends_with(".."))
            line.pop_back();
        return line;
    }
    return abstention_sentence();
}

std::string RefuseClient::send(const std::string&, const std::string&, double) {
    return abstention_sentence();
}

std::unique_ptr<LlmClient> make_mock_client(const std::string& name) {
    if (name == "echo") return std::make_unique<EchoClient>();
    if (name == "refuse") return std::make_unique<RefuseClient>();
    throw usage_error("unknown mock client: " + name + " (expected echo or refuse)");
}

namespace {

// Splits "http://host:port/base" into the httplib client target and the path
// prefix in front of /v1/... routes.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    std::size_t scheme = endpoint.find("://");
    std::size_t path_start =
        endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

HttpChatClient::HttpChatClient(std::string endpoint, std::string model, double timeout_s,
                               int max_retries)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_s_(timeout_s),
      max_retries_(max_retries) {
    if (endpoint_.empty()) throw usage_error("llm endpoint is empty");
}

std::string HttpChatClient::send(const std::string& system_text, const std::string& human_text,
                                 double temperature) {
    auto [base, prefix] = split_endpoint(endpoint_);
    nlohmann::json body = {
        {"model", model_},
        {"temperature", temperature},
        {"messages",
         {{{"role", "system"}, {"content", system_text}},
          {{"role", "user"}, {"content", human_text}}}},
    };
    const std::string payload = body.dump();

    std::string last_failure;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
        // One client per request; httplib clients are not safe to share
        // across concurrent senders.
        httplib::Client cli(base);
        cli.set_connection_timeout(std::chrono::duration<double>(timeout_s_));
        cli.set_read_timeout(std::chrono::duration<double>(timeout_s_));
        httplib::Headers headers;
        if (const char* key = std::getenv("KGWALK_API_KEY"))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        auto res = cli.Post(prefix + "/v1/chat/completions", headers, payload,
                            "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;  // retryable
        }
        if (res->status != 200)
            throw external_error("llm endpoint returned HTTP " + std::to_string(res->status) +
                                 ": " + res->body.substr(0, 200));
        try {
            nlohmann::json parsed = nlohmann::json::parse(res->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw external_error(std::string("malformed llm response: ") + e.what());
        }
    }
    throw external_error("llm call failed after " + std::to_string(max_retries_ + 1) +
                         " attempts: " + last_failure);
}

}  // namespace kgw
