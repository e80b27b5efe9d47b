#pragma once

#include <atomic>
#include <memory>
#include <string>

namespace kgw {

// One chat turn against a language model. Implementations must be safe to
// call from multiple threads and never mutate the prompts.
class LlmClient {
public:
    virtual ~LlmClient() = default;

    virtual std::string send(const std::string& system_text, const std::string& human_text,
                             double temperature) = 0;
    virtual std::string model() const = 0;
};

// Returns the first numbered context line from the human prompt, or the
// abstention sentence when none is present. Lets the whole pipeline run and
// be tested with zero network access.
class EchoClient : public LlmClient {
public:
    std::string send(const std::string& system_text, const std::string& human_text,
                     double temperature) override;
    std::string model() const override { return "mock-echo"; }
};

// Always abstains.
class RefuseClient : public LlmClient {
public:
    std::string send(const std::string& system_text, const std::string& human_text,
                     double temperature) override;
    std::string model() const override { return "mock-refuse"; }
};

// Wraps another client and counts sends.
class CountingClient : public LlmClient {
public:
    explicit CountingClient(LlmClient& inner) : inner_(inner) {}

    std::string send(const std::string& system_text, const std::string& human_text,
                     double temperature) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.send(system_text, human_text, temperature);
    }
    std::string model() const override { return inner_.model(); }
    std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }

private:
    LlmClient& inner_;
    std::atomic<std::size_t> calls_{0};
};

// OpenAI-style chat completions endpoint. The credential, when needed, comes
// from the KGWALK_API_KEY environment variable, never from argv.
class HttpChatClient : public LlmClient {
public:
    HttpChatClient(std::string endpoint, std::string model, double timeout_s,
                   int max_retries = 2);

    std::string send(const std::string& system_text, const std::string& human_text,
                     double temperature) override;
    std::string model() const override { return model_; }

private:
    std::string endpoint_;
    std::string model_;
    double timeout_s_;
    int max_retries_;
};

// name: "echo" or "refuse"; throws Usage otherwise.
std::unique_ptr<LlmClient> make_mock_client(const std::string& name);

}  // namespace kgw
