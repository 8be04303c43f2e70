#pragma once

#include "litsieve/clock.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

enum class Verdict { include, discard, ambiguous, error };

std::string_view to_string(Verdict v);
/// Accepts the upper-case wire names ("INCLUDE", ...).
Verdict verdict_from_string(std::string_view name);

struct AgentConfig {
    std::string id;
    std::string display_name;
    std::string endpoint_url;
    /// Name of the environment variable holding the API key, never the key.
    std::string api_key_ref;
    std::string model_name;
    double temperature = 0.0;
    int max_output_tokens = 256;
    int max_parallel_requests = 4;
    int requests_per_minute = 60;

    friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

/// Field-named problems; empty when the config is usable.
std::vector<std::string> validate_agent_config(const AgentConfig& agent);

struct AgentDecision {
    std::string run_id;
    std::string paper_id;
    std::string agent_id;
    Verdict verdict = Verdict::ambiguous;
    std::string justification;
    std::string raw_response;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t latency_ms = 0;
    int attempt_count = 1;

    friend bool operator==(const AgentDecision&, const AgentDecision&) = default;
};

struct ParsedResponse {
    Verdict verdict;
    std::string justification;

    friend bool operator==(const ParsedResponse&, const ParsedResponse&) = default;
};

/// Exactly one of the case-sensitive standalone words INCLUDE / DISCARD
/// decides the verdict; both or neither give AMBIGUOUS. The justification is
/// the text without the first occurrence of the verdict word.
ParsedResponse parse_response(std::string_view raw);

/// ceil(code points / 4), the fallback when a provider reports no usage.
std::int64_t estimate_tokens(std::string_view text);

struct CompletionRequest {
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 256;

    // Routing metadata; not part of the wire payload.
    std::string run_id;
    std::string paper_id;
    std::string agent_id;
    Instant dispatched_at{0};
};

/// Chat-completion request body: one user message, no system prompt.
nlohmann::json completion_payload(const CompletionRequest& request);

struct CompletionReply {
    int status = 200;
    std::string body;
    std::optional<std::chrono::milliseconds> retry_after;
};

/// Sends one request. Throws TransportError when no HTTP reply was received.
class CompletionTransport {
public:
    virtual ~CompletionTransport() = default;
    virtual CompletionReply send(const AgentConfig& agent, const CompletionRequest& request) = 0;
};

/// OpenAI-compatible POST to `agent.endpoint_url` with a bearer token read
/// from the environment variable `agent.api_key_ref`.
class HttpCompletionTransport : public CompletionTransport {
public:
    explicit HttpCompletionTransport(std::chrono::milliseconds timeout = std::chrono::seconds(120))
        : timeout_(timeout) {}

    CompletionReply send(const AgentConfig& agent, const CompletionRequest& request) override;

private:
    std::chrono::milliseconds timeout_;
};

/// Deterministic transport scripted as `{paper_id: {agent_id: entry}}`. An
/// entry is either the raw completion text or an object
/// `{content, prompt_tokens?, completion_tokens?, fail_attempts?, status?, retry_after_ms?}`
/// where the first `fail_attempts` calls answer with `status` (default 500).
class MockTransport : public CompletionTransport {
public:
    struct Call {
        std::string paper_id;
        std::string agent_id;
        Instant dispatched_at;
    };

    explicit MockTransport(nlohmann::json script);

    static MockTransport from_file(const std::string& path);

    CompletionReply send(const AgentConfig& agent, const CompletionRequest& request) override;

    std::vector<Call> calls() const;
    const nlohmann::json& script() const { return script_; }

private:
    nlohmann::json script_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, int> attempts_;
    std::vector<Call> calls_;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;

    /// Delay after the given failed attempt (1-based).
    std::chrono::milliseconds delay_after(int attempt) const;
};

class RateLimiter;

struct ClassifyOptions {
    Clock* clock = nullptr;  // SteadyClock when null
    RetryPolicy retry;
    RateLimiter* limiter = nullptr;
    std::string run_id;
    std::string paper_id;
};

/// Never throws for provider failures: exhausted retries or malformed replies
/// become an ERROR decision.
AgentDecision classify_one(const AgentConfig& agent, std::string_view prompt, CompletionTransport& transport,
                           const ClassifyOptions& options = {});

}  // namespace litsieve
