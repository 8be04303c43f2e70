#include "litsieve/agents.hpp"

#include "http_util.hpp"
#include "litsieve/error.hpp"
#include "litsieve/run.hpp"
#include "litsieve/text.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace litsieve {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::include: return "INCLUDE";
        case Verdict::discard: return "DISCARD";
        case Verdict::ambiguous: return "AMBIGUOUS";
        case Verdict::error: return "ERROR";
    }
    return "ERROR";
}

Verdict verdict_from_string(std::string_view name) {
    if (name == "INCLUDE") return Verdict::include;
    if (name == "DISCARD") return Verdict::discard;
    if (name == "AMBIGUOUS") return Verdict::ambiguous;
    if (name == "ERROR") return Verdict::error;
    throw ValidationError("unknown verdict '" + std::string(name) + "'");
}

std::vector<std::string> validate_agent_config(const AgentConfig& agent) {
    std::vector<std::string> problems;
    if (agent.id.empty()) problems.emplace_back("id: must not be empty");
    if (!detail::is_absolute_http_url(agent.endpoint_url)) problems.emplace_back("endpoint_url: must be an absolute http(s) URL");
    if (agent.model_name.empty()) problems.emplace_back("model_name: must not be empty");
    if (!(agent.temperature >= 0.0 && agent.temperature <= 2.0)) problems.emplace_back("temperature: must be within [0, 2]");
    if (agent.max_output_tokens < 1) problems.emplace_back("max_output_tokens: must be positive");
    if (agent.max_parallel_requests < 1) problems.emplace_back("max_parallel_requests: must be at least 1");
    if (agent.requests_per_minute < 1) problems.emplace_back("requests_per_minute: must be positive");
    return problems;
}

namespace {

bool is_word_char(char c) { return text::is_ascii_alnum(c) || c == '_'; }

std::optional<std::size_t> find_word(std::string_view s, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = s.find(word, pos)) != std::string_view::npos) {
        const std::size_t end = pos + word.size();
        if ((pos == 0 || !is_word_char(s[pos - 1])) && (end == s.size() || !is_word_char(s[end]))) return pos;
        pos = end;
    }
    return std::nullopt;
}

// Strips whitespace plus separator punctuation left behind by the verdict word.
std::string clean_justification(std::string_view s) {
    static constexpr std::string_view separators = " \t\r\n.:;,!*-_#>\"'`";
    for (;;) {
        const auto before = s.size();
        s = text::trim(s);
        while (!s.empty() && separators.find(s.front()) != std::string_view::npos) s.remove_prefix(1);
        for (std::string_view dash : {"–", "—"}) {
            if (s.starts_with(dash)) s.remove_prefix(dash.size());
        }
        if (s.size() == before) break;
    }
    return std::string(text::trim(s));
}

}  // namespace

ParsedResponse parse_response(std::string_view raw) {
    const auto include_at = find_word(raw, "INCLUDE");
    const auto discard_at = find_word(raw, "DISCARD");
    if (include_at.has_value() == discard_at.has_value()) {
        return {Verdict::ambiguous, std::string(text::trim(raw))};
    }
    const Verdict verdict = include_at ? Verdict::include : Verdict::discard;
    const std::size_t at = include_at ? *include_at : *discard_at;
    constexpr std::size_t word_length = 7;  // both verdict words
    std::string rest = std::string(raw.substr(0, at)) + std::string(raw.substr(at + word_length));
    return {verdict, clean_justification(rest)};
}

std::int64_t estimate_tokens(std::string_view s) {
    const auto chars = static_cast<std::int64_t>(text::codepoint_count(s));
    return (chars + 3) / 4;
}

nlohmann::json completion_payload(const CompletionRequest& request) {
    return {
        {"model", request.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
}

CompletionReply HttpCompletionTransport::send(const AgentConfig& agent, const CompletionRequest& request) {
    const auto url = detail::split_url(agent.endpoint_url);
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    httplib::Headers headers = {{"Accept", "application/json"}};
    if (!agent.api_key_ref.empty()) {
        if (const char* key = std::getenv(agent.api_key_ref.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }
    auto res = client.Post(url.path.empty() ? "/" : url.path, headers, completion_payload(request).dump(),
                           "application/json");
    if (!res) throw TransportError(httplib::to_string(res.error()));

    CompletionReply reply{res->status, res->body, std::nullopt};
    if (res->has_header("Retry-After")) {
        try {
            const double seconds = std::stod(res->get_header_value("Retry-After"));
            if (seconds >= 0) reply.retry_after = std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000));
        } catch (const std::exception&) {
            // HTTP-date form is not honored.
        }
    }
    return reply;
}

MockTransport::MockTransport(nlohmann::json script) : script_(std::move(script)) {
    if (!script_.is_object()) throw ValidationError("mock script must be a JSON object keyed by paper id");
}

MockTransport MockTransport::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script " + path);
    try {
        return MockTransport(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("mock script " + path + ": " + e.what());
    }
}

CompletionReply MockTransport::send(const AgentConfig& agent, const CompletionRequest& request) {
    int attempt = 0;
    {
        std::lock_guard lock(mutex_);
        attempt = ++attempts_[{request.paper_id, agent.id}];
        calls_.push_back({request.paper_id, agent.id, request.dispatched_at});
    }

    const auto paper = script_.find(request.paper_id);
    if (paper == script_.end() || !paper->contains(agent.id)) {
        return {404, R"({"error":"no scripted response"})", std::nullopt};
    }
    const auto& entry = (*paper)[agent.id];

    std::string content;
    nlohmann::json usage;
    if (entry.is_string()) {
        content = entry.get<std::string>();
    } else {
        if (attempt <= entry.value("fail_attempts", 0)) {
            CompletionReply failure{entry.value("status", 500), R"({"error":"scripted failure"})", std::nullopt};
            if (entry.contains("retry_after_ms")) {
                failure.retry_after = std::chrono::milliseconds(entry["retry_after_ms"].get<std::int64_t>());
            }
            return failure;
        }
        content = entry.value("content", "");
        if (entry.contains("prompt_tokens") || entry.contains("completion_tokens")) {
            usage = {{"prompt_tokens", entry.value("prompt_tokens", 0)},
                     {"completion_tokens", entry.value("completion_tokens", 0)}};
        }
    }
    nlohmann::json body = {
        {"choices", nlohmann::json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}})},
    };
    if (!usage.is_null()) body["usage"] = usage;
    return {200, body.dump(), std::nullopt};
}

std::vector<MockTransport::Call> MockTransport::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    const double scale = std::pow(factor, attempt - 1);
    return std::chrono::milliseconds(static_cast<std::int64_t>(static_cast<double>(base_delay.count()) * scale));
}

namespace {

struct ProviderText {
    std::string content;
    std::optional<std::int64_t> prompt_tokens;
    std::optional<std::int64_t> completion_tokens;
};

ProviderText read_provider_body(const std::string& body) {
    const auto doc = nlohmann::json::parse(body);
    const auto& choices = doc.at("choices");
    if (!choices.is_array() || choices.empty()) throw std::runtime_error("'choices' is empty");
    const auto& content = choices.at(0).at("message").at("content");
    if (!content.is_string()) throw std::runtime_error("'message.content' is not a string");
    ProviderText out{content.get<std::string>(), std::nullopt, std::nullopt};
    if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
        if (usage->contains("prompt_tokens") && (*usage)["prompt_tokens"].is_number_integer()) {
            out.prompt_tokens = (*usage)["prompt_tokens"].get<std::int64_t>();
        }
        if (usage->contains("completion_tokens") && (*usage)["completion_tokens"].is_number_integer()) {
            out.completion_tokens = (*usage)["completion_tokens"].get<std::int64_t>();
        }
    }
    return out;
}

}  // namespace

AgentDecision classify_one(const AgentConfig& agent, std::string_view prompt, CompletionTransport& transport,
                           const ClassifyOptions& options) {
    if (text::trim(prompt).empty()) throw PreconditionError("prompt must not be empty");
    Clock& clock = options.clock ? *options.clock : SteadyClock::instance();

    AgentDecision decision;
    decision.run_id = options.run_id;
    decision.paper_id = options.paper_id;
    decision.agent_id = agent.id;

    CompletionRequest request;
    request.model = agent.model_name;
    request.prompt = std::string(prompt);
    request.temperature = agent.temperature;
    request.max_tokens = agent.max_output_tokens;
    request.run_id = options.run_id;
    request.paper_id = options.paper_id;
    request.agent_id = agent.id;

    const Instant started = clock.now();
    auto fail = [&](int attempts, std::string reason) {
        decision.verdict = Verdict::error;
        decision.justification = std::move(reason);
        decision.attempt_count = attempts;
        decision.latency_ms = (clock.now() - started).count();
        return decision;
    };

    std::string last_failure;
    const int max_attempts = std::max(1, options.retry.max_attempts);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        request.dispatched_at = options.limiter ? options.limiter->acquire() : clock.now();
        std::optional<std::chrono::milliseconds> hint;
        try {
            CompletionReply reply = transport.send(agent, request);
            if (reply.status >= 200 && reply.status < 300) {
                ProviderText provider;
                try {
                    provider = read_provider_body(reply.body);
                } catch (const std::exception& e) {
                    decision.raw_response = reply.body;
                    return fail(attempt, std::string("malformed provider response: ") + e.what());
                }
                const auto parsed = parse_response(provider.content);
                decision.verdict = parsed.verdict;
                decision.justification = parsed.justification;
                decision.raw_response = provider.content;
                decision.input_tokens = provider.prompt_tokens.value_or(estimate_tokens(prompt));
                decision.output_tokens = provider.completion_tokens.value_or(estimate_tokens(provider.content));
                decision.attempt_count = attempt;
                decision.latency_ms = (clock.now() - started).count();
                return decision;
            }
            last_failure = "HTTP " + std::to_string(reply.status);
            if (reply.status != 429 && reply.status < 500) {
                decision.raw_response = reply.body;
                return fail(attempt, "request rejected: " + last_failure);
            }
            hint = reply.retry_after;
        } catch (const TransportError& e) {
            last_failure = std::string("transport error: ") + e.what();
        }
        if (attempt < max_attempts) clock.sleep_for(hint.value_or(options.retry.delay_after(attempt)));
    }
    return fail(max_attempts, "request failed after " + std::to_string(max_attempts) + " attempts: " + last_failure);
}

}  // namespace litsieve
