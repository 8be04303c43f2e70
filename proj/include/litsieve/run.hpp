#pragma once

#include "litsieve/agents.hpp"
#include "litsieve/clock.hpp"
#include "litsieve/corpus.hpp"
#include "litsieve/prompting.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

namespace litsieve {

enum class RunStatus { pending, running, paused, complete, failed };

std::string_view to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view name);

/// Either the whole corpus or an explicit subset of paper ids.
struct PaperScope {
    bool all = true;
    std::vector<std::string> paper_ids;

    static PaperScope everything() { return {}; }
    static PaperScope subset(std::vector<std::string> ids) { return {false, std::move(ids)}; }

    friend bool operator==(const PaperScope&, const PaperScope&) = default;
};

struct ClassificationRun {
    std::string id;
    std::string corpus_id;
    std::string template_id;
    std::int64_t template_version = 0;
    std::vector<std::string> agent_ids;
    PaperScope scope;
    RunStatus status = RunStatus::pending;
    std::string started_at;
    std::string finished_at;
    std::string failure_reason;

    friend bool operator==(const ClassificationRun&, const ClassificationRun&) = default;
};

using PaperAgentPair = std::pair<std::string, std::string>;

/// Durable record of a run's decisions. `persist` must not return before the
/// decision survives a process crash.
class RunLedger {
public:
    virtual ~RunLedger() = default;
    virtual std::set<PaperAgentPair> persisted_pairs(const std::string& run_id) = 0;
    /// Throws ConflictError when (run, paper, agent) already exists.
    virtual void persist(const AgentDecision& decision) = 0;
    virtual void update_run(const ClassificationRun& run) = 0;
    virtual bool try_acquire_lease(const std::string& run_id, const std::string& owner) = 0;
    virtual void release_lease(const std::string& run_id, const std::string& owner) = 0;
    virtual std::vector<AgentDecision> decisions(const std::string& run_id) = 0;
};

class InMemoryRunLedger : public RunLedger {
public:
    std::set<PaperAgentPair> persisted_pairs(const std::string& run_id) override;
    void persist(const AgentDecision& decision) override;
    void update_run(const ClassificationRun& run) override;
    bool try_acquire_lease(const std::string& run_id, const std::string& owner) override;
    void release_lease(const std::string& run_id, const std::string& owner) override;
    std::vector<AgentDecision> decisions(const std::string& run_id) override;

    std::vector<ClassificationRun> run_updates() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<AgentDecision>> decisions_;
    std::map<std::string, std::string> leases_;
    std::vector<ClassificationRun> updates_;
};

/// Sliding-window limiter: at most `max_requests` grants in any window.
class RateLimiter {
public:
    RateLimiter(int max_requests, Clock& clock, std::chrono::milliseconds window = std::chrono::minutes(1));

    /// Blocks (on the clock) until a slot is free; returns the grant time.
    Instant acquire();

private:
    int max_requests_;
    Clock& clock_;
    std::chrono::milliseconds window_;
    std::mutex mutex_;
    std::deque<Instant> grants_;
};

struct ExecuteOptions {
    Clock* clock = nullptr;
    RetryPolicy retry;
    RenderOptions render;
    std::string lease_owner = "executor";
    /// Requesting stop leaves the run paused; finished decisions stay persisted.
    std::stop_token stop;
    /// Called once per persisted decision, serialized.
    std::function<void(const AgentDecision&)> on_decision;
};

struct ExecuteSummary {
    std::size_t issued = 0;
    std::size_t skipped = 0;
};

/// Classifies every (paper, agent) pair in scope that has no persisted
/// decision yet. Each agent gets its own worker pool and rate limiter; all
/// decisions are written through one serialized channel. The run ends
/// complete, paused (stop requested) or failed (with a reason).
ExecuteSummary execute_run(ClassificationRun& run, const Corpus* corpus, const PromptTemplate* tmpl,
                           const std::vector<AgentConfig>& agents, CompletionTransport& transport,
                           RunLedger& ledger, const ExecuteOptions& options = {});

struct AgentUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::size_t decisions = 0;

    friend bool operator==(const AgentUsage&, const AgentUsage&) = default;
};

struct RunUsage {
    std::int64_t total_input_tokens = 0;
    std::int64_t total_output_tokens = 0;
    std::map<std::string, AgentUsage> per_agent;
};

/// Throws PreconditionError when there are no decisions.
RunUsage run_usage(const std::vector<AgentDecision>& decisions);

}  // namespace litsieve
