#include "litsieve/run.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <thread>
#include <unordered_map>

namespace litsieve {

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::pending: return "pending";
        case RunStatus::running: return "running";
        case RunStatus::paused: return "paused";
        case RunStatus::complete: return "complete";
        case RunStatus::failed: return "failed";
    }
    return "failed";
}

RunStatus run_status_from_string(std::string_view name) {
    if (name == "pending") return RunStatus::pending;
    if (name == "running") return RunStatus::running;
    if (name == "paused") return RunStatus::paused;
    if (name == "complete") return RunStatus::complete;
    if (name == "failed") return RunStatus::failed;
    throw ValidationError("unknown run status '" + std::string(name) + "'");
}

std::set<PaperAgentPair> InMemoryRunLedger::persisted_pairs(const std::string& run_id) {
    std::lock_guard lock(mutex_);
    std::set<PaperAgentPair> out;
    if (auto it = decisions_.find(run_id); it != decisions_.end()) {
        for (const auto& d : it->second) out.emplace(d.paper_id, d.agent_id);
    }
    return out;
}

void InMemoryRunLedger::persist(const AgentDecision& decision) {
    std::lock_guard lock(mutex_);
    auto& list = decisions_[decision.run_id];
    for (const auto& d : list) {
        if (d.paper_id == decision.paper_id && d.agent_id == decision.agent_id) {
            throw ConflictError("decision already persisted for (" + decision.paper_id + ", " + decision.agent_id + ")");
        }
    }
    list.push_back(decision);
}

void InMemoryRunLedger::update_run(const ClassificationRun& run) {
    std::lock_guard lock(mutex_);
    updates_.push_back(run);
}

bool InMemoryRunLedger::try_acquire_lease(const std::string& run_id, const std::string& owner) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = leases_.try_emplace(run_id, owner);
    return inserted || it->second == owner;
}

void InMemoryRunLedger::release_lease(const std::string& run_id, const std::string& owner) {
    std::lock_guard lock(mutex_);
    if (auto it = leases_.find(run_id); it != leases_.end() && it->second == owner) leases_.erase(it);
}

std::vector<AgentDecision> InMemoryRunLedger::decisions(const std::string& run_id) {
    std::lock_guard lock(mutex_);
    auto it = decisions_.find(run_id);
    return it == decisions_.end() ? std::vector<AgentDecision>{} : it->second;
}

std::vector<ClassificationRun> InMemoryRunLedger::run_updates() const {
    std::lock_guard lock(mutex_);
    return updates_;
}

RateLimiter::RateLimiter(int max_requests, Clock& clock, std::chrono::milliseconds window)
    : max_requests_(max_requests), clock_(clock), window_(window) {
    if (max_requests_ < 1) throw ValidationError("rate limit must be at least one request per window");
}

Instant RateLimiter::acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
        const Instant now = clock_.now();
        while (!grants_.empty() && grants_.front() + window_ <= now) grants_.pop_front();
        if (static_cast<int>(grants_.size()) < max_requests_) {
            grants_.push_back(now);
            return now;
        }
        const Instant wake = grants_.front() + window_;
        lock.unlock();
        clock_.sleep_until(wake);
        lock.lock();
    }
}

namespace {

class LeaseGuard {
public:
    LeaseGuard(RunLedger& ledger, std::string run_id, std::string owner)
        : ledger_(ledger), run_id_(std::move(run_id)), owner_(std::move(owner)) {
        if (!ledger_.try_acquire_lease(run_id_, owner_)) {
            throw ConflictError("run '" + run_id_ + "' is already being executed");
        }
    }
    ~LeaseGuard() {
        try {
            ledger_.release_lease(run_id_, owner_);
        } catch (...) {
        }
    }
    LeaseGuard(const LeaseGuard&) = delete;
    LeaseGuard& operator=(const LeaseGuard&) = delete;

private:
    RunLedger& ledger_;
    std::string run_id_;
    std::string owner_;
};

}  // namespace

ExecuteSummary execute_run(ClassificationRun& run, const Corpus* corpus, const PromptTemplate* tmpl,
                           const std::vector<AgentConfig>& agents, CompletionTransport& transport,
                           RunLedger& ledger, const ExecuteOptions& options) {
    if (run.status == RunStatus::complete) throw PreconditionError("run '" + run.id + "' is already complete");
    Clock& clock = options.clock ? *options.clock : SteadyClock::instance();
    LeaseGuard lease(ledger, run.id, options.lease_owner);

    ExecuteSummary summary;
    auto finish = [&](RunStatus status, std::string reason = {}) {
        run.status = status;
        run.failure_reason = std::move(reason);
        if (status == RunStatus::complete || status == RunStatus::failed) run.finished_at = utc_timestamp_now();
        ledger.update_run(run);
        return summary;
    };

    if (!corpus) return finish(RunStatus::failed, "corpus '" + run.corpus_id + "' not found");
    if (!tmpl) return finish(RunStatus::failed, "template '" + run.template_id + "' not found");
    if (run.template_version != 0 && tmpl->version != run.template_version) {
        return finish(RunStatus::failed, "template version mismatch: run references " +
                                             std::to_string(run.template_version) + ", got " +
                                             std::to_string(tmpl->version));
    }

    std::vector<const AgentConfig*> run_agents;
    for (const auto& id : run.agent_ids) {
        const AgentConfig* found = nullptr;
        for (const auto& a : agents) {
            if (a.id == id) found = &a;
        }
        if (!found) return finish(RunStatus::failed, "agent '" + id + "' is not configured");
        if (auto problems = validate_agent_config(*found); !problems.empty()) {
            return finish(RunStatus::failed, "agent '" + id + "' is invalid: " + text::join(problems, "; "));
        }
        run_agents.push_back(found);
    }

    std::vector<const PaperRecord*> papers;
    if (run.scope.all) {
        for (const auto& p : corpus->papers) papers.push_back(&p);
    } else {
        std::vector<std::string> unknown;
        for (const auto& id : run.scope.paper_ids) {
            if (const auto* p = corpus->find(id)) papers.push_back(p);
            else unknown.push_back(id);
        }
        if (!unknown.empty()) return finish(RunStatus::failed, "unknown paper ids in scope: " + text::join(unknown, ", "));
    }

    std::vector<std::string> prompts;
    prompts.reserve(papers.size());
    try {
        for (const auto* p : papers) prompts.push_back(render_prompt(*tmpl, *p, options.render));
    } catch (const Error& e) {
        return finish(RunStatus::failed, e.what());
    }

    const auto done = ledger.persisted_pairs(run.id);
    struct AgentWork {
        const AgentConfig* agent;
        std::vector<std::size_t> pending;  // indices into papers
        std::unique_ptr<RateLimiter> limiter;
        std::atomic<std::size_t> next{0};
    };
    std::vector<std::unique_ptr<AgentWork>> work;
    std::size_t pending_total = 0;
    for (const auto* agent : run_agents) {
        auto w = std::make_unique<AgentWork>();
        w->agent = agent;
        w->limiter = std::make_unique<RateLimiter>(agent->requests_per_minute, clock);
        for (std::size_t i = 0; i < papers.size(); ++i) {
            if (done.contains({papers[i]->id, agent->id})) ++summary.skipped;
            else w->pending.push_back(i);
        }
        pending_total += w->pending.size();
        work.push_back(std::move(w));
    }

    if (run.started_at.empty()) run.started_at = utc_timestamp_now();
    run.status = RunStatus::running;
    run.failure_reason.clear();
    ledger.update_run(run);

    std::mutex channel;
    std::exception_ptr failure;
    std::atomic<bool> aborted{false};

    auto worker = [&](AgentWork& w) {
        while (!options.stop.stop_requested() && !aborted) {
            const std::size_t slot = w.next++;
            if (slot >= w.pending.size()) return;
            const std::size_t index = w.pending[slot];
            try {
                ClassifyOptions classify{
                    .clock = &clock,
                    .retry = options.retry,
                    .limiter = w.limiter.get(),
                    .run_id = run.id,
                    .paper_id = papers[index]->id,
                };
                AgentDecision decision = classify_one(*w.agent, prompts[index], transport, classify);
                std::lock_guard lock(channel);
                ledger.persist(decision);
                ++summary.issued;
                if (options.on_decision) options.on_decision(decision);
            } catch (...) {
                std::lock_guard lock(channel);
                if (!failure) failure = std::current_exception();
                aborted = true;
                return;
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        for (auto& w : work) {
            const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(w->agent->max_parallel_requests),
                                                        w->pending.size());
            for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker, std::ref(*w));
        }
    }

    if (failure) {
        std::string reason = "run aborted";
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            reason = std::string("run aborted: ") + e.what();
        } catch (...) {
        }
        return finish(RunStatus::failed, reason);
    }
    return finish(summary.issued == pending_total ? RunStatus::complete : RunStatus::paused);
}

RunUsage run_usage(const std::vector<AgentDecision>& decisions) {
    if (decisions.empty()) throw PreconditionError("run has no persisted decisions");
    RunUsage usage;
    for (const auto& d : decisions) {
        usage.total_input_tokens += d.input_tokens;
        usage.total_output_tokens += d.output_tokens;
        auto& agent = usage.per_agent[d.agent_id];
        agent.input_tokens += d.input_tokens;
        agent.output_tokens += d.output_tokens;
        ++agent.decisions;
    }
    return usage;
}

}  // namespace litsieve
