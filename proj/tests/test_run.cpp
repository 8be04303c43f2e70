#include "litsieve/error.hpp"
#include "litsieve/evaluation.hpp"
#include "litsieve/run.hpp"

#include "support.hpp"

#include <doctest.h>

#include <thread>

using namespace litsieve;
using nlohmann::json;

namespace {

ClassificationRun golden_run(std::string id = "run-1") {
    ClassificationRun run;
    run.id = std::move(id);
    run.corpus_id = "golden";
    run.template_id = "immersive-networks";
    run.template_version = 1;
    run.agent_ids = {"alpha", "beta", "gamma"};
    return run;
}

/// Answers DISCARD after a short real delay and records peak concurrency per agent.
class ConcurrencyProbe : public CompletionTransport {
public:
    CompletionReply send(const AgentConfig& agent, const CompletionRequest&) override {
        {
            std::lock_guard lock(mutex_);
            const int now = ++in_flight_[agent.id];
            peak_[agent.id] = std::max(peak_[agent.id], now);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(3));
        {
            std::lock_guard lock(mutex_);
            --in_flight_[agent.id];
        }
        return {200, R"({"choices":[{"message":{"content":"DISCARD. no"}}]})", std::nullopt};
    }
    std::map<std::string, int> peak() {
        std::lock_guard lock(mutex_);
        return peak_;
    }

private:
    std::mutex mutex_;
    std::map<std::string, int> in_flight_;
    std::map<std::string, int> peak_;
};

}  // namespace

TEST_CASE("rate limiter admits at most n grants per window") {
    ManualClock clock;
    RateLimiter limiter(3, clock, std::chrono::milliseconds(1000));
    std::vector<Instant> grants;
    for (int i = 0; i < 7; ++i) grants.push_back(limiter.acquire());
    CHECK(grants[0].count() == 0);
    CHECK(grants[2].count() == 0);
    CHECK(grants[3].count() == 1000);
    CHECK(grants[6].count() == 2000);
    CHECK_THROWS_AS(RateLimiter(0, clock), ValidationError);
}

TEST_CASE("golden run reproduces the scripted decisions") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    const auto agents = testing::golden_agents();
    const auto expected = testing::load_json("golden/expected.json");
    MockTransport mock(testing::load_json("golden/mock_script.json"));
    InMemoryRunLedger ledger;
    ManualClock clock;

    auto run = golden_run();
    const auto summary = execute_run(run, &corpus, &tmpl, agents, mock, ledger, {.clock = &clock});
    CHECK(run.status == RunStatus::complete);
    CHECK(summary.issued == 150);
    CHECK(summary.skipped == 0);
    CHECK_FALSE(run.started_at.empty());
    CHECK_FALSE(run.finished_at.empty());

    const auto decisions = ledger.decisions(run.id);
    REQUIRE(decisions.size() == 150);
    for (const auto& d : decisions) {
        const auto& e = expected["decisions"][d.paper_id][d.agent_id];
        INFO(d.paper_id << "/" << d.agent_id);
        CHECK(to_string(d.verdict) == e["verdict"].get<std::string>());
        CHECK(d.justification == e["justification"].get<std::string>());
        CHECK(d.input_tokens == e["input_tokens"].get<std::int64_t>());
        CHECK(d.output_tokens == e["output_tokens"].get<std::int64_t>());
        CHECK(d.attempt_count == e["attempt_count"].get<int>());
    }

    const auto usage = run_usage(decisions);
    CHECK(usage.total_input_tokens == expected["usage"]["total_input_tokens"].get<std::int64_t>());
    CHECK(usage.total_output_tokens == expected["usage"]["total_output_tokens"].get<std::int64_t>());
    for (const auto& a : {"alpha", "beta", "gamma"}) {
        CHECK(usage.per_agent.at(a).input_tokens == expected["usage"]["per_agent"][a]["input_tokens"].get<std::int64_t>());
        CHECK(usage.per_agent.at(a).decisions == 50);
    }
}

TEST_CASE("every pair issued exactly once and a second pass issues nothing") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    MockTransport mock(testing::load_json("golden/mock_script.json"));
    InMemoryRunLedger ledger;
    ManualClock clock;
    auto run = golden_run();
    execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger, {.clock = &clock});
    std::map<PaperAgentPair, int> seen;
    for (const auto& c : mock.calls()) ++seen[{c.paper_id, c.agent_id}];
    CHECK(seen.size() == 150);
    const auto expected = testing::load_json("golden/expected.json");
    for (const auto& [pair, n] : seen) {
        CHECK(n == expected["decisions"][pair.first][pair.second]["attempt_count"].get<int>());
    }

    CHECK_THROWS_AS(execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger, {.clock = &clock}),
                    PreconditionError);
}

TEST_CASE("resume issues only the missing pairs") {
    Corpus corpus;
    corpus.id = "c";
    json script;
    for (int i = 0; i < 10; ++i) {
        PaperRecord p;
        p.id = "q" + std::to_string(i);
        p.title = "Paper " + std::to_string(i);
        corpus.papers.push_back(p);
        script[p.id]["a"] = "INCLUDE. yes";
    }
    PromptTemplate tmpl;
    tmpl.id = "t";
    tmpl.topic_title = "Topic";
    AgentConfig agent;
    agent.id = "a";
    agent.endpoint_url = "http://mock.invalid/v1";
    agent.model_name = "m";

    ClassificationRun run;
    run.id = "r";
    run.corpus_id = "c";
    run.template_id = "t";
    run.agent_ids = {"a"};

    InMemoryRunLedger ledger;
    for (int i = 0; i < 3; ++i) {
        AgentDecision d;
        d.run_id = "r";
        d.paper_id = "q" + std::to_string(i);
        d.agent_id = "a";
        d.verdict = Verdict::discard;
        ledger.persist(d);
    }
    MockTransport mock(script);
    ManualClock clock;
    const auto summary = execute_run(run, &corpus, &tmpl, {agent}, mock, ledger, {.clock = &clock});
    CHECK(summary.issued == 7);
    CHECK(summary.skipped == 3);
    CHECK(mock.calls().size() == 7);
    for (const auto& c : mock.calls()) CHECK(c.paper_id >= "q3");
    CHECK(run.status == RunStatus::complete);
    CHECK(ledger.decisions("r").size() == 10);
}

TEST_CASE("empty scope completes at once") {
    Corpus corpus;
    corpus.id = "c";
    PromptTemplate tmpl;
    tmpl.topic_title = "T";
    ClassificationRun run;
    run.id = "r";
    run.scope = PaperScope::subset({});
    MockTransport mock(json::object());
    InMemoryRunLedger ledger;
    const auto summary = execute_run(run, &corpus, &tmpl, {}, mock, ledger);
    CHECK(summary.issued == 0);
    CHECK(run.status == RunStatus::complete);
    CHECK(mock.calls().empty());
}

TEST_CASE("missing inputs fail the run with a reason") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    MockTransport mock(json::object());
    InMemoryRunLedger ledger;

    auto run = golden_run("r1");
    execute_run(run, nullptr, &tmpl, testing::golden_agents(), mock, ledger);
    CHECK(run.status == RunStatus::failed);
    CHECK(run.failure_reason == "corpus 'golden' not found");

    run = golden_run("r2");
    execute_run(run, &corpus, nullptr, testing::golden_agents(), mock, ledger);
    CHECK(run.failure_reason == "template 'immersive-networks' not found");

    run = golden_run("r3");
    run.template_version = 2;
    execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger);
    CHECK(run.failure_reason.starts_with("template version mismatch"));

    run = golden_run("r4");
    run.agent_ids.push_back("delta");
    execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger);
    CHECK(run.failure_reason == "agent 'delta' is not configured");

    run = golden_run("r5");
    run.scope = PaperScope::subset({"p01", "nope"});
    execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger);
    CHECK(run.failure_reason == "unknown paper ids in scope: nope");
    CHECK(mock.calls().empty());
}

TEST_CASE("a held lease rejects a second executor") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    MockTransport mock(testing::load_json("golden/mock_script.json"));
    InMemoryRunLedger ledger;
    REQUIRE(ledger.try_acquire_lease("run-1", "other"));
    auto run = golden_run();
    CHECK_THROWS_AS(execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger), ConflictError);
    ledger.release_lease("run-1", "other");
}

TEST_CASE("stop request leaves the run paused with decisions kept") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    MockTransport mock(testing::load_json("golden/mock_script.json"));
    InMemoryRunLedger ledger;
    ManualClock clock;
    std::stop_source stop;
    std::size_t seen = 0;
    auto run = golden_run();
    ExecuteOptions options{.clock = &clock, .stop = stop.get_token(), .on_decision = [&](const AgentDecision&) {
                               if (++seen == 20) stop.request_stop();
                           }};
    execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger, options);
    CHECK(run.status == RunStatus::paused);
    const auto kept = ledger.decisions(run.id).size();
    CHECK(kept >= 20);
    CHECK(kept < 150);

    const auto summary = execute_run(run, &corpus, &tmpl, testing::golden_agents(), mock, ledger, {.clock = &clock});
    CHECK(summary.skipped == kept);
    CHECK(summary.issued == 150 - kept);
    CHECK(run.status == RunStatus::complete);
}

TEST_CASE("per-agent request rate stays under the ceiling in every window") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    auto agents = testing::golden_agents();
    agents[0].requests_per_minute = 10;
    agents[1].requests_per_minute = 25;
    agents[2].requests_per_minute = 60;
    MockTransport mock(testing::load_json("golden/mock_script.json"));
    InMemoryRunLedger ledger;
    ManualClock clock;
    auto run = golden_run();
    execute_run(run, &corpus, &tmpl, agents, mock, ledger, {.clock = &clock});
    REQUIRE(run.status == RunStatus::complete);

    std::map<std::string, std::vector<std::int64_t>> times;
    for (const auto& c : mock.calls()) times[c.agent_id].push_back(c.dispatched_at.count());
    for (const auto& agent : agents) {
        auto& t = times[agent.id];
        std::sort(t.begin(), t.end());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto in_window = std::upper_bound(t.begin(), t.end(), t[i] + 59999) - (t.begin() + i);
            CHECK(in_window <= agent.requests_per_minute);
        }
    }
    CHECK(times["alpha"].back() >= 4 * 60000);
}

TEST_CASE("concurrent requests per agent respect max_parallel_requests") {
    const auto corpus = testing::golden_corpus();
    const auto tmpl = testing::golden_template();
    auto agents = testing::golden_agents();
    agents[0].max_parallel_requests = 1;
    agents[1].max_parallel_requests = 2;
    agents[2].max_parallel_requests = 5;
    for (auto& a : agents) a.requests_per_minute = 1000;
    ConcurrencyProbe probe;
    InMemoryRunLedger ledger;
    auto run = golden_run();
    execute_run(run, &corpus, &tmpl, agents, probe, ledger);
    CHECK(run.status == RunStatus::complete);
    const auto peak = probe.peak();
    CHECK(peak.at("alpha") == 1);
    CHECK(peak.at("beta") <= 2);
    CHECK(peak.at("gamma") <= 5);
    CHECK(peak.at("gamma") >= 2);
}

TEST_CASE("run_usage totals and precondition") {
    CHECK_THROWS_AS(run_usage({}), PreconditionError);
    AgentDecision d;
    d.agent_id = "a";
    d.input_tokens = 532;
    d.output_tokens = 53;
    const auto u = run_usage({d, d});
    CHECK(u.total_input_tokens == 1064);
    CHECK(u.per_agent.at("a") == AgentUsage{1064, 106, 2});
}
