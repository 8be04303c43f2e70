#include "litsieve/consensus.hpp"
#include "litsieve/error.hpp"

#include "support.hpp"
#include "reference_table.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace litsieve;

namespace {

ConsensusScheme any_of(std::vector<std::string> agents) {
    ConsensusScheme s;
    s.agent_ids = std::move(agents);
    return s;
}

ConsensusScheme threshold(std::vector<std::string> agents, int k) {
    ConsensusScheme s;
    s.kind = SchemeKind::threshold;
    s.k = k;
    s.agent_ids = std::move(agents);
    return s;
}

const std::vector<Verdict> all_verdicts = {Verdict::include, Verdict::discard, Verdict::ambiguous, Verdict::error};

std::map<std::string, Verdict> random_row(std::mt19937& rng, const std::vector<std::string>& agents) {
    std::map<std::string, Verdict> row;
    for (const auto& a : agents) row[a] = all_verdicts[rng() % all_verdicts.size()];
    return row;
}

std::vector<AgentDecision> decisions_of(const std::string& paper, const std::map<std::string, Verdict>& row) {
    std::vector<AgentDecision> out;
    for (const auto& [agent, v] : row) {
        AgentDecision d;
        d.paper_id = paper;
        d.agent_id = agent;
        d.verdict = v;
        d.justification = "because " + agent;
        out.push_back(d);
    }
    return out;
}

}  // namespace

TEST_CASE("voting examples") {
    const auto any = any_of({"a", "b", "c"});
    auto r = consensus_vote("p", {{"a", Verdict::discard}, {"b", Verdict::discard}, {"c", Verdict::include}}, any);
    CHECK(r.final_verdict == Verdict::include);
    CHECK(r.including_agents == std::vector<std::string>{"c"});
    CHECK(r.discarding_agents == std::vector<std::string>{"a", "b"});
    CHECK_FALSE(r.flagged_for_review);

    r = consensus_vote("p", {{"a", Verdict::discard}, {"b", Verdict::discard}, {"c", Verdict::discard}}, any);
    CHECK(r.final_verdict == Verdict::discard);

    r = consensus_vote("p", {{"a", Verdict::discard}, {"b", Verdict::ambiguous}, {"c", Verdict::discard}}, any);
    CHECK(r.final_verdict == Verdict::include);
    CHECK(r.flagged_for_review);

    auto abstain = any;
    abstain.ambiguous_policy = AmbiguousPolicy::count_as_abstain;
    r = consensus_vote("p", {{"a", Verdict::discard}, {"b", Verdict::error}, {"c", Verdict::discard}}, abstain);
    CHECK(r.final_verdict == Verdict::discard);
    CHECK(r.abstaining_agents == std::vector<std::string>{"b"});
    CHECK(r.flagged_for_review);

    const auto two = threshold({"a", "b", "c"}, 2);
    CHECK(consensus_vote("p", {{"a", Verdict::include}, {"b", Verdict::discard}, {"c", Verdict::discard}}, two)
              .final_verdict == Verdict::discard);
    CHECK(consensus_vote("p", {{"a", Verdict::include}, {"b", Verdict::discard}, {"c", Verdict::include}}, two)
              .final_verdict == Verdict::include);
}

TEST_CASE("scheme validation and contract errors") {
    CHECK_THROWS_AS(validate_scheme(any_of({})), ValidationError);
    CHECK_THROWS_AS(validate_scheme(any_of({"a", "a"})), ValidationError);
    CHECK_THROWS_AS(validate_scheme(threshold({"a", "b"}, 3)), ValidationError);
    CHECK_THROWS_AS(validate_scheme(threshold({"a", "b"}, 0)), ValidationError);
    CHECK_NOTHROW(validate_scheme(threshold({"a", "b"}, 2)));
    CHECK_THROWS_AS(consensus_vote("p", {{"a", Verdict::include}}, any_of({"a", "b"})), ContractError);
    CHECK(consensus_vote("p", {{"a", Verdict::discard}, {"z", Verdict::include}}, any_of({"a"})).final_verdict ==
          Verdict::discard);
}

TEST_CASE("property: voting laws over random rows") {
    std::mt19937 rng(42);
    const std::vector<std::string> agents = {"a", "b", "c", "d", "e"};
    for (int i = 0; i < 3000; ++i) {
        const auto row = random_row(rng, agents);
        for (auto policy : {AmbiguousPolicy::count_as_include, AmbiguousPolicy::count_as_abstain}) {
            auto any = any_of(agents);
            any.ambiguous_policy = policy;
            auto t1 = threshold(agents, 1);
            t1.ambiguous_policy = policy;
            const auto r_any = consensus_vote("p", row, any);
            CHECK(r_any == consensus_vote("p", row, t1));

            // monotone in k
            Verdict prev = Verdict::include;
            for (int k = 1; k <= 5; ++k) {
                auto tk = threshold(agents, k);
                tk.ambiguous_policy = policy;
                const auto v = consensus_vote("p", row, tk).final_verdict;
                if (prev == Verdict::discard) CHECK(v == Verdict::discard);
                prev = v;
            }

            // adding agents never turns ANY_INCLUDE from include to discard
            auto fewer = any_of({"a", "b", "c"});
            fewer.ambiguous_policy = policy;
            if (consensus_vote("p", row, fewer).final_verdict == Verdict::include) {
                CHECK(r_any.final_verdict == Verdict::include);
            }

            // order of agents only permutes the lists
            auto shuffled = agents;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            auto any_shuffled = any_of(shuffled);
            any_shuffled.ambiguous_policy = policy;
            const auto r2 = consensus_vote("p", row, any_shuffled);
            CHECK(r2.final_verdict == r_any.final_verdict);
            CHECK(r2.flagged_for_review == r_any.flagged_for_review);
            CHECK(r2.including_agents.size() == r_any.including_agents.size());
        }
    }
}

TEST_CASE("property: ANY_INCLUDE recall dominates every agent") {
    std::mt19937 rng(7);
    const std::vector<std::string> agents = {"a", "b", "c", "d", "e"};
    for (int instance = 0; instance < 200; ++instance) {
        Corpus corpus;
        std::vector<std::vector<AgentDecision>> runs(1);
        std::vector<GroundTruthLabel> truth;
        for (int p = 0; p < 200; ++p) {
            const std::string id = "p" + std::to_string(p);
            corpus.papers.push_back(PaperRecord{.id = id, .title = id});
            auto d = decisions_of(id, random_row(rng, agents));
            runs[0].insert(runs[0].end(), d.begin(), d.end());
            truth.push_back({id, rng() % 4 == 0 ? Label::included : Label::discarded});
        }
        const auto results = apply_consensus(runs, any_of(agents), corpus);
        std::map<std::string, Verdict> consensus_pred;
        for (const auto& r : results) consensus_pred[r.paper_id] = r.final_verdict;
        const auto consensus_recall = metrics(confusion(consensus_pred, truth)).recall;
        const auto matrix = verdict_matrix(runs[0]);
        for (const auto& a : agents) {
            std::map<std::string, Verdict> pred;
            for (const auto& [paper, row] : matrix) pred[paper] = row.at(a);
            const auto recall = metrics(confusion(pred, truth)).recall;
            if (recall && consensus_recall) CHECK(*consensus_recall >= *recall);
        }
    }
}

TEST_CASE("apply_consensus: coverage, run precedence and justification") {
    Corpus corpus;
    corpus.papers = {PaperRecord{.id = "p1", .title = "One"}, PaperRecord{.id = "p2", .title = "Two"}};
    const auto scheme = any_of({"a", "b"});
    auto first = decisions_of("p1", {{"a", Verdict::discard}, {"b", Verdict::discard}});
    auto more = decisions_of("p2", {{"a", Verdict::discard}});
    first.insert(first.end(), more.begin(), more.end());

    try {
        apply_consensus({first}, scheme, corpus);
        FAIL("expected CoverageError");
    } catch (const CoverageError& e) {
        CHECK(std::string(e.what()).find("(p2, b)") != std::string::npos);
    }

    const auto second = decisions_of("p2", {{"b", Verdict::include}});
    auto override_p1 = decisions_of("p1", {{"a", Verdict::include}});
    const auto results = apply_consensus({first, second, override_p1}, scheme, corpus);
    REQUIRE(results.size() == 2);
    CHECK(results[0].final_verdict == Verdict::include);
    CHECK(results[0].including_agents == std::vector<std::string>{"a"});
    CHECK(results[0].combined_justification == "a (INCLUDE): because a\nb (DISCARD): because b");
    CHECK(results[1].final_verdict == Verdict::include);

    CHECK(apply_consensus({}, scheme, Corpus{}).empty());
}

TEST_CASE("best-agent selection on the reference F1 scores") {
    std::map<std::string, MetricsReport> reports;
    for (const auto& col : testing::reference_table()) {
        if (col.name.starts_with("consensus")) continue;
        reports[col.name] = metrics(col.counts);
    }
    auto sel = select_best_agents(reports, 50.0);
    CHECK(sel.agents == std::set<std::string>{"gemini-1.5-flash", "claude-3.5-sonnet", "gpt-4o"});
    CHECK_FALSE(sel.warning);

    CHECK(select_best_agents(reports, 0.0).agents.size() == 5);
    sel = select_best_agents(reports, 100.0);
    CHECK(sel.agents.empty());
    REQUIRE(sel.warning);
    CHECK(*sel.warning == "no agent has an F1 score above 100.00%");

    reports["silent"] = MetricsReport{};
    CHECK_FALSE(select_best_agents(reports, -1.0).agents.contains("silent"));
}

TEST_CASE("golden consensus tables") {
    const auto corpus = testing::golden_corpus();
    const auto expected = testing::load_json("golden/expected.json");
    std::vector<AgentDecision> decisions;
    for (const auto& [paper, row] : expected["decisions"].items()) {
        for (const auto& [agent, d] : row.items()) {
            AgentDecision x;
            x.paper_id = paper;
            x.agent_id = agent;
            x.verdict = verdict_from_string(d["verdict"].get<std::string>());
            decisions.push_back(x);
        }
    }
    const auto truth = testing::golden_labels();
    for (const auto& [name, scheme] : {std::pair{"any_include", any_of({"alpha", "beta", "gamma"})},
                                       std::pair{"threshold3", threshold({"alpha", "beta", "gamma"}, 3)}}) {
        const auto results = apply_consensus({decisions}, scheme, corpus);
        std::map<std::string, Verdict> pred;
        for (const auto& r : results) {
            const auto& e = expected[name]["results"][r.paper_id];
            CHECK(to_string(r.final_verdict) == e["final_verdict"].get<std::string>());
            CHECK(r.flagged_for_review == e["flagged"].get<bool>());
            CHECK(r.including_agents == e["including_agents"].get<std::vector<std::string>>());
            pred[r.paper_id] = r.final_verdict;
        }
        const auto cm = confusion(pred, truth);
        const auto& ec = expected[name]["confusion"];
        CHECK(cm == ConfusionMatrix{ec["tp"], ec["fp"], ec["tn"], ec["fn"]});
    }
}
