#include "litsieve/consensus.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

#include <cstdio>
#include <set>

namespace litsieve {

std::string_view to_string(SchemeKind kind) {
    return kind == SchemeKind::any_include ? "ANY_INCLUDE" : "THRESHOLD";
}

SchemeKind scheme_kind_from_string(std::string_view name) {
    if (name == "ANY_INCLUDE") return SchemeKind::any_include;
    if (name == "THRESHOLD") return SchemeKind::threshold;
    throw ValidationError("unknown scheme kind '" + std::string(name) + "'");
}

std::string_view to_string(AmbiguousPolicy policy) {
    return policy == AmbiguousPolicy::count_as_include ? "COUNT_AS_INCLUDE" : "COUNT_AS_ABSTAIN";
}

AmbiguousPolicy ambiguous_policy_from_string(std::string_view name) {
    if (name == "COUNT_AS_INCLUDE") return AmbiguousPolicy::count_as_include;
    if (name == "COUNT_AS_ABSTAIN") return AmbiguousPolicy::count_as_abstain;
    throw ValidationError("unknown ambiguous policy '" + std::string(name) + "'");
}

void validate_scheme(const ConsensusScheme& scheme) {
    if (scheme.agent_ids.empty()) throw ValidationError("scheme agent_ids must not be empty");
    std::set<std::string> seen;
    for (const auto& a : scheme.agent_ids) {
        if (!seen.insert(a).second) throw ValidationError("scheme lists agent '" + a + "' twice");
    }
    if (scheme.kind == SchemeKind::threshold &&
        (scheme.k < 1 || scheme.k > static_cast<int>(scheme.agent_ids.size()))) {
        throw ValidationError("threshold k must lie in [1, " + std::to_string(scheme.agent_ids.size()) + "]");
    }
}

ConsensusResult consensus_vote(const std::string& paper_id, const std::map<std::string, Verdict>& verdicts,
                               const ConsensusScheme& scheme) {
    validate_scheme(scheme);
    ConsensusResult r;
    r.paper_id = paper_id;
    for (const auto& agent : scheme.agent_ids) {
        auto it = verdicts.find(agent);
        if (it == verdicts.end()) {
            throw ContractError("no verdict from agent '" + agent + "' for paper '" + paper_id + "'");
        }
        switch (it->second) {
            case Verdict::include:
                r.including_agents.push_back(agent);
                break;
            case Verdict::discard:
                r.discarding_agents.push_back(agent);
                break;
            case Verdict::ambiguous:
            case Verdict::error:
                r.flagged_for_review = true;
                if (scheme.ambiguous_policy == AmbiguousPolicy::count_as_include) r.including_agents.push_back(agent);
                else r.abstaining_agents.push_back(agent);
                break;
        }
    }
    r.final_verdict = static_cast<int>(r.including_agents.size()) >= scheme.quorum() ? Verdict::include : Verdict::discard;
    return r;
}

std::vector<ConsensusResult> apply_consensus(const std::vector<std::vector<AgentDecision>>& runs,
                                             const ConsensusScheme& scheme, const Corpus& corpus) {
    validate_scheme(scheme);
    const std::set<std::string> participants(scheme.agent_ids.begin(), scheme.agent_ids.end());

    std::map<std::string, std::map<std::string, const AgentDecision*>> latest;
    for (const auto& run : runs) {
        for (const auto& d : run) {
            if (participants.contains(d.agent_id)) latest[d.paper_id][d.agent_id] = &d;
        }
    }

    std::vector<std::string> missing;
    for (const auto& paper : corpus.papers) {
        auto row = latest.find(paper.id);
        for (const auto& agent : scheme.agent_ids) {
            if (row == latest.end() || !row->second.contains(agent)) missing.push_back("(" + paper.id + ", " + agent + ")");
        }
    }
    if (!missing.empty()) {
        throw CoverageError(std::to_string(missing.size()) + " (paper, agent) pairs have no decision: " +
                            text::join(missing, ", "));
    }

    std::vector<ConsensusResult> results;
    results.reserve(corpus.papers.size());
    for (const auto& paper : corpus.papers) {
        const auto& row = latest.at(paper.id);
        std::map<std::string, Verdict> verdicts;
        for (const auto& [agent, d] : row) verdicts[agent] = d->verdict;
        ConsensusResult r = consensus_vote(paper.id, verdicts, scheme);
        std::vector<std::string> lines;
        for (const auto& agent : scheme.agent_ids) {
            const auto* d = row.at(agent);
            lines.push_back(agent + " (" + std::string(to_string(d->verdict)) + "): " + d->justification);
        }
        r.combined_justification = text::join(lines, "\n");
        results.push_back(std::move(r));
    }
    return results;
}

AgentSelection select_best_agents(const std::map<std::string, MetricsReport>& per_agent_metrics, double f1_threshold) {
    AgentSelection out;
    for (const auto& [agent, report] : per_agent_metrics) {
        if (report.f1 && *report.f1 > f1_threshold) out.agents.insert(agent);
    }
    if (out.agents.empty()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "no agent has an F1 score above %.2f%%", f1_threshold);
        out.warning = buf;
    }
    return out;
}

}  // namespace litsieve
