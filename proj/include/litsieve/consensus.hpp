#pragma once

#include "litsieve/agents.hpp"
#include "litsieve/corpus.hpp"
#include "litsieve/evaluation.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

enum class SchemeKind {
    /// Include when at least one agent includes; discard only on unanimous discard.
    any_include,
    /// Include when at least `k` agents include.
    threshold,
};

enum class AmbiguousPolicy {
    count_as_include,
    count_as_abstain,
};

std::string_view to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(std::string_view name);
std::string_view to_string(AmbiguousPolicy policy);
AmbiguousPolicy ambiguous_policy_from_string(std::string_view name);

struct ConsensusScheme {
    std::string id;
    SchemeKind kind = SchemeKind::any_include;
    int k = 1;
    std::vector<std::string> agent_ids;
    AmbiguousPolicy ambiguous_policy = AmbiguousPolicy::count_as_include;

    /// Inclusion quorum: 1 for any_include, k otherwise.
    int quorum() const { return kind == SchemeKind::any_include ? 1 : k; }

    friend bool operator==(const ConsensusScheme&, const ConsensusScheme&) = default;
};

/// Throws ValidationError for an empty or repeated agent list or k outside [1, |agents|].
void validate_scheme(const ConsensusScheme& scheme);

struct ConsensusResult {
    std::string paper_id;
    /// INCLUDE or DISCARD.
    Verdict final_verdict = Verdict::discard;
    /// In scheme order.
    std::vector<std::string> including_agents;
    std::vector<std::string> discarding_agents;
    /// AMBIGUOUS/ERROR voters left out of the tally under count_as_abstain.
    std::vector<std::string> abstaining_agents;
    bool flagged_for_review = false;
    /// "agent: justification" lines, scheme order.
    std::string combined_justification;

    friend bool operator==(const ConsensusResult&, const ConsensusResult&) = default;
};

/// `verdicts` must hold an entry for every scheme agent (extra agents are
/// ignored); a missing entry is a ContractError.
ConsensusResult consensus_vote(const std::string& paper_id, const std::map<std::string, Verdict>& verdicts,
                               const ConsensusScheme& scheme);

/// Applies the scheme to every paper of the corpus using the decisions of the
/// selected runs (a later run overrides an earlier one for the same pair).
/// Throws CoverageError naming the missing (paper, agent) pairs.
std::vector<ConsensusResult> apply_consensus(const std::vector<std::vector<AgentDecision>>& runs,
                                             const ConsensusScheme& scheme, const Corpus& corpus);

struct AgentSelection {
    std::set<std::string> agents;
    std::optional<std::string> warning;
};

/// Agents whose F1 is strictly above `f1_threshold` (percent). Undefined F1
/// never qualifies.
AgentSelection select_best_agents(const std::map<std::string, MetricsReport>& per_agent_metrics, double f1_threshold);

}  // namespace litsieve
