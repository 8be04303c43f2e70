#pragma once

#include "litsieve/agents.hpp"
#include "litsieve/consensus.hpp"
#include "litsieve/corpus.hpp"

#include <string>
#include <vector>

namespace litsieve {

/// Header: paper_id,title,doi,final_verdict,flagged, then one verdict and one
/// justification column per agent in `agent_ids` order. Rows are sorted by
/// paper id, CRLF-terminated.
std::string export_header(const std::vector<std::string>& agent_ids);

/// One row per consensus result. `decisions` supplies the per-agent columns
/// (later entries win for a repeated pair).
std::string export_consensus_csv(const Corpus& corpus, const std::vector<std::string>& agent_ids,
                                 const std::vector<AgentDecision>& decisions,
                                 const std::vector<ConsensusResult>& results);

/// One row per paper with at least one decision; final_verdict and flagged
/// stay empty.
std::string export_run_csv(const Corpus& corpus, const std::vector<std::string>& agent_ids,
                           const std::vector<AgentDecision>& decisions);

}  // namespace litsieve
