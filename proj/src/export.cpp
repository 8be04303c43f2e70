#include "litsieve/export.hpp"

#include "litsieve/text.hpp"

#include <map>
#include <set>

namespace litsieve {

namespace {

using DecisionIndex = std::map<std::string, std::map<std::string, const AgentDecision*>>;

DecisionIndex index_decisions(const std::vector<AgentDecision>& decisions) {
    DecisionIndex index;
    for (const auto& d : decisions) index[d.paper_id][d.agent_id] = &d;
    return index;
}

std::vector<std::string> row_prefix(const Corpus& corpus, const std::string& paper_id) {
    const PaperRecord* paper = corpus.find(paper_id);
    return {paper_id, paper ? paper->title : "", paper && paper->doi ? *paper->doi : ""};
}

void append_agent_columns(std::vector<std::string>& fields, const std::vector<std::string>& agent_ids,
                          const DecisionIndex& index, const std::string& paper_id) {
    const auto row = index.find(paper_id);
    for (const auto& agent : agent_ids) {
        const AgentDecision* d = nullptr;
        if (row != index.end()) {
            if (auto it = row->second.find(agent); it != row->second.end()) d = it->second;
        }
        fields.push_back(d ? std::string(to_string(d->verdict)) : "");
        fields.push_back(d ? d->justification : "");
    }
}

}  // namespace

std::string export_header(const std::vector<std::string>& agent_ids) {
    std::vector<std::string> header = {"paper_id", "title", "doi", "final_verdict", "flagged"};
    for (const auto& agent : agent_ids) {
        header.push_back("agent:" + agent + ":verdict");
        header.push_back("agent:" + agent + ":justification");
    }
    return text::csv::row(header);
}

std::string export_consensus_csv(const Corpus& corpus, const std::vector<std::string>& agent_ids,
                                 const std::vector<AgentDecision>& decisions,
                                 const std::vector<ConsensusResult>& results) {
    const auto index = index_decisions(decisions);
    std::map<std::string, const ConsensusResult*> sorted;
    for (const auto& r : results) sorted[r.paper_id] = &r;

    std::string out = export_header(agent_ids);
    for (const auto& [paper_id, result] : sorted) {
        auto fields = row_prefix(corpus, paper_id);
        fields.push_back(std::string(to_string(result->final_verdict)));
        fields.push_back(result->flagged_for_review ? "true" : "false");
        append_agent_columns(fields, agent_ids, index, paper_id);
        out += text::csv::row(fields);
    }
    return out;
}

std::string export_run_csv(const Corpus& corpus, const std::vector<std::string>& agent_ids,
                           const std::vector<AgentDecision>& decisions) {
    const auto index = index_decisions(decisions);
    std::string out = export_header(agent_ids);
    for (const auto& [paper_id, _] : index) {
        auto fields = row_prefix(corpus, paper_id);
        fields.push_back("");
        fields.push_back("");
        append_agent_columns(fields, agent_ids, index, paper_id);
        out += text::csv::row(fields);
    }
    return out;
}

}  // namespace litsieve
