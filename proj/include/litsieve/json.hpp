#pragma once

// nlohmann::json conversions for the domain types. Field names follow the
// persisted/API documents.

#include "litsieve/agents.hpp"
#include "litsieve/bibtex.hpp"
#include "litsieve/consensus.hpp"
#include "litsieve/error.hpp"
#include "litsieve/corpus.hpp"
#include "litsieve/evaluation.hpp"
#include "litsieve/prompting.hpp"
#include "litsieve/run.hpp"

#include <nlohmann/json.hpp>

namespace litsieve {

void to_json(nlohmann::json& j, const PaperRecord& p);
void from_json(const nlohmann::json& j, PaperRecord& p);
void to_json(nlohmann::json& j, const ProvenanceEvent& e);
void from_json(const nlohmann::json& j, ProvenanceEvent& e);
void to_json(nlohmann::json& j, const MergeReport& r);
void to_json(nlohmann::json& j, const ParseDiagnostic& d);

void to_json(nlohmann::json& j, const Aspect& a);
void from_json(const nlohmann::json& j, Aspect& a);
void to_json(nlohmann::json& j, const PromptTemplate& t);
void from_json(const nlohmann::json& j, PromptTemplate& t);

void to_json(nlohmann::json& j, const AgentConfig& a);
void from_json(const nlohmann::json& j, AgentConfig& a);
void to_json(nlohmann::json& j, const AgentDecision& d);
void from_json(const nlohmann::json& j, AgentDecision& d);

void to_json(nlohmann::json& j, const PaperScope& s);
void from_json(const nlohmann::json& j, PaperScope& s);
void to_json(nlohmann::json& j, const ClassificationRun& r);
void from_json(const nlohmann::json& j, ClassificationRun& r);
void to_json(nlohmann::json& j, const RunUsage& u);

void to_json(nlohmann::json& j, const ConsensusScheme& s);
void from_json(const nlohmann::json& j, ConsensusScheme& s);
void to_json(nlohmann::json& j, const ConsensusResult& r);
void from_json(const nlohmann::json& j, ConsensusResult& r);

void to_json(nlohmann::json& j, const ConfusionMatrix& cm);
void to_json(nlohmann::json& j, const MetricsReport& m);
void to_json(nlohmann::json& j, const MisjudgmentHistogram& h);
void to_json(nlohmann::json& j, const AgreementStats& s);
void to_json(nlohmann::json& j, const CostTimeEstimate& e);
void to_json(nlohmann::json& j, const GroundTruthLabel& l);

/// Parses `text` and converts it, turning any JSON error into ValidationError.
template <typename T>
T parse_document(std::string_view text, std::string_view what) {
    try {
        return nlohmann::json::parse(text).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

}  // namespace litsieve
