#include "litsieve/json.hpp"

namespace litsieve {

using nlohmann::json;

namespace {

template <typename T>
json optional_to_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

}  // namespace

void to_json(json& j, const PaperRecord& p) {
    j = {
        {"id", p.id},
        {"title", p.title},
        {"abstract", p.abstract},
        {"authors", p.authors},
        {"year", optional_to_json(p.year)},
        {"venue", optional_to_json(p.venue)},
        {"doi", optional_to_json(p.doi)},
        {"source", p.source},
        {"entry_kind", to_string(p.entry_kind)},
    };
}

void from_json(const json& j, PaperRecord& p) {
    p.id = j.value("id", "");
    p.title = j.at("title").get<std::string>();
    p.abstract = j.value("abstract", "");
    p.authors = j.value("authors", std::vector<std::string>{});
    p.year = optional_from_json<int>(j, "year");
    p.venue = optional_from_json<std::string>(j, "venue");
    p.doi = optional_from_json<std::string>(j, "doi");
    p.source = j.value("source", "");
    p.entry_kind = entry_kind_from_string(j.value("entry_kind", "other"));
}

void to_json(json& j, const ProvenanceEvent& e) {
    j = {
        {"origin", e.origin},
        {"timestamp", e.timestamp},
        {"received", e.received},
        {"added", e.added},
        {"duplicates_removed", e.duplicates_removed},
        {"non_papers_excluded", e.non_papers_excluded},
    };
}

void from_json(const json& j, ProvenanceEvent& e) {
    e.origin = j.value("origin", "");
    e.timestamp = j.value("timestamp", "");
    e.received = j.value("received", std::size_t{0});
    e.added = j.value("added", std::size_t{0});
    e.duplicates_removed = j.value("duplicates_removed", std::size_t{0});
    e.non_papers_excluded = j.value("non_papers_excluded", std::size_t{0});
}

void to_json(json& j, const MergeReport& r) {
    j = {
        {"added", r.added},
        {"duplicates_removed", r.duplicates_removed},
        {"non_papers_excluded", r.non_papers_excluded},
        {"missing_abstract", r.missing_abstract},
        {"added_ids", r.added_ids},
        {"duplicate_ids", r.duplicate_ids},
    };
}

void to_json(json& j, const ParseDiagnostic& d) {
    j = {{"byte_offset", d.byte_offset}, {"line", d.line}, {"entry_key", d.entry_key}, {"message", d.message}};
}

void to_json(json& j, const Aspect& a) {
    j = {{"name", a.name}, {"example_terms", a.example_terms}};
}

void from_json(const json& j, Aspect& a) {
    a.name = j.at("name").get<std::string>();
    a.example_terms = j.value("example_terms", std::vector<std::string>{});
}

void to_json(json& j, const PromptTemplate& t) {
    j = {
        {"id", t.id},
        {"role_preamble", t.role_preamble},
        {"topic_title", t.topic_title},
        {"aspects", t.aspects},
        {"exclusion_rules", t.exclusion_rules},
        {"inclusion_rules", t.inclusion_rules},
        {"output_instruction", t.output_instruction},
        {"version", t.version},
    };
}

void from_json(const json& j, PromptTemplate& t) {
    t = PromptTemplate{};
    t.id = j.value("id", "");
    t.role_preamble = j.value("role_preamble", std::string(PromptTemplate::default_role_preamble));
    t.topic_title = j.value("topic_title", "");
    t.aspects = j.value("aspects", std::vector<Aspect>{});
    t.exclusion_rules = j.value("exclusion_rules", std::vector<std::string>{});
    t.inclusion_rules = j.value("inclusion_rules", std::vector<std::string>{});
    t.output_instruction = j.value("output_instruction", std::string(PromptTemplate::default_output_instruction));
    t.version = j.value("version", std::int64_t{0});
}

void to_json(json& j, const AgentConfig& a) {
    j = {
        {"id", a.id},
        {"display_name", a.display_name},
        {"endpoint_url", a.endpoint_url},
        {"api_key_ref", a.api_key_ref},
        {"model_name", a.model_name},
        {"temperature", a.temperature},
        {"max_output_tokens", a.max_output_tokens},
        {"max_parallel_requests", a.max_parallel_requests},
        {"requests_per_minute", a.requests_per_minute},
    };
}

void from_json(const json& j, AgentConfig& a) {
    a = AgentConfig{};
    a.id = j.at("id").get<std::string>();
    a.display_name = j.value("display_name", a.id);
    a.endpoint_url = j.value("endpoint_url", "");
    a.api_key_ref = j.value("api_key_ref", "");
    a.model_name = j.value("model_name", "");
    a.temperature = j.value("temperature", 0.0);
    a.max_output_tokens = j.value("max_output_tokens", a.max_output_tokens);
    a.max_parallel_requests = j.value("max_parallel_requests", a.max_parallel_requests);
    a.requests_per_minute = j.value("requests_per_minute", a.requests_per_minute);
}

void to_json(json& j, const AgentDecision& d) {
    j = {
        {"run_id", d.run_id},
        {"paper_id", d.paper_id},
        {"agent_id", d.agent_id},
        {"verdict", to_string(d.verdict)},
        {"justification", d.justification},
        {"raw_response", d.raw_response},
        {"input_tokens", d.input_tokens},
        {"output_tokens", d.output_tokens},
        {"latency_ms", d.latency_ms},
        {"attempt_count", d.attempt_count},
    };
}

void from_json(const json& j, AgentDecision& d) {
    d.run_id = j.value("run_id", "");
    d.paper_id = j.at("paper_id").get<std::string>();
    d.agent_id = j.at("agent_id").get<std::string>();
    d.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    d.justification = j.value("justification", "");
    d.raw_response = j.value("raw_response", "");
    d.input_tokens = j.value("input_tokens", std::int64_t{0});
    d.output_tokens = j.value("output_tokens", std::int64_t{0});
    d.latency_ms = j.value("latency_ms", std::int64_t{0});
    d.attempt_count = j.value("attempt_count", 1);
}

void to_json(json& j, const PaperScope& s) {
    if (s.all) j = "ALL";
    else j = s.paper_ids;
}

void from_json(const json& j, PaperScope& s) {
    if (j.is_string()) {
        if (j.get<std::string>() != "ALL") throw ValidationError("scope must be \"ALL\" or a list of paper ids");
        s = PaperScope::everything();
    } else {
        s = PaperScope::subset(j.get<std::vector<std::string>>());
    }
}

void to_json(json& j, const ClassificationRun& r) {
    j = {
        {"id", r.id},
        {"corpus_id", r.corpus_id},
        {"template_id", r.template_id},
        {"template_version", r.template_version},
        {"agent_ids", r.agent_ids},
        {"scope", r.scope},
        {"status", to_string(r.status)},
        {"started_at", r.started_at},
        {"finished_at", r.finished_at},
        {"failure_reason", r.failure_reason},
    };
}

void from_json(const json& j, ClassificationRun& r) {
    r.id = j.value("id", "");
    r.corpus_id = j.value("corpus_id", "");
    r.template_id = j.value("template_id", "");
    r.template_version = j.value("template_version", std::int64_t{0});
    r.agent_ids = j.value("agent_ids", std::vector<std::string>{});
    r.scope = j.contains("scope") ? j["scope"].get<PaperScope>() : PaperScope::everything();
    r.status = run_status_from_string(j.value("status", "pending"));
    r.started_at = j.value("started_at", "");
    r.finished_at = j.value("finished_at", "");
    r.failure_reason = j.value("failure_reason", "");
}

void to_json(json& j, const RunUsage& u) {
    json per_agent = json::object();
    for (const auto& [agent, a] : u.per_agent) {
        per_agent[agent] = {{"input_tokens", a.input_tokens}, {"output_tokens", a.output_tokens}, {"decisions", a.decisions}};
    }
    j = {
        {"total_input_tokens", u.total_input_tokens},
        {"total_output_tokens", u.total_output_tokens},
        {"per_agent", per_agent},
    };
}

void to_json(json& j, const ConsensusScheme& s) {
    j = {
        {"id", s.id},
        {"kind", to_string(s.kind)},
        {"k", s.quorum()},
        {"agent_ids", s.agent_ids},
        {"ambiguous_policy", to_string(s.ambiguous_policy)},
    };
}

void from_json(const json& j, ConsensusScheme& s) {
    s.id = j.value("id", "");
    s.kind = scheme_kind_from_string(j.value("kind", "ANY_INCLUDE"));
    s.k = j.value("k", 1);
    s.agent_ids = j.at("agent_ids").get<std::vector<std::string>>();
    s.ambiguous_policy = ambiguous_policy_from_string(j.value("ambiguous_policy", "COUNT_AS_INCLUDE"));
}

void to_json(json& j, const ConsensusResult& r) {
    j = {
        {"paper_id", r.paper_id},
        {"final_verdict", to_string(r.final_verdict)},
        {"including_agents", r.including_agents},
        {"discarding_agents", r.discarding_agents},
        {"abstaining_agents", r.abstaining_agents},
        {"flagged_for_review", r.flagged_for_review},
        {"combined_justification", r.combined_justification},
    };
}

void from_json(const json& j, ConsensusResult& r) {
    r.paper_id = j.at("paper_id").get<std::string>();
    r.final_verdict = verdict_from_string(j.at("final_verdict").get<std::string>());
    r.including_agents = j.value("including_agents", std::vector<std::string>{});
    r.discarding_agents = j.value("discarding_agents", std::vector<std::string>{});
    r.abstaining_agents = j.value("abstaining_agents", std::vector<std::string>{});
    r.flagged_for_review = j.value("flagged_for_review", false);
    r.combined_justification = j.value("combined_justification", "");
}

void to_json(json& j, const ConfusionMatrix& cm) {
    j = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

void to_json(json& j, const MetricsReport& m) {
    j = {
        {"accuracy", optional_to_json(m.accuracy)},
        {"precision", optional_to_json(m.precision)},
        {"recall", optional_to_json(m.recall)},
        {"f1", optional_to_json(m.f1)},
    };
}

namespace {

json buckets_to_json(const std::map<int, MisjudgmentBucket>& side) {
    json out = json::array();
    for (const auto& [wrong, bucket] : side) {
        out.push_back({{"wrong_agents", wrong}, {"papers", bucket.papers}, {"agent_involvement", bucket.agent_involvement}});
    }
    return out;
}

}  // namespace

void to_json(json& j, const MisjudgmentHistogram& h) {
    j = {
        {"false_inclusions", buckets_to_json(h.false_inclusions)},
        {"false_exclusions", buckets_to_json(h.false_exclusions)},
    };
}

void to_json(json& j, const AgreementStats& s) {
    j = {
        {"agents", s.agents},
        {"agreement", s.agreement},
        {"mean_agreement", s.mean_agreement},
        {"outliers", s.outliers},
    };
}

void to_json(json& j, const CostTimeEstimate& e) {
    j = {
        {"input_tokens", e.input_tokens},
        {"output_tokens", e.output_tokens},
        {"total_cost", e.total_cost},
        {"per_agent_cost", e.per_agent_cost},
        {"manual_hours", e.manual_hours},
    };
}

void to_json(json& j, const GroundTruthLabel& l) {
    j = {{"paper_id", l.paper_id}, {"label", to_string(l.label)}, {"source", l.source}};
}

}  // namespace litsieve
