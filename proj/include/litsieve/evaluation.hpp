#pragma once

#include "litsieve/agents.hpp"
#include "litsieve/run.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

enum class Label { included, discarded };

std::string_view to_string(Label label);
Label label_from_string(std::string_view name);

struct GroundTruthLabel {
    std::string paper_id;
    Label label = Label::discarded;
    std::string source = "human screening";

    friend bool operator==(const GroundTruthLabel&, const GroundTruthLabel&) = default;
};

/// paper id -> label. Throws ValidationError when a paper is labeled twice.
std::map<std::string, Label> index_labels(const std::vector<GroundTruthLabel>& labels);

/// CSV with header `paper_id,label`; labels INCLUDED/DISCARDED (case-insensitive,
/// INCLUDE/DISCARD and 1/0 also accepted).
std::vector<GroundTruthLabel> parse_labels_csv(std::string_view csv, std::string_view source = "human screening");

/// Binary reading of a verdict for scoring: only DISCARD counts as a discard.
inline bool predicts_include(Verdict v) { return v != Verdict::discard; }

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Unlabeled predictions are ignored; a labeled paper without a prediction is
/// a CoverageError.
ConfusionMatrix confusion(const std::map<std::string, Verdict>& predictions, const std::vector<GroundTruthLabel>& truth);

/// Percentages in [0, 100]; nullopt marks an undefined ratio.
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

MetricsReport metrics(const ConfusionMatrix& cm);

/// Two decimals, or "n/a" for undefined values.
std::string format_percent(const std::optional<double>& value);

/// Fixed-width block: one column per entry, rows TP/FP/TN/FN/Acc./Prec./Rec./F1.
std::string format_metrics_table(const std::vector<std::pair<std::string, ConfusionMatrix>>& columns);

/// paper id -> agent id -> verdict.
using VerdictMatrix = std::map<std::string, std::map<std::string, Verdict>>;

/// Builds the matrix from decisions; later entries overwrite earlier ones.
VerdictMatrix verdict_matrix(const std::vector<AgentDecision>& decisions);

struct MisjudgmentBucket {
    std::int64_t papers = 0;
    /// agent id -> number of papers in this bucket the agent got wrong.
    std::map<std::string, std::int64_t> agent_involvement;

    friend bool operator==(const MisjudgmentBucket&, const MisjudgmentBucket&) = default;
};

/// Papers grouped by how many agents misjudged them (buckets >= 1 only).
struct MisjudgmentHistogram {
    /// Labeled DISCARDED but included by the agents counted.
    std::map<int, MisjudgmentBucket> false_inclusions;
    /// Labeled INCLUDED but discarded by the agents counted.
    std::map<int, MisjudgmentBucket> false_exclusions;

    friend bool operator==(const MisjudgmentHistogram&, const MisjudgmentHistogram&) = default;
};

MisjudgmentHistogram misjudgment_histogram(const VerdictMatrix& verdicts, const std::vector<GroundTruthLabel>& truth);

struct AgreementStats {
    std::vector<std::string> agents;
    /// agreement[i][j]: fraction of papers where agents i and j gave the same verdict.
    std::vector<std::vector<double>> agreement;
    std::vector<double> mean_agreement;
    std::set<std::string> outliers;
};

/// Raw proportion agreement over every paper in the matrix. Agents with the
/// minimal mean agreement to their peers are flagged (ties flag all).
AgreementStats agreement_stats(const VerdictMatrix& verdicts);

struct Pricing {
    /// Currency per million tokens.
    double input_per_million = 0.0;
    double output_per_million = 0.0;
};

struct CostTimeEstimate {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    double total_cost = 0.0;
    std::map<std::string, double> per_agent_cost;
    /// Filled in separately via estimate_manual_effort.
    double manual_hours = 0.0;
};

CostTimeEstimate estimate_cost(std::int64_t input_tokens, std::int64_t output_tokens, const Pricing& pricing);

/// Every agent in `usage` needs a price pair.
CostTimeEstimate estimate_cost(const RunUsage& usage, const std::map<std::string, Pricing>& pricing);

/// Hours for a human screening `paper_count` papers at `papers_per_minute`.
double estimate_manual_effort(std::int64_t paper_count, double papers_per_minute = 2.0);

}  // namespace litsieve
