#include "litsieve/evaluation.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace litsieve {

std::string_view to_string(Label label) {
    return label == Label::included ? "INCLUDED" : "DISCARDED";
}

Label label_from_string(std::string_view name) {
    const std::string lower = text::to_lower_ascii(text::trim(name));
    if (lower == "included" || lower == "include" || lower == "1") return Label::included;
    if (lower == "discarded" || lower == "discard" || lower == "0") return Label::discarded;
    throw ValidationError("unknown ground-truth label '" + std::string(name) + "'");
}

std::map<std::string, Label> index_labels(const std::vector<GroundTruthLabel>& labels) {
    std::map<std::string, Label> out;
    for (const auto& l : labels) {
        if (!out.emplace(l.paper_id, l.label).second) {
            throw ValidationError("paper '" + l.paper_id + "' is labeled more than once");
        }
    }
    return out;
}

std::vector<GroundTruthLabel> parse_labels_csv(std::string_view csv, std::string_view source) {
    auto rows = text::csv::parse(csv);
    std::vector<GroundTruthLabel> labels;
    if (rows.empty()) return labels;
    const auto& header = rows.front();
    if (header.size() < 2 || text::trim(header[0]) != "paper_id" || text::trim(header[1]) != "label") {
        throw ValidationError("labels CSV must start with header 'paper_id,label'");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 1 && text::trim(row[0]).empty()) continue;
        if (row.size() < 2) throw ValidationError("labels CSV row " + std::to_string(r + 1) + " has too few fields");
        labels.push_back({std::string(text::trim(row[0])), label_from_string(row[1]), std::string(source)});
    }
    index_labels(labels);
    return labels;
}

ConfusionMatrix confusion(const std::map<std::string, Verdict>& predictions, const std::vector<GroundTruthLabel>& truth) {
    const auto labels = index_labels(truth);
    ConfusionMatrix cm;
    std::vector<std::string> missing;
    for (const auto& [paper, label] : labels) {
        auto it = predictions.find(paper);
        if (it == predictions.end()) {
            missing.push_back(paper);
            continue;
        }
        const bool include = predicts_include(it->second);
        if (label == Label::included) (include ? cm.tp : cm.fn)++;
        else (include ? cm.fp : cm.tn)++;
    }
    if (!missing.empty()) throw CoverageError("labeled papers without prediction: " + text::join(missing, ", "));
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    if (cm.tp < 0 || cm.fp < 0 || cm.tn < 0 || cm.fn < 0) throw PreconditionError("confusion counts must be non-negative");
    if (cm.total() == 0) throw PreconditionError("confusion matrix is empty");
    MetricsReport r;
    const auto d = [](std::int64_t v) { return static_cast<double>(v); };
    r.accuracy = 100.0 * d(cm.tp + cm.tn) / d(cm.total());
    if (cm.tp + cm.fp > 0) r.precision = 100.0 * d(cm.tp) / d(cm.tp + cm.fp);
    if (cm.tp + cm.fn > 0) r.recall = 100.0 * d(cm.tp) / d(cm.tp + cm.fn);
    if (r.precision && r.recall) {
        const double p = *r.precision / 100.0;
        const double q = *r.recall / 100.0;
        r.f1 = p + q == 0.0 ? 0.0 : 100.0 * 2.0 * p * q / (p + q);
    }
    return r;
}

std::string format_percent(const std::optional<double>& value) {
    if (!value) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *value);
    return buf;
}

std::string format_metrics_table(const std::vector<std::pair<std::string, ConfusionMatrix>>& columns) {
    std::size_t width = 9;
    for (const auto& [name, cm] : columns) width = std::max(width, name.size() + 2);

    std::ostringstream out;
    out << std::left << std::setw(8) << "Metric";
    for (const auto& [name, cm] : columns) out << std::right << std::setw(static_cast<int>(width)) << name;
    out << "\n";

    auto count_row = [&](const char* label, auto field) {
        out << std::left << std::setw(8) << label;
        for (const auto& [name, cm] : columns) out << std::right << std::setw(static_cast<int>(width)) << field(cm);
        out << "\n";
    };
    count_row("TP", [](const ConfusionMatrix& c) { return c.tp; });
    count_row("FP", [](const ConfusionMatrix& c) { return c.fp; });
    count_row("TN", [](const ConfusionMatrix& c) { return c.tn; });
    count_row("FN", [](const ConfusionMatrix& c) { return c.fn; });

    std::vector<MetricsReport> reports;
    for (const auto& [name, cm] : columns) reports.push_back(cm.total() > 0 ? metrics(cm) : MetricsReport{});
    auto metric_row = [&](const char* label, std::optional<double> MetricsReport::*field) {
        out << std::left << std::setw(8) << label;
        for (const auto& r : reports) out << std::right << std::setw(static_cast<int>(width)) << format_percent(r.*field);
        out << "\n";
    };
    metric_row("Acc.", &MetricsReport::accuracy);
    metric_row("Prec.", &MetricsReport::precision);
    metric_row("Rec.", &MetricsReport::recall);
    metric_row("F1", &MetricsReport::f1);
    return out.str();
}

VerdictMatrix verdict_matrix(const std::vector<AgentDecision>& decisions) {
    VerdictMatrix m;
    for (const auto& d : decisions) m[d.paper_id][d.agent_id] = d.verdict;
    return m;
}

namespace {

std::set<std::string> agents_of(const VerdictMatrix& verdicts) {
    std::set<std::string> agents;
    for (const auto& [paper, row] : verdicts) {
        for (const auto& [agent, v] : row) agents.insert(agent);
    }
    return agents;
}

void require_complete(const VerdictMatrix& verdicts, const std::set<std::string>& agents,
                      const std::vector<std::string>& papers) {
    std::vector<std::string> missing;
    for (const auto& paper : papers) {
        auto row = verdicts.find(paper);
        for (const auto& agent : agents) {
            if (row == verdicts.end() || !row->second.contains(agent)) missing.push_back("(" + paper + ", " + agent + ")");
        }
    }
    if (!missing.empty()) throw CoverageError("verdict matrix is incomplete; missing " + text::join(missing, ", "));
}

}  // namespace

MisjudgmentHistogram misjudgment_histogram(const VerdictMatrix& verdicts, const std::vector<GroundTruthLabel>& truth) {
    const auto labels = index_labels(truth);
    const auto agents = agents_of(verdicts);
    std::vector<std::string> papers;
    for (const auto& [paper, label] : labels) papers.push_back(paper);
    require_complete(verdicts, agents, papers);

    MisjudgmentHistogram h;
    for (const auto& [paper, label] : labels) {
        const auto& row = verdicts.at(paper);
        std::vector<std::string> wrong;
        for (const auto& [agent, v] : row) {
            if (predicts_include(v) != (label == Label::included)) wrong.push_back(agent);
        }
        if (wrong.empty()) continue;
        auto& side = label == Label::included ? h.false_exclusions : h.false_inclusions;
        auto& bucket = side[static_cast<int>(wrong.size())];
        ++bucket.papers;
        for (const auto& a : wrong) ++bucket.agent_involvement[a];
    }
    return h;
}

AgreementStats agreement_stats(const VerdictMatrix& verdicts) {
    const auto agent_set = agents_of(verdicts);
    if (agent_set.size() < 2) throw PreconditionError("agreement needs at least two agents");
    std::vector<std::string> papers;
    for (const auto& [paper, row] : verdicts) papers.push_back(paper);
    require_complete(verdicts, agent_set, papers);

    AgreementStats s;
    s.agents.assign(agent_set.begin(), agent_set.end());
    const std::size_t n = s.agents.size();
    std::vector<std::vector<std::int64_t>> same(n, std::vector<std::int64_t>(n, 0));
    for (const auto& [paper, row] : verdicts) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (row.at(s.agents[i]) == row.at(s.agents[j])) ++same[i][j];
            }
        }
    }
    const double total = static_cast<double>(papers.size());
    s.agreement.assign(n, std::vector<double>(n, 1.0));
    std::vector<std::int64_t> peer_sums(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s.agreement[i][j] = static_cast<double>(same[i][j]) / total;
            if (i != j) peer_sums[i] += same[i][j];
        }
        s.mean_agreement.push_back(static_cast<double>(peer_sums[i]) / (total * static_cast<double>(n - 1)));
    }
    // Integer sums share the same denominator, so the minimum is exact.
    const auto min_sum = *std::min_element(peer_sums.begin(), peer_sums.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (peer_sums[i] == min_sum) s.outliers.insert(s.agents[i]);
    }
    return s;
}

CostTimeEstimate estimate_cost(std::int64_t input_tokens, std::int64_t output_tokens, const Pricing& pricing) {
    if (pricing.input_per_million < 0 || pricing.output_per_million < 0) throw PreconditionError("prices must be non-negative");
    if (input_tokens < 0 || output_tokens < 0) throw PreconditionError("token counts must be non-negative");
    CostTimeEstimate e;
    e.input_tokens = input_tokens;
    e.output_tokens = output_tokens;
    e.total_cost = (static_cast<double>(input_tokens) * pricing.input_per_million +
                    static_cast<double>(output_tokens) * pricing.output_per_million) /
                   1e6;
    return e;
}

CostTimeEstimate estimate_cost(const RunUsage& usage, const std::map<std::string, Pricing>& pricing) {
    CostTimeEstimate e;
    for (const auto& [agent, u] : usage.per_agent) {
        auto it = pricing.find(agent);
        if (it == pricing.end()) throw ValidationError("no pricing configured for agent '" + agent + "'");
        const auto part = estimate_cost(u.input_tokens, u.output_tokens, it->second);
        e.input_tokens += part.input_tokens;
        e.output_tokens += part.output_tokens;
        e.total_cost += part.total_cost;
        e.per_agent_cost[agent] = part.total_cost;
    }
    return e;
}

double estimate_manual_effort(std::int64_t paper_count, double papers_per_minute) {
    if (!(papers_per_minute > 0)) throw PreconditionError("screening rate must be positive");
    if (paper_count < 0) throw PreconditionError("paper count must be non-negative");
    return static_cast<double>(paper_count) / papers_per_minute / 60.0;
}

}  // namespace litsieve
