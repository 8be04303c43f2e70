#pragma once

#include "litsieve/consensus.hpp"
#include "litsieve/corpus.hpp"
#include "litsieve/evaluation.hpp"
#include "litsieve/prompting.hpp"
#include "litsieve/run.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

struct sqlite3;

namespace litsieve {

/// Persisted outcome of applying a scheme to a set of runs.
struct ResultSet {
    std::string id;
    std::string scheme_id;
    std::vector<std::string> run_ids;
    std::string corpus_id;
    std::string created_at;
    std::vector<ConsensusResult> results;
};

/// Single-file transactional project store (SQLite, WAL, full sync) holding
/// corpora, templates, agents, runs, decisions, schemes, consensus results
/// and ground-truth labels. All methods are thread-safe; each call is one
/// transaction, so readers never see a half-applied write.
class Store : public RunLedger {
public:
    /// Opens or creates `<data_dir>/litsieve.db`. Throws IoError when the
    /// directory cannot be created or written.
    explicit Store(const std::filesystem::path& data_dir);
    ~Store() override;

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    const std::filesystem::path& data_dir() const { return data_dir_; }

    // corpora
    void ensure_corpus(const std::string& corpus_id);
    std::vector<std::string> list_corpora();
    Corpus load_corpus(const std::string& corpus_id);
    MergeReport merge_records(const std::string& corpus_id, const std::vector<PaperRecord>& records,
                              const std::string& origin);

    // templates: every save creates a new version
    PromptTemplate save_template(PromptTemplate tmpl);
    /// Latest version when `version` is 0.
    PromptTemplate load_template(const std::string& id, std::int64_t version = 0);
    std::vector<PromptTemplate> list_templates();
    std::vector<std::int64_t> template_versions(const std::string& id);

    // agents
    AgentConfig save_agent(const AgentConfig& agent);
    AgentConfig load_agent(const std::string& id);
    std::vector<AgentConfig> list_agents();

    // runs
    ClassificationRun create_run(ClassificationRun run);
    ClassificationRun load_run(const std::string& id);
    std::vector<ClassificationRun> list_runs();

    // RunLedger
    std::set<PaperAgentPair> persisted_pairs(const std::string& run_id) override;
    void persist(const AgentDecision& decision) override;
    void update_run(const ClassificationRun& run) override;
    /// A lease held by a dead process (or older than the TTL) is taken over.
    bool try_acquire_lease(const std::string& run_id, const std::string& owner) override;
    void release_lease(const std::string& run_id, const std::string& owner) override;
    std::vector<AgentDecision> decisions(const std::string& run_id) override;

    std::size_t decision_count(const std::string& run_id);

    // schemes and consensus results
    ConsensusScheme save_scheme(ConsensusScheme scheme);
    ConsensusScheme load_scheme(const std::string& id);
    std::vector<ConsensusScheme> list_schemes();
    ResultSet save_result_set(ResultSet set);
    ResultSet load_result_set(const std::string& id);

    // ground truth
    void put_labels(const std::string& corpus_id, const std::vector<GroundTruthLabel>& labels);
    std::vector<GroundTruthLabel> labels(const std::string& corpus_id);

    /// Seconds after which a lease whose owner process is alive is still
    /// considered abandoned.
    void set_lease_ttl(std::chrono::seconds ttl) { lease_ttl_ = ttl; }

private:
    class Statement;
    class Transaction;

    void migrate();
    std::string next_id(const std::string& prefix);
    Corpus load_corpus_locked(const std::string& corpus_id);
    ClassificationRun load_run_locked(const std::string& id);

    std::filesystem::path data_dir_;
    sqlite3* db_ = nullptr;
    std::recursive_mutex mutex_;
    std::chrono::seconds lease_ttl_{600};
};

}  // namespace litsieve
