#pragma once

#include "litsieve/agents.hpp"
#include "litsieve/clock.hpp"
#include "litsieve/doi.hpp"
#include "litsieve/error.hpp"
#include "litsieve/store.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace litsieve {

inline constexpr std::string_view service_version = "1.0.0";

/// Application layer shared by the HTTP API and the CLI. Every method is a
/// thin composition of the library operations over one Store.
class Service {
public:
    /// `clock` drives backoff and rate limiting for runs (SteadyClock when null).
    Service(Store& store, CompletionTransport& transport, DoiResolver* resolver = nullptr, Clock* clock = nullptr);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Store& store() { return store_; }

    // corpus
    /// `{records_parsed, diagnostics, report}`.
    nlohmann::json ingest_bibtex(const std::string& corpus_id, std::string_view bytes, const std::string& origin);
    /// `{records_resolved, failures, report}`.
    nlohmann::json ingest_dois(const std::string& corpus_id, const std::vector<std::string>& dois);
    std::size_t put_labels_csv(const std::string& corpus_id, std::string_view csv);

    std::string render_preview(const PromptTemplate& tmpl, const std::string& corpus_id, const std::string& paper_id);

    // runs
    /// Validates references and stores a pending run.
    ClassificationRun create_run(ClassificationRun run);
    /// Executes in the calling thread until complete, paused or failed.
    ClassificationRun execute(const std::string& run_id, const ExecuteOptions& extra = {});
    /// Starts execution in a background thread. No-op when already active.
    void start(const std::string& run_id);
    /// Stops a background execution; the run ends paused.
    ClassificationRun pause(const std::string& run_id);
    /// Blocks until the background execution of `run_id` (if any) ends.
    void wait(const std::string& run_id);
    /// True while a background execution of `run_id` is in progress.
    bool active(const std::string& run_id);
    /// Restarts background execution of runs left in status running.
    std::vector<std::string> resume_interrupted();
    /// Run document plus `progress: {done, total}`.
    nlohmann::json run_status(const std::string& run_id);

    // consensus
    ResultSet apply_scheme(const std::string& scheme_id, const std::vector<std::string>& run_ids);

    // statistics and export; scope is a run id or a result-set id
    nlohmann::json stats(const std::string& scope);
    std::string export_csv(const std::string& scope);
    /// Metric columns: one per agent, plus "Consensus" for a result set.
    std::vector<std::pair<std::string, ConfusionMatrix>> evaluation_columns(const std::string& scope);

    static bool is_result_scope(const std::string& scope) { return scope.rfind("res-", 0) == 0; }

private:
    struct Scope;
    Scope resolve_scope(const std::string& scope);
    std::jthread detach_job(const std::string& run_id);
    std::size_t scope_size(const ClassificationRun& run, const Corpus& corpus);

    Store& store_;
    CompletionTransport& transport_;
    DoiResolver* resolver_;
    Clock* clock_;

    struct Job {
        std::shared_ptr<std::atomic<bool>> done;
        std::jthread thread;
    };

    std::mutex jobs_mutex_;
    std::map<std::string, Job> jobs_;
    std::atomic<std::uint64_t> owner_seq_{0};
};

/// JSON-over-HTTP front end for a Service.
class ApiServer {
public:
    explicit ApiServer(Service& service);
    ~ApiServer();

    /// Binds without serving; port 0 picks a free port. Returns the bound
    /// port or throws IoError.
    int bind(const std::string& host, int port);
    /// Serves until stop(); requires bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Splits "host:port" (default port 8080).
std::pair<std::string, int> parse_listen_addr(const std::string& addr);

/// `{"error": {"code", "message"}}`.
nlohmann::json error_document(const Error& e);
int http_status(ErrorCode code);

}  // namespace litsieve
