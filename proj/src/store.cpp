#include "litsieve/store.hpp"

#include "litsieve/error.hpp"
#include "litsieve/json.hpp"

#include <sqlite3.h>

#include <cerrno>
#include <csignal>
#include <ctime>
#include <fstream>
#include <unistd.h>

namespace litsieve {

using nlohmann::json;

class Store::Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
            throw IoError(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db) + " in: " + sql);
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int index, const std::string& value) {
        sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Statement& bind(int index, std::int64_t value) {
        sqlite3_bind_int64(stmt_, index, value);
        return *this;
    }

    /// True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        if (rc == SQLITE_CONSTRAINT) throw ConflictError(std::string("constraint violated: ") + sqlite3_errmsg(db_));
        throw IoError(std::string("sqlite step failed: ") + sqlite3_errmsg(db_));
    }

    void run() {
        while (step()) {
        }
    }

    std::string text(int col) const {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }
    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

class Store::Transaction {
public:
    explicit Transaction(sqlite3* db) : db_(db) { exec("BEGIN IMMEDIATE"); }
    ~Transaction() {
        if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
    void commit() {
        exec("COMMIT");
        done_ = true;
    }

private:
    void exec(const char* sql) {
        char* err = nullptr;
        if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
            std::string message = err ? err : "unknown error";
            sqlite3_free(err);
            throw IoError(std::string("sqlite: ") + message);
        }
    }

    sqlite3* db_;
    bool done_ = false;
};

namespace {

void exec_script(sqlite3* db, const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string message = err ? err : "unknown error";
        sqlite3_free(err);
        throw IoError("sqlite: " + message);
    }
}

std::int64_t unix_now() { return static_cast<std::int64_t>(std::time(nullptr)); }

bool process_alive(std::int64_t pid) {
    if (pid <= 0) return false;
    return ::kill(static_cast<pid_t>(pid), 0) == 0 || errno != ESRCH;
}

}  // namespace

Store::Store(const std::filesystem::path& data_dir) : data_dir_(data_dir) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir_, ec);
    if (ec) throw IoError("cannot create data directory " + data_dir_.string() + ": " + ec.message());
    {
        const auto probe = data_dir_ / ".write-probe";
        std::ofstream out(probe);
        if (!out) throw IoError("data directory " + data_dir_.string() + " is not writable");
        out.close();
        std::filesystem::remove(probe, ec);
    }
    const auto file = data_dir_ / "litsieve.db";
    if (sqlite3_open_v2(file.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
        std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        throw IoError("cannot open store " + file.string() + ": " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec_script(db_, "PRAGMA journal_mode=WAL; PRAGMA synchronous=FULL; PRAGMA foreign_keys=ON;");
    migrate();
}

Store::~Store() { sqlite3_close(db_); }

void Store::migrate() {
    exec_script(db_, R"sql(
        CREATE TABLE IF NOT EXISTS counters (name TEXT PRIMARY KEY, value INTEGER NOT NULL);
        CREATE TABLE IF NOT EXISTS corpora (id TEXT PRIMARY KEY, created_at TEXT NOT NULL);
        CREATE TABLE IF NOT EXISTS papers (
            corpus_id TEXT NOT NULL REFERENCES corpora(id),
            seq INTEGER NOT NULL,
            paper_id TEXT NOT NULL,
            doc TEXT NOT NULL,
            PRIMARY KEY (corpus_id, paper_id));
        CREATE TABLE IF NOT EXISTS provenance (
            corpus_id TEXT NOT NULL REFERENCES corpora(id),
            seq INTEGER NOT NULL,
            doc TEXT NOT NULL,
            PRIMARY KEY (corpus_id, seq));
        CREATE TABLE IF NOT EXISTS templates (
            id TEXT NOT NULL, version INTEGER NOT NULL, doc TEXT NOT NULL,
            PRIMARY KEY (id, version));
        CREATE TABLE IF NOT EXISTS agents (id TEXT PRIMARY KEY, doc TEXT NOT NULL);
        CREATE TABLE IF NOT EXISTS runs (id TEXT PRIMARY KEY, doc TEXT NOT NULL);
        CREATE TABLE IF NOT EXISTS decisions (
            run_id TEXT NOT NULL REFERENCES runs(id),
            paper_id TEXT NOT NULL,
            agent_id TEXT NOT NULL REFERENCES agents(id),
            doc TEXT NOT NULL,
            PRIMARY KEY (run_id, paper_id, agent_id));
        CREATE TABLE IF NOT EXISTS leases (
            run_id TEXT PRIMARY KEY, owner TEXT NOT NULL, pid INTEGER NOT NULL, heartbeat INTEGER NOT NULL);
        CREATE TABLE IF NOT EXISTS schemes (id TEXT PRIMARY KEY, doc TEXT NOT NULL);
        CREATE TABLE IF NOT EXISTS result_sets (
            id TEXT PRIMARY KEY,
            scheme_id TEXT NOT NULL REFERENCES schemes(id),
            doc TEXT NOT NULL);
        CREATE TABLE IF NOT EXISTS consensus_results (
            result_set_id TEXT NOT NULL REFERENCES result_sets(id),
            paper_id TEXT NOT NULL,
            seq INTEGER NOT NULL,
            doc TEXT NOT NULL,
            PRIMARY KEY (result_set_id, paper_id));
        CREATE TABLE IF NOT EXISTS labels (
            corpus_id TEXT NOT NULL REFERENCES corpora(id),
            paper_id TEXT NOT NULL,
            doc TEXT NOT NULL,
            PRIMARY KEY (corpus_id, paper_id));
    )sql");
}

std::string Store::next_id(const std::string& prefix) {
    Statement(db_, "INSERT INTO counters(name, value) VALUES (?1, 1) ON CONFLICT(name) DO UPDATE SET value = value + 1")
        .bind(1, prefix)
        .run();
    Statement q(db_, "SELECT value FROM counters WHERE name = ?1");
    q.bind(1, prefix);
    q.step();
    return prefix + "-" + std::to_string(q.integer(0));
}

// ---- corpora ---------------------------------------------------------------

void Store::ensure_corpus(const std::string& corpus_id) {
    if (corpus_id.empty()) throw ValidationError("corpus id must not be empty");
    std::lock_guard lock(mutex_);
    Statement(db_, "INSERT OR IGNORE INTO corpora(id, created_at) VALUES (?1, ?2)")
        .bind(1, corpus_id)
        .bind(2, utc_timestamp_now())
        .run();
}

std::vector<std::string> Store::list_corpora() {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT id FROM corpora ORDER BY id");
    std::vector<std::string> ids;
    while (q.step()) ids.push_back(q.text(0));
    return ids;
}

Corpus Store::load_corpus_locked(const std::string& corpus_id) {
    Statement exists(db_, "SELECT 1 FROM corpora WHERE id = ?1");
    exists.bind(1, corpus_id);
    if (!exists.step()) throw NotFoundError("corpus '" + corpus_id + "' not found");

    Corpus corpus;
    corpus.id = corpus_id;
    Statement papers(db_, "SELECT doc FROM papers WHERE corpus_id = ?1 ORDER BY seq");
    papers.bind(1, corpus_id);
    while (papers.step()) corpus.papers.push_back(json::parse(papers.text(0)).get<PaperRecord>());
    Statement events(db_, "SELECT doc FROM provenance WHERE corpus_id = ?1 ORDER BY seq");
    events.bind(1, corpus_id);
    while (events.step()) corpus.provenance.push_back(json::parse(events.text(0)).get<ProvenanceEvent>());
    return corpus;
}

Corpus Store::load_corpus(const std::string& corpus_id) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    auto corpus = load_corpus_locked(corpus_id);
    tx.commit();
    return corpus;
}

MergeReport Store::merge_records(const std::string& corpus_id, const std::vector<PaperRecord>& records,
                                 const std::string& origin) {
    ensure_corpus(corpus_id);
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    Corpus corpus = load_corpus_locked(corpus_id);
    const std::size_t before = corpus.papers.size();
    const std::size_t events_before = corpus.provenance.size();
    MergeReport report = merge_into_corpus(corpus, records, origin);
    for (std::size_t i = before; i < corpus.papers.size(); ++i) {
        Statement(db_, "INSERT INTO papers(corpus_id, seq, paper_id, doc) VALUES (?1, ?2, ?3, ?4)")
            .bind(1, corpus_id)
            .bind(2, static_cast<std::int64_t>(i))
            .bind(3, corpus.papers[i].id)
            .bind(4, json(corpus.papers[i]).dump())
            .run();
    }
    for (std::size_t i = events_before; i < corpus.provenance.size(); ++i) {
        Statement(db_, "INSERT INTO provenance(corpus_id, seq, doc) VALUES (?1, ?2, ?3)")
            .bind(1, corpus_id)
            .bind(2, static_cast<std::int64_t>(i))
            .bind(3, json(corpus.provenance[i]).dump())
            .run();
    }
    tx.commit();
    return report;
}

// ---- templates -------------------------------------------------------------

PromptTemplate Store::save_template(PromptTemplate tmpl) {
    if (auto violations = validate_template(tmpl); !violations.empty()) {
        std::string message = "invalid prompt template:";
        for (const auto& v : violations) message += " " + v.field + " " + v.message + ";";
        throw ValidationError(message);
    }
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    if (tmpl.id.empty()) tmpl.id = next_id("tpl");
    Statement q(db_, "SELECT COALESCE(MAX(version), 0) FROM templates WHERE id = ?1");
    q.bind(1, tmpl.id);
    q.step();
    tmpl.version = q.integer(0) + 1;
    Statement(db_, "INSERT INTO templates(id, version, doc) VALUES (?1, ?2, ?3)")
        .bind(1, tmpl.id)
        .bind(2, tmpl.version)
        .bind(3, json(tmpl).dump())
        .run();
    tx.commit();
    return tmpl;
}

PromptTemplate Store::load_template(const std::string& id, std::int64_t version) {
    std::lock_guard lock(mutex_);
    Statement q(db_, version == 0 ? "SELECT doc FROM templates WHERE id = ?1 ORDER BY version DESC LIMIT 1"
                                  : "SELECT doc FROM templates WHERE id = ?1 AND version = ?2");
    q.bind(1, id);
    if (version != 0) q.bind(2, version);
    if (!q.step()) {
        throw NotFoundError("template '" + id + "'" + (version ? " version " + std::to_string(version) : "") +
                            " not found");
    }
    return json::parse(q.text(0)).get<PromptTemplate>();
}

std::vector<PromptTemplate> Store::list_templates() {
    std::lock_guard lock(mutex_);
    Statement q(db_,
                "SELECT t.doc FROM templates t JOIN (SELECT id, MAX(version) AS v FROM templates GROUP BY id) m "
                "ON t.id = m.id AND t.version = m.v ORDER BY t.id");
    std::vector<PromptTemplate> out;
    while (q.step()) out.push_back(json::parse(q.text(0)).get<PromptTemplate>());
    return out;
}

std::vector<std::int64_t> Store::template_versions(const std::string& id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT version FROM templates WHERE id = ?1 ORDER BY version");
    q.bind(1, id);
    std::vector<std::int64_t> out;
    while (q.step()) out.push_back(q.integer(0));
    return out;
}

// ---- agents ----------------------------------------------------------------

AgentConfig Store::save_agent(const AgentConfig& agent) {
    if (auto problems = validate_agent_config(agent); !problems.empty()) {
        std::string message = "invalid agent config:";
        for (const auto& p : problems) message += " " + p + ";";
        throw ValidationError(message);
    }
    std::lock_guard lock(mutex_);
    Statement(db_, "INSERT INTO agents(id, doc) VALUES (?1, ?2) ON CONFLICT(id) DO UPDATE SET doc = excluded.doc")
        .bind(1, agent.id)
        .bind(2, json(agent).dump())
        .run();
    return agent;
}

AgentConfig Store::load_agent(const std::string& id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM agents WHERE id = ?1");
    q.bind(1, id);
    if (!q.step()) throw NotFoundError("agent '" + id + "' not found");
    return json::parse(q.text(0)).get<AgentConfig>();
}

std::vector<AgentConfig> Store::list_agents() {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM agents ORDER BY id");
    std::vector<AgentConfig> out;
    while (q.step()) out.push_back(json::parse(q.text(0)).get<AgentConfig>());
    return out;
}

// ---- runs ------------------------------------------------------------------

ClassificationRun Store::create_run(ClassificationRun run) {
    if (run.agent_ids.empty()) throw ValidationError("a run needs at least one agent");
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    {
        Statement q(db_, "SELECT 1 FROM corpora WHERE id = ?1");
        q.bind(1, run.corpus_id);
        if (!q.step()) throw NotFoundError("corpus '" + run.corpus_id + "' not found");
    }
    {
        Statement q(db_, "SELECT 1 FROM templates WHERE id = ?1 AND version = ?2");
        q.bind(1, run.template_id).bind(2, run.template_version);
        if (!q.step()) {
            throw NotFoundError("template '" + run.template_id + "' version " + std::to_string(run.template_version) +
                                " not found");
        }
    }
    for (const auto& agent : run.agent_ids) {
        Statement q(db_, "SELECT 1 FROM agents WHERE id = ?1");
        q.bind(1, agent);
        if (!q.step()) throw NotFoundError("agent '" + agent + "' not found");
    }
    if (run.id.empty()) run.id = next_id("run");
    run.status = RunStatus::pending;
    Statement(db_, "INSERT INTO runs(id, doc) VALUES (?1, ?2)").bind(1, run.id).bind(2, json(run).dump()).run();
    tx.commit();
    return run;
}

ClassificationRun Store::load_run_locked(const std::string& id) {
    Statement q(db_, "SELECT doc FROM runs WHERE id = ?1");
    q.bind(1, id);
    if (!q.step()) throw NotFoundError("run '" + id + "' not found");
    return json::parse(q.text(0)).get<ClassificationRun>();
}

ClassificationRun Store::load_run(const std::string& id) {
    std::lock_guard lock(mutex_);
    return load_run_locked(id);
}

std::vector<ClassificationRun> Store::list_runs() {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM runs ORDER BY rowid");
    std::vector<ClassificationRun> out;
    while (q.step()) out.push_back(json::parse(q.text(0)).get<ClassificationRun>());
    return out;
}

void Store::update_run(const ClassificationRun& run) {
    std::lock_guard lock(mutex_);
    Statement(db_, "UPDATE runs SET doc = ?2 WHERE id = ?1").bind(1, run.id).bind(2, json(run).dump()).run();
    if (sqlite3_changes(db_) == 0) throw NotFoundError("run '" + run.id + "' not found");
}

std::set<PaperAgentPair> Store::persisted_pairs(const std::string& run_id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT paper_id, agent_id FROM decisions WHERE run_id = ?1");
    q.bind(1, run_id);
    std::set<PaperAgentPair> out;
    while (q.step()) out.emplace(q.text(0), q.text(1));
    return out;
}

void Store::persist(const AgentDecision& decision) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    const auto run = load_run_locked(decision.run_id);
    {
        Statement q(db_, "SELECT 1 FROM papers WHERE corpus_id = ?1 AND paper_id = ?2");
        q.bind(1, run.corpus_id).bind(2, decision.paper_id);
        if (!q.step()) throw NotFoundError("paper '" + decision.paper_id + "' not in corpus '" + run.corpus_id + "'");
    }
    Statement(db_, "INSERT INTO decisions(run_id, paper_id, agent_id, doc) VALUES (?1, ?2, ?3, ?4)")
        .bind(1, decision.run_id)
        .bind(2, decision.paper_id)
        .bind(3, decision.agent_id)
        .bind(4, json(decision).dump())
        .run();
    Statement(db_, "UPDATE leases SET heartbeat = ?2 WHERE run_id = ?1").bind(1, decision.run_id).bind(2, unix_now()).run();
    tx.commit();
}

bool Store::try_acquire_lease(const std::string& run_id, const std::string& owner) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    Statement q(db_, "SELECT owner, pid, heartbeat FROM leases WHERE run_id = ?1");
    q.bind(1, run_id);
    if (q.step()) {
        const std::string holder = q.text(0);
        const std::int64_t pid = q.integer(1);
        const std::int64_t heartbeat = q.integer(2);
        const bool expired = unix_now() - heartbeat > lease_ttl_.count();
        const bool dead = pid != static_cast<std::int64_t>(::getpid()) && !process_alive(pid);
        if (holder != owner && !expired && !dead) return false;
    }
    Statement(db_,
              "INSERT INTO leases(run_id, owner, pid, heartbeat) VALUES (?1, ?2, ?3, ?4) "
              "ON CONFLICT(run_id) DO UPDATE SET owner = excluded.owner, pid = excluded.pid, heartbeat = excluded.heartbeat")
        .bind(1, run_id)
        .bind(2, owner)
        .bind(3, static_cast<std::int64_t>(::getpid()))
        .bind(4, unix_now())
        .run();
    tx.commit();
    return true;
}

void Store::release_lease(const std::string& run_id, const std::string& owner) {
    std::lock_guard lock(mutex_);
    Statement(db_, "DELETE FROM leases WHERE run_id = ?1 AND owner = ?2").bind(1, run_id).bind(2, owner).run();
}

std::vector<AgentDecision> Store::decisions(const std::string& run_id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM decisions WHERE run_id = ?1 ORDER BY paper_id, agent_id");
    q.bind(1, run_id);
    std::vector<AgentDecision> out;
    while (q.step()) out.push_back(json::parse(q.text(0)).get<AgentDecision>());
    return out;
}

std::size_t Store::decision_count(const std::string& run_id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT COUNT(*) FROM decisions WHERE run_id = ?1");
    q.bind(1, run_id);
    q.step();
    return static_cast<std::size_t>(q.integer(0));
}

// ---- schemes and results ---------------------------------------------------

ConsensusScheme Store::save_scheme(ConsensusScheme scheme) {
    validate_scheme(scheme);
    if (scheme.kind == SchemeKind::any_include) scheme.k = 1;
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    if (scheme.id.empty()) scheme.id = next_id("scheme");
    Statement(db_, "INSERT INTO schemes(id, doc) VALUES (?1, ?2) ON CONFLICT(id) DO UPDATE SET doc = excluded.doc")
        .bind(1, scheme.id)
        .bind(2, json(scheme).dump())
        .run();
    tx.commit();
    return scheme;
}

ConsensusScheme Store::load_scheme(const std::string& id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM schemes WHERE id = ?1");
    q.bind(1, id);
    if (!q.step()) throw NotFoundError("scheme '" + id + "' not found");
    return json::parse(q.text(0)).get<ConsensusScheme>();
}

std::vector<ConsensusScheme> Store::list_schemes() {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM schemes ORDER BY id");
    std::vector<ConsensusScheme> out;
    while (q.step()) out.push_back(json::parse(q.text(0)).get<ConsensusScheme>());
    return out;
}

ResultSet Store::save_result_set(ResultSet set) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    if (set.id.empty()) set.id = next_id("res");
    if (set.created_at.empty()) set.created_at = utc_timestamp_now();
    const json doc = {
        {"scheme_id", set.scheme_id},
        {"run_ids", set.run_ids},
        {"corpus_id", set.corpus_id},
        {"created_at", set.created_at},
    };
    Statement(db_, "INSERT INTO result_sets(id, scheme_id, doc) VALUES (?1, ?2, ?3)")
        .bind(1, set.id)
        .bind(2, set.scheme_id)
        .bind(3, doc.dump())
        .run();
    for (std::size_t i = 0; i < set.results.size(); ++i) {
        Statement(db_, "INSERT INTO consensus_results(result_set_id, paper_id, seq, doc) VALUES (?1, ?2, ?3, ?4)")
            .bind(1, set.id)
            .bind(2, set.results[i].paper_id)
            .bind(3, static_cast<std::int64_t>(i))
            .bind(4, json(set.results[i]).dump())
            .run();
    }
    tx.commit();
    return set;
}

ResultSet Store::load_result_set(const std::string& id) {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    Statement q(db_, "SELECT scheme_id, doc FROM result_sets WHERE id = ?1");
    q.bind(1, id);
    if (!q.step()) throw NotFoundError("result set '" + id + "' not found");
    ResultSet set;
    set.id = id;
    set.scheme_id = q.text(0);
    const auto doc = json::parse(q.text(1));
    set.run_ids = doc.value("run_ids", std::vector<std::string>{});
    set.corpus_id = doc.value("corpus_id", "");
    set.created_at = doc.value("created_at", "");
    Statement rows(db_, "SELECT doc FROM consensus_results WHERE result_set_id = ?1 ORDER BY seq");
    rows.bind(1, id);
    while (rows.step()) set.results.push_back(json::parse(rows.text(0)).get<ConsensusResult>());
    tx.commit();
    return set;
}

// ---- labels ----------------------------------------------------------------

void Store::put_labels(const std::string& corpus_id, const std::vector<GroundTruthLabel>& labels) {
    index_labels(labels);
    ensure_corpus(corpus_id);
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    Statement(db_, "DELETE FROM labels WHERE corpus_id = ?1").bind(1, corpus_id).run();
    for (const auto& l : labels) {
        Statement(db_, "INSERT INTO labels(corpus_id, paper_id, doc) VALUES (?1, ?2, ?3)")
            .bind(1, corpus_id)
            .bind(2, l.paper_id)
            .bind(3, json(l).dump())
            .run();
    }
    tx.commit();
}

std::vector<GroundTruthLabel> Store::labels(const std::string& corpus_id) {
    std::lock_guard lock(mutex_);
    Statement q(db_, "SELECT doc FROM labels WHERE corpus_id = ?1 ORDER BY paper_id");
    q.bind(1, corpus_id);
    std::vector<GroundTruthLabel> out;
    while (q.step()) {
        const auto doc = json::parse(q.text(0));
        out.push_back({doc.at("paper_id").get<std::string>(), label_from_string(doc.at("label").get<std::string>()),
                       doc.value("source", "")});
    }
    return out;
}

}  // namespace litsieve
