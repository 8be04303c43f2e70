#include "litsieve/service.hpp"

#include "litsieve/bibtex.hpp"
#include "litsieve/consensus.hpp"
#include "litsieve/error.hpp"
#include "litsieve/evaluation.hpp"
#include "litsieve/export.hpp"
#include "litsieve/json.hpp"
#include "litsieve/text.hpp"

#include <httplib.h>

#include <iostream>
#include <set>
#include <unistd.h>

namespace litsieve {

using nlohmann::json;

struct Service::Scope {
    bool result = false;
    ClassificationRun run;
    ResultSet set;
    ConsensusScheme scheme;
    Corpus corpus;
    std::vector<std::string> agents;
    std::vector<AgentDecision> decisions;
    std::set<std::string> paper_ids;
    std::vector<GroundTruthLabel> truth;
};

Service::Service(Store& store, CompletionTransport& transport, DoiResolver* resolver, Clock* clock)
    : store_(store), transport_(transport), resolver_(resolver), clock_(clock) {}

Service::~Service() {
    std::lock_guard lock(jobs_mutex_);
    for (auto& [_, job] : jobs_) job.thread.request_stop();
    jobs_.clear();
}

json Service::ingest_bibtex(const std::string& corpus_id, std::string_view bytes, const std::string& origin) {
    auto parsed = parse_bibtex(bytes, "bibtex:" + origin);
    auto report = store_.merge_records(corpus_id, parsed.records, origin);
    return {{"records_parsed", parsed.records.size()}, {"diagnostics", parsed.diagnostics}, {"report", report}};
}

json Service::ingest_dois(const std::string& corpus_id, const std::vector<std::string>& dois) {
    if (!resolver_) throw PreconditionError("no DOI resolver configured");
    for (const auto& doi : dois) {
        if (!normalize_doi(doi)) throw ValidationError("invalid DOI '" + doi + "'");
    }
    auto batch = resolve_dois(dois, *resolver_);
    auto report = store_.merge_records(corpus_id, batch.records, "doi batch (" + std::to_string(dois.size()) + ")");
    return {{"records_resolved", batch.records.size()}, {"failures", batch.failures}, {"report", report}};
}

std::size_t Service::put_labels_csv(const std::string& corpus_id, std::string_view csv) {
    auto labels = parse_labels_csv(csv);
    store_.put_labels(corpus_id, labels);
    return labels.size();
}

std::string Service::render_preview(const PromptTemplate& tmpl, const std::string& corpus_id,
                                    const std::string& paper_id) {
    const Corpus corpus = store_.load_corpus(corpus_id);
    const PaperRecord* paper = corpus.find(paper_id);
    if (!paper) throw NotFoundError("paper '" + paper_id + "' not in corpus '" + corpus_id + "'");
    return render_prompt(tmpl, *paper);
}

ClassificationRun Service::create_run(ClassificationRun run) {
    if (run.template_version == 0) run.template_version = store_.load_template(run.template_id).version;
    if (!run.scope.all) {
        const Corpus corpus = store_.load_corpus(run.corpus_id);
        std::vector<std::string> unknown;
        for (const auto& id : run.scope.paper_ids) {
            if (!corpus.find(id)) unknown.push_back(id);
        }
        if (!unknown.empty()) throw ValidationError("unknown paper ids in scope: " + text::join(unknown, ", "));
    }
    return store_.create_run(std::move(run));
}

ClassificationRun Service::execute(const std::string& run_id, const ExecuteOptions& extra) {
    ClassificationRun run = store_.load_run(run_id);

    std::optional<Corpus> corpus;
    std::optional<PromptTemplate> tmpl;
    try {
        corpus = store_.load_corpus(run.corpus_id);
    } catch (const NotFoundError&) {
    }
    try {
        tmpl = store_.load_template(run.template_id, run.template_version);
    } catch (const NotFoundError&) {
    }
    std::vector<AgentConfig> agents;
    for (const auto& id : run.agent_ids) {
        try {
            agents.push_back(store_.load_agent(id));
        } catch (const NotFoundError&) {
        }
    }

    ExecuteOptions options = extra;
    if (!options.clock) options.clock = clock_;
    options.lease_owner = "pid-" + std::to_string(::getpid()) + "-" + std::to_string(++owner_seq_);
    execute_run(run, corpus ? &*corpus : nullptr, tmpl ? &*tmpl : nullptr, agents, transport_, store_, options);
    return run;
}

void Service::start(const std::string& run_id) {
    const auto run = store_.load_run(run_id);
    if (run.status == RunStatus::complete) throw PreconditionError("run '" + run_id + "' is already complete");
    std::lock_guard lock(jobs_mutex_);
    if (auto it = jobs_.find(run_id); it != jobs_.end()) {
        if (!*it->second.done) return;
        jobs_.erase(it);
    }
    auto done = std::make_shared<std::atomic<bool>>(false);
    std::jthread thread([this, run_id, done](std::stop_token stop) {
        try {
            ExecuteOptions options;
            options.stop = stop;
            execute(run_id, options);
        } catch (const std::exception& e) {
            std::cerr << "run " << run_id << ": " << e.what() << "\n";
        }
        *done = true;
    });
    jobs_.emplace(run_id, Job{done, std::move(thread)});
}

bool Service::active(const std::string& run_id) {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(run_id);
    return it != jobs_.end() && !*it->second.done;
}

std::jthread Service::detach_job(const std::string& run_id) {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(run_id);
    if (it == jobs_.end()) return {};
    std::jthread job = std::move(it->second.thread);
    jobs_.erase(it);
    return job;
}

ClassificationRun Service::pause(const std::string& run_id) {
    if (std::jthread job = detach_job(run_id); job.joinable()) {
        job.request_stop();
        job.join();
    }
    auto run = store_.load_run(run_id);
    if (run.status == RunStatus::complete) throw PreconditionError("run '" + run_id + "' is already complete");
    if (run.status == RunStatus::pending || run.status == RunStatus::running) {
        run.status = RunStatus::paused;
        store_.update_run(run);
    }
    return run;
}

void Service::wait(const std::string& run_id) {
    if (std::jthread job = detach_job(run_id); job.joinable()) job.join();
}

std::vector<std::string> Service::resume_interrupted() {
    std::vector<std::string> resumed;
    for (const auto& run : store_.list_runs()) {
        if (run.status != RunStatus::running) continue;
        start(run.id);
        resumed.push_back(run.id);
    }
    return resumed;
}

std::size_t Service::scope_size(const ClassificationRun& run, const Corpus& corpus) {
    return run.scope.all ? corpus.papers.size() : run.scope.paper_ids.size();
}

json Service::run_status(const std::string& run_id) {
    const auto run = store_.load_run(run_id);
    std::size_t total = 0;
    try {
        total = scope_size(run, store_.load_corpus(run.corpus_id)) * run.agent_ids.size();
    } catch (const NotFoundError&) {
    }
    json doc = run;
    doc["progress"] = {{"done", store_.decision_count(run_id)}, {"total", total}};
    return doc;
}

ResultSet Service::apply_scheme(const std::string& scheme_id, const std::vector<std::string>& run_ids) {
    if (run_ids.empty()) throw ValidationError("at least one run id is required");
    const auto scheme = store_.load_scheme(scheme_id);
    std::string corpus_id;
    std::vector<std::vector<AgentDecision>> runs;
    for (const auto& id : run_ids) {
        const auto run = store_.load_run(id);
        if (corpus_id.empty()) corpus_id = run.corpus_id;
        else if (corpus_id != run.corpus_id) throw ValidationError("runs span different corpora");
        runs.push_back(store_.decisions(id));
    }
    const auto corpus = store_.load_corpus(corpus_id);
    ResultSet set;
    set.scheme_id = scheme.id;
    set.run_ids = run_ids;
    set.corpus_id = corpus_id;
    set.results = apply_consensus(runs, scheme, corpus);
    return store_.save_result_set(std::move(set));
}

Service::Scope Service::resolve_scope(const std::string& scope) {
    Scope s;
    if (is_result_scope(scope)) {
        s.result = true;
        s.set = store_.load_result_set(scope);
        s.scheme = store_.load_scheme(s.set.scheme_id);
        s.corpus = store_.load_corpus(s.set.corpus_id);
        s.agents = s.scheme.agent_ids;
        for (const auto& id : s.set.run_ids) {
            auto d = store_.decisions(id);
            s.decisions.insert(s.decisions.end(), d.begin(), d.end());
        }
        for (const auto& r : s.set.results) s.paper_ids.insert(r.paper_id);
    } else {
        s.run = store_.load_run(scope);
        s.corpus = store_.load_corpus(s.run.corpus_id);
        s.agents = s.run.agent_ids;
        s.decisions = store_.decisions(scope);
        if (s.run.scope.all) {
            for (const auto& p : s.corpus.papers) s.paper_ids.insert(p.id);
        } else {
            s.paper_ids.insert(s.run.scope.paper_ids.begin(), s.run.scope.paper_ids.end());
        }
    }
    for (auto& label : store_.labels(s.corpus.id)) {
        if (s.paper_ids.contains(label.paper_id)) s.truth.push_back(std::move(label));
    }
    return s;
}

namespace {

std::map<std::string, Verdict> agent_predictions(const VerdictMatrix& matrix, const std::string& agent) {
    std::map<std::string, Verdict> out;
    for (const auto& [paper, row] : matrix) {
        if (auto it = row.find(agent); it != row.end()) out[paper] = it->second;
    }
    return out;
}

VerdictMatrix restrict_matrix(const VerdictMatrix& matrix, const std::vector<std::string>& agents,
                              const std::set<std::string>& papers) {
    VerdictMatrix out;
    for (const auto& [paper, row] : matrix) {
        if (!papers.contains(paper)) continue;
        auto& dst = out[paper];
        for (const auto& agent : agents) {
            if (auto it = row.find(agent); it != row.end()) dst[agent] = it->second;
        }
    }
    return out;
}

}  // namespace

std::vector<std::pair<std::string, ConfusionMatrix>> Service::evaluation_columns(const std::string& scope) {
    const Scope s = resolve_scope(scope);
    if (s.truth.empty()) throw PreconditionError("no ground-truth labels for corpus '" + s.corpus.id + "'");
    const auto matrix = verdict_matrix(s.decisions);
    std::vector<std::pair<std::string, ConfusionMatrix>> columns;
    for (const auto& agent : s.agents) columns.emplace_back(agent, confusion(agent_predictions(matrix, agent), s.truth));
    if (s.result) {
        std::map<std::string, Verdict> predictions;
        for (const auto& r : s.set.results) predictions[r.paper_id] = r.final_verdict;
        columns.emplace_back("Consensus", confusion(predictions, s.truth));
    }
    return columns;
}

json Service::stats(const std::string& scope) {
    const Scope s = resolve_scope(scope);
    const auto matrix = restrict_matrix(verdict_matrix(s.decisions), s.agents, s.paper_ids);

    json doc;
    doc["scope"] = scope;
    doc["kind"] = s.result ? "result" : "run";
    doc["corpus_id"] = s.corpus.id;
    doc["agents"] = s.agents;
    doc["papers"] = s.paper_ids.size();
    doc["labeled"] = s.truth.size();

    json distribution = json::object();
    for (const auto& agent : s.agents) {
        json counts = {{"INCLUDE", 0}, {"DISCARD", 0}, {"AMBIGUOUS", 0}, {"ERROR", 0}};
        for (const auto& [_, row] : matrix) {
            if (auto it = row.find(agent); it != row.end()) counts[std::string(to_string(it->second))] = counts[std::string(to_string(it->second))].get<int>() + 1;
        }
        distribution[agent] = counts;
    }
    doc["distribution"] = distribution;

    std::vector<AgentDecision> scoped;
    for (const auto& d : s.decisions) {
        if (s.paper_ids.contains(d.paper_id) &&
            std::find(s.agents.begin(), s.agents.end(), d.agent_id) != s.agents.end()) {
            scoped.push_back(d);
        }
    }
    doc["usage"] = scoped.empty() ? json(nullptr) : json(run_usage(scoped));

    std::vector<std::string> problems;
    try {
        doc["agreement"] = agreement_stats(matrix);
    } catch (const Error& e) {
        doc["agreement"] = nullptr;
        problems.push_back(std::string("agreement: ") + e.what());
    }

    json confusion_doc = json::object();
    json metrics_doc = json::object();
    doc["histogram"] = nullptr;
    if (!s.truth.empty()) {
        try {
            for (const auto& agent : s.agents) {
                const auto cm = confusion(agent_predictions(matrix, agent), s.truth);
                confusion_doc[agent] = cm;
                metrics_doc[agent] = metrics(cm);
            }
            VerdictMatrix labeled;
            for (const auto& l : s.truth) {
                if (auto it = matrix.find(l.paper_id); it != matrix.end()) labeled[l.paper_id] = it->second;
            }
            doc["histogram"] = misjudgment_histogram(labeled, s.truth);
        } catch (const Error& e) {
            problems.push_back(std::string("evaluation: ") + e.what());
        }
    }
    doc["confusion"] = confusion_doc;
    doc["metrics"] = metrics_doc;

    if (s.result) {
        json consensus = {{"scheme", s.scheme}, {"result_set_id", s.set.id}, {"run_ids", s.set.run_ids}};
        std::int64_t include = 0, flagged = 0;
        std::map<std::string, Verdict> predictions;
        for (const auto& r : s.set.results) {
            include += r.final_verdict == Verdict::include;
            flagged += r.flagged_for_review;
            predictions[r.paper_id] = r.final_verdict;
        }
        consensus["distribution"] = {{"INCLUDE", include},
                                     {"DISCARD", static_cast<std::int64_t>(s.set.results.size()) - include}};
        consensus["flagged"] = flagged;
        consensus["confusion"] = nullptr;
        consensus["metrics"] = nullptr;
        if (!s.truth.empty()) {
            try {
                const auto cm = confusion(predictions, s.truth);
                consensus["confusion"] = cm;
                consensus["metrics"] = metrics(cm);
            } catch (const Error& e) {
                problems.push_back(std::string("consensus evaluation: ") + e.what());
            }
        }
        doc["consensus"] = consensus;
    } else {
        doc["run"] = s.run;
    }
    doc["problems"] = problems;
    return doc;
}

std::string Service::export_csv(const std::string& scope) {
    const Scope s = resolve_scope(scope);
    if (s.result) return export_consensus_csv(s.corpus, s.agents, s.decisions, s.set.results);
    return export_run_csv(s.corpus, s.agents, s.decisions);
}

// ---- HTTP ------------------------------------------------------------------

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation:
        case ErrorCode::contract:
        case ErrorCode::ingestion:
            return 400;
        case ErrorCode::not_found:
            return 404;
        case ErrorCode::conflict:
            return 409;
        case ErrorCode::coverage:
        case ErrorCode::precondition:
            return 422;
        case ErrorCode::transport:
            return 502;
        case ErrorCode::io:
            return 500;
    }
    return 500;
}

json error_document(const Error& e) {
    return {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

std::pair<std::string, int> parse_listen_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) return {addr.empty() ? "0.0.0.0" : addr, 8080};
    std::string host = addr.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw ValidationError("invalid listen address '" + addr + "'");
    }
    if (port < 0 || port > 65535) throw ValidationError("invalid port in listen address '" + addr + "'");
    return {host.empty() ? "0.0.0.0" : host, port};
}

struct ApiServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) { routes(); }

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static void reply(httplib::Response& res, const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static Handler guarded(Handler h) {
        return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                h(req, res);
            } catch (const Error& e) {
                reply(res, error_document(e), http_status(e.code()));
            } catch (const json::exception& e) {
                reply(res, error_document(ValidationError(std::string("malformed JSON: ") + e.what())), 400);
            } catch (const std::exception& e) {
                reply(res, error_document(IoError(e.what())), 500);
            }
        };
    }

    static json body_json(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        return json::parse(req.body);
    }

    void get(const std::string& pattern, Handler h) { server.Get(pattern, guarded(std::move(h))); }
    void post(const std::string& pattern, Handler h) { server.Post(pattern, guarded(std::move(h))); }

    void routes() {
        Store& store = service.store();

        get("/health", [](const httplib::Request&, httplib::Response& res) {
            reply(res, {{"status", "ok"}, {"version", std::string(service_version)}});
        });

        get("/corpora", [&store](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& id : store.list_corpora()) {
                const auto corpus = store.load_corpus(id);
                out.push_back({{"id", id}, {"papers", corpus.papers.size()}});
            }
            reply(res, out);
        });
        get(R"(/corpora/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
            const auto corpus = store.load_corpus(req.matches[1]);
            reply(res, {{"id", corpus.id}, {"papers", corpus.papers}, {"provenance", corpus.provenance}});
        });
        get(R"(/corpora/([^/]+)/export\.csv)", [&store](const httplib::Request& req, httplib::Response& res) {
            res.set_content(export_corpus_csv(store.load_corpus(req.matches[1])), "text/csv; charset=utf-8");
        });
        post(R"(/corpora/([^/]+)/bibtex)", [this](const httplib::Request& req, httplib::Response& res) {
            std::string origin = req.has_param("filename") ? req.get_param_value("filename") : "upload.bib";
            reply(res, service.ingest_bibtex(req.matches[1], req.body, origin));
        });
        post(R"(/corpora/([^/]+)/dois)", [this](const httplib::Request& req, httplib::Response& res) {
            const json body = body_json(req);
            const json list = body.is_array() ? body : body.at("dois");
            reply(res, service.ingest_dois(req.matches[1], list.get<std::vector<std::string>>()));
        });
        post(R"(/corpora/([^/]+)/labels)", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, {{"labels", service.put_labels_csv(req.matches[1], req.body)}});
        });
        get(R"(/corpora/([^/]+)/labels)", [&store](const httplib::Request& req, httplib::Response& res) {
            reply(res, store.labels(req.matches[1]));
        });

        get("/templates", [&store](const httplib::Request&, httplib::Response& res) { reply(res, store.list_templates()); });
        post("/templates/render", [this, &store](const httplib::Request& req, httplib::Response& res) {
            const json body = body_json(req);
            PromptTemplate tmpl = body.contains("template")
                                      ? body["template"].get<PromptTemplate>()
                                      : store.load_template(body.at("template_id").get<std::string>(),
                                                            body.value("version", std::int64_t{0}));
            if (auto violations = validate_template(tmpl); !violations.empty()) {
                json v = json::array();
                for (const auto& x : violations) v.push_back({{"field", x.field}, {"message", x.message}});
                reply(res, {{"violations", v}}, 400);
                return;
            }
            reply(res, {{"prompt", service.render_preview(tmpl, body.at("corpus_id").get<std::string>(),
                                                          body.at("paper_id").get<std::string>())}});
        });
        get(R"(/templates/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
            const std::int64_t version = req.has_param("version") ? std::stoll(req.get_param_value("version")) : 0;
            json doc = store.load_template(req.matches[1], version);
            doc["versions"] = store.template_versions(req.matches[1]);
            reply(res, doc);
        });
        post("/templates", [&store](const httplib::Request& req, httplib::Response& res) {
            reply(res, store.save_template(body_json(req).get<PromptTemplate>()), 201);
        });

        get("/agents", [&store](const httplib::Request&, httplib::Response& res) { reply(res, store.list_agents()); });
        get(R"(/agents/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) { reply(res, store.load_agent(req.matches[1])); });
        post("/agents", [&store](const httplib::Request& req, httplib::Response& res) {
            const json body = body_json(req);
            if (body.is_array()) {
                json out = json::array();
                for (const auto& a : body) out.push_back(store.save_agent(a.get<AgentConfig>()));
                reply(res, out, 201);
            } else {
                reply(res, store.save_agent(body.get<AgentConfig>()), 201);
            }
        });

        get("/runs", [&store](const httplib::Request&, httplib::Response& res) { reply(res, store.list_runs()); });
        post("/runs", [this](const httplib::Request& req, httplib::Response& res) {
            const json body = body_json(req);
            auto run = service.create_run(body.get<ClassificationRun>());
            if (body.value("start", true)) service.start(run.id);
            reply(res, service.run_status(run.id), 202);
        });
        get(R"(/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) { reply(res, service.run_status(req.matches[1])); });
        post(R"(/runs/([^/]+)/pause)", [this](const httplib::Request& req, httplib::Response& res) {
            service.pause(req.matches[1]);
            reply(res, service.run_status(req.matches[1]));
        });
        post(R"(/runs/([^/]+)/resume)", [this](const httplib::Request& req, httplib::Response& res) {
            service.start(req.matches[1]);
            reply(res, service.run_status(req.matches[1]), 202);
        });
        get(R"(/runs/([^/]+)/decisions)", [&store](const httplib::Request& req, httplib::Response& res) {
            store.load_run(req.matches[1]);
            reply(res, store.decisions(req.matches[1]));
        });
        get(R"(/runs/([^/]+)/usage)", [&store](const httplib::Request& req, httplib::Response& res) {
            store.load_run(req.matches[1]);
            reply(res, run_usage(store.decisions(req.matches[1])));
        });

        get("/schemes", [&store](const httplib::Request&, httplib::Response& res) { reply(res, store.list_schemes()); });
        post("/schemes", [&store](const httplib::Request& req, httplib::Response& res) {
            reply(res, store.save_scheme(body_json(req).get<ConsensusScheme>()), 201);
        });
        get(R"(/schemes/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) { reply(res, store.load_scheme(req.matches[1])); });
        post(R"(/schemes/([^/]+)/apply)", [this](const httplib::Request& req, httplib::Response& res) {
            const json body = body_json(req);
            const auto set = service.apply_scheme(req.matches[1], body.at("run_ids").get<std::vector<std::string>>());
            reply(res, result_json(set), 201);
        });
        get(R"(/results/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
            reply(res, result_json(store.load_result_set(req.matches[1])));
        });

        get(R"(/stats/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) { reply(res, service.stats(req.matches[1])); });
        get(R"(/export/([^/]+)\.csv)", [this](const httplib::Request& req, httplib::Response& res) {
            res.set_content(service.export_csv(req.matches[1]), "text/csv; charset=utf-8");
        });
    }

    static json result_json(const ResultSet& set) {
        return {{"id", set.id},           {"scheme_id", set.scheme_id},   {"run_ids", set.run_ids},
                {"corpus_id", set.corpus_id}, {"created_at", set.created_at}, {"results", set.results}};
    }
};

ApiServer::ApiServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw IoError("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void ApiServer::listen() {
    if (!impl_->server.listen_after_bind()) throw IoError("server stopped with an error");
}

void ApiServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace litsieve
