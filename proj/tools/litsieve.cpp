// litsieve command-line front end.

#include "litsieve/bibtex.hpp"
#include "litsieve/clock.hpp"
#include "litsieve/consensus.hpp"
#include "litsieve/error.hpp"
#include "litsieve/evaluation.hpp"
#include "litsieve/json.hpp"
#include "litsieve/service.hpp"
#include "litsieve/store.hpp"
#include "litsieve/text.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace litsieve;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << data;
}

std::string default_data_dir() {
    const char* env = std::getenv("DATA_DIR");
    return env && *env ? env : "litsieve-data";
}

/// Transport, clock and resolver chosen from the command line.
struct Backends {
    std::unique_ptr<CompletionTransport> transport;
    std::unique_ptr<Clock> virtual_clock;
    std::unique_ptr<DoiResolver> resolver;

    Backends(const std::string& mock_script, const std::string& resolver_url) {
        if (!mock_script.empty()) {
            transport = std::make_unique<MockTransport>(json::parse(read_file(mock_script)));
            virtual_clock = std::make_unique<ManualClock>();
        } else {
            transport = std::make_unique<HttpCompletionTransport>();
        }
        if (!resolver_url.empty()) resolver = std::make_unique<HttpDoiResolver>(resolver_url);
    }

    Clock* clock() { return virtual_clock.get(); }
};

void print_run_outcome(Service& service, const ClassificationRun& run) {
    const auto status = service.run_status(run.id);
    std::cout << "run " << run.id << ": " << to_string(run.status) << " ("
              << status["progress"]["done"].get<std::size_t>() << "/" << status["progress"]["total"].get<std::size_t>()
              << " decisions)\n";
    if (!run.failure_reason.empty()) std::cout << "reason: " << run.failure_reason << "\n";
    if (service.store().labels(run.corpus_id).empty()) {
        std::cout << service.stats(run.id)["distribution"].dump(2) << "\n";
        return;
    }
    std::cout << format_metrics_table(service.evaluation_columns(run.id));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent literature screening"};
    app.require_subcommand(1);

    std::string data_dir = default_data_dir();
    std::string mock_script;
    std::string resolver_url;
    app.add_option("--data-dir", data_dir, "Store directory (default: $DATA_DIR)");
    app.add_option("--mock", mock_script, "Scripted mock transport JSON; runs on a virtual clock");
    app.add_option("--resolver", resolver_url, "DOI metadata resolver base URL");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Add BibTeX files or DOIs to a corpus");
    std::string corpus_id = "default";
    std::vector<std::string> bib_files, dois;
    std::string truth_file;
    ingest->add_option("--corpus", corpus_id, "Corpus id");
    ingest->add_option("--bib", bib_files, "BibTeX file")->check(CLI::ExistingFile);
    ingest->add_option("--doi", dois, "DOI to resolve");
    ingest->add_option("--truth", truth_file, "Ground-truth CSV (paper_id,label)")->check(CLI::ExistingFile);

    // run
    auto* run_cmd = app.add_subcommand("run", "Classify a corpus with the configured agents");
    std::string template_file, template_id, agents_file, resume_id;
    std::int64_t template_version = 0;
    std::vector<std::string> agent_ids, scope_ids;
    run_cmd->add_option("--corpus", corpus_id, "Corpus id");
    run_cmd->add_option("--template", template_file, "Template JSON to save and use")->check(CLI::ExistingFile);
    run_cmd->add_option("--template-id", template_id, "Stored template id");
    run_cmd->add_option("--template-version", template_version, "Stored template version (default latest)");
    run_cmd->add_option("--agents", agents_file, "Agent config JSON (object or array) to save")->check(CLI::ExistingFile);
    run_cmd->add_option("--agent", agent_ids, "Agent id to include (default: all from --agents)");
    run_cmd->add_option("--scope", scope_ids, "Restrict to these paper ids")->delimiter(',');
    run_cmd->add_option("--truth", truth_file, "Ground-truth CSV")->check(CLI::ExistingFile);
    run_cmd->add_option("--resume", resume_id, "Continue an existing run");

    // consensus
    auto* consensus_cmd = app.add_subcommand("consensus", "Combine run verdicts under a voting scheme");
    std::vector<std::string> run_ids;
    std::string kind = "any", policy = "include", scheme_id;
    int k = 1;
    consensus_cmd->add_option("--run", run_ids, "Run id (repeatable; later runs win)")->required();
    consensus_cmd->add_option("--agent", agent_ids, "Participating agent (default: all agents of the runs)");
    consensus_cmd->add_option("--kind", kind, "any | threshold")->check(CLI::IsMember({"any", "threshold"}));
    consensus_cmd->add_option("--k", k, "Inclusion quorum for threshold schemes");
    consensus_cmd->add_option("--policy", policy, "Ambiguous/error handling: include | abstain")
        ->check(CLI::IsMember({"include", "abstain"}));
    consensus_cmd->add_option("--scheme-id", scheme_id, "Scheme id to save under");

    // evaluate / export
    auto* evaluate = app.add_subcommand("evaluate", "Print the confusion and metric table");
    std::string run_scope, consensus_scope, out_file;
    evaluate->add_option("--run", run_scope, "Run id");
    evaluate->add_option("--consensus", consensus_scope, "Consensus result set id");
    evaluate->add_option("--truth", truth_file, "Ground-truth CSV")->check(CLI::ExistingFile);

    auto* export_cmd = app.add_subcommand("export", "Write the verdict CSV");
    export_cmd->add_option("--run", run_scope, "Run id");
    export_cmd->add_option("--consensus", consensus_scope, "Consensus result set id");
    export_cmd->add_option("--out", out_file, "Output file (default stdout)");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string listen_addr;
    if (const char* env = std::getenv("LISTEN_ADDR")) listen_addr = env;
    if (listen_addr.empty()) listen_addr = "127.0.0.1:8080";
    serve->add_option("--listen", listen_addr, "host:port (default: $LISTEN_ADDR)");

    CLI11_PARSE(app, argc, argv);

    try {
        Store store(data_dir);
        Backends backends(mock_script, resolver_url);
        Service service(store, *backends.transport, backends.resolver.get(), backends.clock());

        auto scope_of = [&]() {
            if (run_scope.empty() == consensus_scope.empty()) throw ValidationError("give exactly one of --run or --consensus");
            return run_scope.empty() ? consensus_scope : run_scope;
        };
        auto load_truth = [&](const std::string& corpus) {
            if (!truth_file.empty()) service.put_labels_csv(corpus, read_file(truth_file));
        };

        if (*ingest) {
            json out = json::array();
            for (const auto& file : bib_files) {
                json r = service.ingest_bibtex(corpus_id, read_file(file), file);
                r["source"] = file;
                out.push_back(r);
            }
            if (!dois.empty()) out.push_back(service.ingest_dois(corpus_id, dois));
            if (!truth_file.empty()) {
                out.push_back({{"labels", service.put_labels_csv(corpus_id, read_file(truth_file))}});
            }
            std::cout << out.dump(2) << "\n";
        } else if (*run_cmd) {
            ClassificationRun run;
            if (!resume_id.empty()) {
                run = store.load_run(resume_id);
                load_truth(run.corpus_id);
            } else {
                std::vector<std::string> saved;
                if (!agents_file.empty()) {
                    const json doc = json::parse(read_file(agents_file));
                    for (const auto& a : doc.is_array() ? doc : json::array({doc})) {
                        saved.push_back(store.save_agent(a.get<AgentConfig>()).id);
                    }
                }
                if (!template_file.empty()) {
                    auto tmpl = parse_document<PromptTemplate>(read_file(template_file), "template");
                    if (!template_id.empty()) tmpl.id = template_id;
                    const auto stored = store.save_template(tmpl);
                    template_id = stored.id;
                    template_version = stored.version;
                }
                if (template_id.empty()) throw ValidationError("--template or --template-id is required");
                run.corpus_id = corpus_id;
                run.template_id = template_id;
                run.template_version = template_version;
                run.agent_ids = agent_ids.empty() ? saved : agent_ids;
                if (!scope_ids.empty()) run.scope = PaperScope::subset(scope_ids);
                run = service.create_run(run);
                load_truth(corpus_id);
            }
            run = service.execute(run.id);
            print_run_outcome(service, run);
            if (run.status == RunStatus::failed) return 1;
        } else if (*consensus_cmd) {
            ConsensusScheme scheme;
            scheme.id = scheme_id;
            scheme.kind = kind == "any" ? SchemeKind::any_include : SchemeKind::threshold;
            scheme.k = k;
            scheme.ambiguous_policy = policy == "include" ? AmbiguousPolicy::count_as_include : AmbiguousPolicy::count_as_abstain;
            scheme.agent_ids = agent_ids;
            if (scheme.agent_ids.empty()) {
                for (const auto& id : run_ids) {
                    for (const auto& a : store.load_run(id).agent_ids) {
                        if (std::find(scheme.agent_ids.begin(), scheme.agent_ids.end(), a) == scheme.agent_ids.end()) {
                            scheme.agent_ids.push_back(a);
                        }
                    }
                }
            }
            scheme = store.save_scheme(scheme);
            const auto set = service.apply_scheme(scheme.id, run_ids);
            std::size_t include = 0, flagged = 0;
            for (const auto& r : set.results) {
                include += r.final_verdict == Verdict::include;
                flagged += r.flagged_for_review;
            }
            std::cout << json{{"result_set_id", set.id},
                              {"scheme", scheme},
                              {"papers", set.results.size()},
                              {"included", include},
                              {"discarded", set.results.size() - include},
                              {"flagged", flagged}}
                             .dump(2)
                      << "\n";
        } else if (*evaluate) {
            const std::string scope = scope_of();
            if (!truth_file.empty()) {
                const std::string corpus = Service::is_result_scope(scope) ? store.load_result_set(scope).corpus_id
                                                                           : store.load_run(scope).corpus_id;
                load_truth(corpus);
            }
            std::cout << format_metrics_table(service.evaluation_columns(scope));
        } else if (*export_cmd) {
            const std::string csv = service.export_csv(scope_of());
            if (out_file.empty()) std::cout << csv;
            else write_file(out_file, csv);
        } else if (*serve) {
            const auto [host, port] = parse_listen_addr(listen_addr);
            ApiServer server(service);
            const int bound = server.bind(host, port);
            for (const auto& id : service.resume_interrupted()) std::cerr << "resuming " << id << "\n";
            std::cerr << "listening on " << host << ":" << bound << "\n";
            server.listen();
        }
    } catch (const Error& e) {
        std::cerr << error_document(e).dump() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << error_document(ValidationError(std::string("malformed JSON: ") + e.what())).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_document(IoError(e.what())).dump() << "\n";
        return 1;
    }
    return 0;
}
