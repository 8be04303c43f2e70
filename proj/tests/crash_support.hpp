#pragma once

#include "litsieve/error.hpp"
#include "litsieve/run.hpp"
#include "litsieve/store.hpp"

#include "support.hpp"

#include <csignal>
#include <sys/wait.h>
#include <unistd.h>

namespace testing {

/// Loads the golden corpus, template and agents into `store` and creates a
/// pending three-agent run over all 50 papers.
inline litsieve::ClassificationRun seed_golden_run(litsieve::Store& store) {
    auto parsed = litsieve::parse_bibtex(slurp(fixture("golden/corpus.bib")));
    store.merge_records("golden", parsed.records, "corpus.bib");
    store.put_labels("golden", golden_labels());
    auto tmpl = golden_template();
    tmpl.version = 0;
    store.save_template(tmpl);
    for (const auto& a : golden_agents()) store.save_agent(a);
    litsieve::ClassificationRun run;
    run.corpus_id = "golden";
    run.template_id = tmpl.id;
    run.template_version = 1;
    run.agent_ids = {"alpha", "beta", "gamma"};
    return store.create_run(run);
}

/// Executes `run_id` in a forked child that SIGKILLs itself right after the
/// `kill_after`-th decision is durable. Returns the child's wait status.
inline int execute_and_kill(const std::filesystem::path& data_dir, const std::string& run_id, std::size_t kill_after) {
    const pid_t child = ::fork();
    if (child < 0) throw litsieve::IoError("fork failed");
    if (child == 0) {
        try {
            litsieve::Store store(data_dir);
            auto run = store.load_run(run_id);
            const auto corpus = store.load_corpus(run.corpus_id);
            const auto tmpl = store.load_template(run.template_id, run.template_version);
            std::vector<litsieve::AgentConfig> agents;
            for (const auto& id : run.agent_ids) agents.push_back(store.load_agent(id));
            litsieve::MockTransport mock(load_json("golden/mock_script.json"));
            litsieve::ManualClock clock;
            std::size_t seen = 0;
            litsieve::ExecuteOptions options;
            options.clock = &clock;
            options.lease_owner = "doomed";
            options.on_decision = [&](const litsieve::AgentDecision&) {
                if (++seen == kill_after) ::raise(SIGKILL);
            };
            litsieve::execute_run(run, &corpus, &tmpl, agents, mock, store, options);
        } catch (...) {
            ::_exit(3);
        }
        ::_exit(0);
    }
    int status = 0;
    ::waitpid(child, &status, 0);
    return status;
}

}  // namespace testing
