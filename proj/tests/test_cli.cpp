#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <sys/wait.h>

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI with `args` (already shell-quoted), capturing stdout and stderr.
CliResult cli(const testing::TempDir& dir, const std::string& args) {
    const auto err_file = dir.path() / "stderr.txt";
    const std::string command = std::string("'") + LITSIEVE_CLI + "' --data-dir '" + (dir.path() / "data").string() +
                                "' " + args + " 2>'" + err_file.string() + "'";
    CliResult r;
    FILE* pipe = ::popen(command.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = testing::slurp(err_file);
    return r;
}

std::string fx(const std::string& name) { return "'" + testing::fixture(name).string() + "'"; }

}  // namespace

TEST_CASE("command-line pipeline reproduces the golden export") {
    testing::TempDir dir;
    auto r = cli(dir, "ingest --corpus golden --bib " + fx("golden/corpus.bib") + " --truth " + fx("golden/labels.csv"));
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const auto ingest = nlohmann::json::parse(r.out);
    CHECK(ingest[0]["report"]["added"] == 50);
    CHECK(ingest[1]["labels"] == 50);

    r = cli(dir, "--mock " + fx("golden/mock_script.json") + " run --corpus golden --template " + fx("golden/template.json") +
                     " --agents " + fx("golden/agents.json"));
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.starts_with("run run-1: complete (150/150 decisions)\n"));
    CHECK(r.out.find("Metric") != std::string::npos);
    CHECK(r.out.find("TP") != std::string::npos);

    r = cli(dir, "consensus --run run-1 --kind any");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const auto consensus = nlohmann::json::parse(r.out);
    CHECK(consensus["result_set_id"] == "res-1");
    CHECK(consensus["papers"] == 50);
    CHECK(consensus["included"] == 33);

    r = cli(dir, "evaluate --consensus res-1");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("Consensus") != std::string::npos);
    CHECK(r.out.find("Rec.") != std::string::npos);
    CHECK(r.out.find("91.67") != std::string::npos);

    const auto out_file = dir.path() / "export.csv";
    r = cli(dir, "export --consensus res-1 --out '" + out_file.string() + "'");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(testing::slurp(out_file) == testing::slurp(testing::fixture("golden/export_any_include.csv")));

    r = cli(dir, "export --run run-1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.starts_with("paper_id,title,doi,final_verdict,flagged,agent:alpha:verdict"));
}

TEST_CASE("errors exit non-zero with a JSON document") {
    testing::TempDir dir;
    auto r = cli(dir, "evaluate --run run-404");
    CHECK(r.exit_code == 1);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err["error"]["code"] == "not_found");

    r = cli(dir, "export");
    CHECK(r.exit_code == 1);
    CHECK(nlohmann::json::parse(r.err)["error"]["code"] == "validation");

    r = cli(dir, "ingest --bib " + fx("mixed.bib"));
    REQUIRE(r.exit_code == 0);
    const auto ingest = nlohmann::json::parse(r.out);
    CHECK(ingest[0]["records_parsed"] == 10);
    CHECK(ingest[0]["diagnostics"].size() == 2);
    CHECK(ingest[0]["report"]["added"] == 7);
}
