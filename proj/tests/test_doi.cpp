#include "litsieve/doi.hpp"
#include "litsieve/error.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

using namespace litsieve;

namespace {

class CountingResolver : public DoiResolver {
public:
    PaperRecord lookup(const std::string& doi) override {
        const int now = ++in_flight;
        int seen = max_in_flight.load();
        while (now > seen && !max_in_flight.compare_exchange_weak(seen, now)) {
        }
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(3));
        --in_flight;
        if (doi.ends_with("missing")) throw NotFoundError("unknown DOI " + doi);
        PaperRecord p;
        p.title = "Title for " + doi;
        p.abstract = "abstract";
        p.entry_kind = EntryKind::article;
        return p;
    }
    std::string name() const override { return "doi:counting"; }

    std::atomic<int> calls{0};
    std::atomic<int> in_flight{0};
    std::atomic<int> max_in_flight{0};
};

/// Local stand-in for a CrossRef-style works endpoint.
struct FakeCrossref {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    FakeCrossref() {
        server.Get(R"(/works/(.+))", [](const httplib::Request& req, httplib::Response& res) {
            const std::string doi = req.matches[1];
            if (doi == "10.1111/test.1") {
                res.set_content(testing::slurp(testing::fixture("crossref_work.json")), "application/json");
            } else if (doi == "10.1111/busy") {
                res.status = 503;
            } else if (doi == "10.1111/garbage") {
                res.set_content("{not json", "application/json");
            } else {
                res.status = 404;
            }
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeCrossref() {
        server.stop();
        thread.join();
    }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port) + "/works"; }
};

}  // namespace

TEST_CASE("invalid doi is rejected before any lookup") {
    CountingResolver r;
    CHECK_THROWS_AS(resolve_doi("abc", r), ValidationError);
    CHECK(r.calls == 0);
}

TEST_CASE("static resolver returns its table entry verbatim") {
    PaperRecord fixture;
    fixture.title = "Fixture Paper";
    fixture.abstract = "Fixture abstract";
    fixture.authors = {"Ada Lovelace"};
    fixture.year = 2020;
    fixture.entry_kind = EntryKind::article;
    StaticDoiResolver r({{"10.1111/test.1", fixture}});
    const auto got = resolve_doi("https://doi.org/10.1111/TEST.1", r);
    CHECK(got.title == fixture.title);
    CHECK(got.abstract == fixture.abstract);
    CHECK(got.authors == fixture.authors);
    CHECK(got.year == fixture.year);
    CHECK(got.doi == "10.1111/test.1");
    CHECK(got.source == "doi:static");
    CHECK_THROWS_AS(resolve_doi("10.1111/unknown", r), NotFoundError);
}

TEST_CASE("crossref work json mapping") {
    const auto rec = record_from_work_json(testing::load_json("crossref_work.json"), "10.1111/test.1");
    CHECK(rec.title == "Immersive Graph Exploration");
    CHECK(rec.abstract == "We study graphs in VR.");
    CHECK(rec.authors == std::vector<std::string>{"Ada Lovelace", "Turing"});
    CHECK(rec.year == 2021);
    CHECK(rec.venue == "Computer Graphics Forum");
    CHECK(rec.entry_kind == EntryKind::article);
    CHECK_THROWS_AS(record_from_work_json(nlohmann::json::object(), "10.1/x"), ValidationError);
}

TEST_CASE("http resolver against a local works endpoint") {
    FakeCrossref server;
    HttpDoiResolver r(server.base(), std::chrono::seconds(2));
    const auto rec = resolve_doi("10.1111/test.1", r);
    CHECK(rec.title == "Immersive Graph Exploration");
    CHECK(rec.source == "doi:" + server.base());
    CHECK_THROWS_AS(resolve_doi("10.1111/nope", r), NotFoundError);
    CHECK_THROWS_AS(resolve_doi("10.1111/busy", r), TransportError);
    CHECK_THROWS_AS(resolve_doi("10.1111/garbage", r), ValidationError);
}

TEST_CASE("unreachable resolver is a transport error") {
    int port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    HttpDoiResolver r("http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(300));
    CHECK_THROWS_AS(resolve_doi("10.1111/test.1", r), TransportError);
}

TEST_CASE("batch resolution keeps order and bounds concurrency") {
    CountingResolver r;
    std::vector<std::string> dois;
    for (int i = 0; i < 20; ++i) dois.push_back("10.1/p" + std::to_string(i));
    dois.push_back("10.1/missing");
    const auto batch = resolve_dois(dois, r, 3);
    REQUIRE(batch.records.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(batch.records[static_cast<std::size_t>(i)].doi == dois[static_cast<std::size_t>(i)]);
    CHECK(batch.failures.size() == 1);
    CHECK(batch.failures.count("10.1/missing") == 1);
    CHECK(r.max_in_flight <= 3);
}

TEST_CASE("a resolved doi already in the corpus is flagged duplicate on merge") {
    CountingResolver r;
    Corpus c;
    merge_into_corpus(c, {resolve_doi("10.1/dup", r)});
    const auto report = merge_into_corpus(c, {resolve_doi("doi:10.1/DUP", r)});
    CHECK(report.added == 0);
    CHECK(report.duplicates_removed == 1);
}
