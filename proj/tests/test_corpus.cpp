#include "litsieve/bibtex.hpp"
#include "litsieve/corpus.hpp"
#include "litsieve/text.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace litsieve;

namespace {

PaperRecord paper(std::string id, std::string title, std::optional<std::string> doi = std::nullopt,
                  EntryKind kind = EntryKind::article, std::string abstract = "Some abstract.") {
    PaperRecord p;
    p.id = std::move(id);
    p.title = std::move(title);
    p.doi = std::move(doi);
    p.entry_kind = kind;
    p.abstract = std::move(abstract);
    return p;
}

}  // namespace

TEST_CASE("doi normalization") {
    CHECK(normalize_doi("10.1145/3313831.3376777") == "10.1145/3313831.3376777");
    CHECK(normalize_doi("https://doi.org/10.1145/ABC.1") == "10.1145/abc.1");
    CHECK(normalize_doi("doi:10.1111/CGF.14001") == "10.1111/cgf.14001");
    CHECK_FALSE(normalize_doi("abc").has_value());
    CHECK_FALSE(normalize_doi("10.1145").has_value());
    CHECK(is_valid_doi("10.1111/test.1"));
    CHECK_FALSE(is_valid_doi("11.1111/test.1"));
}

TEST_CASE("dedup_key normalizes titles and prefers the doi") {
    CHECK(dedup_key(paper("a", "Graph--Viz in VR!")) == dedup_key(paper("b", "graph viz in vr")));
    CHECK(dedup_key(paper("a", "Graph Viz", "10.1/x")) == dedup_key(paper("b", "Something else", "10.1/x")));
    CHECK(dedup_key(paper("a", "Graph Viz", "10.1/x")) != dedup_key(paper("b", "Graph Viz")));
    CHECK(dedup_key(paper("a", "Über Graphen")) == dedup_key(paper("b", "über graphen")));
    CHECK(dedup_key(paper("a", "Graph \xE2\x80\x93 Viz")) == dedup_key(paper("b", "graph viz")));
}

TEST_CASE("dedup_key is stable for the ACM/IEEE pair in mixed.bib") {
    const auto parsed = parse_bibtex(testing::slurp(testing::fixture("mixed.bib")));
    const PaperRecord* acm = nullptr;
    const PaperRecord* ieee = nullptr;
    for (const auto& r : parsed.records) {
        if (r.id == "acm_graphvr") acm = &r;
        if (r.id == "ieee_graphvr") ieee = &r;
    }
    REQUIRE(acm);
    REQUIRE(ieee);
    CHECK(acm->title != ieee->title);
    CHECK(dedup_key(*acm) == dedup_key(*ieee));
}

TEST_CASE("merge drops duplicates and non-papers") {
    Corpus c;
    const std::vector<PaperRecord> batch = {
        paper("a", "First Paper"),
        paper("b", "first paper!"),
        paper("c", "Talk", std::nullopt, EntryKind::other, ""),
        paper("d", "Dataset", std::nullopt, EntryKind::other, "has an abstract"),
        paper("e", "Untitled abstract", std::nullopt, EntryKind::article, ""),
    };
    const auto report = merge_into_corpus(c, batch, "batch");
    CHECK(report.added == 3);
    CHECK(report.duplicates_removed == 1);
    CHECK(report.non_papers_excluded == 1);
    CHECK(report.missing_abstract == 1);
    CHECK(report.added_ids == std::vector<std::string>{"a", "d", "e"});
    REQUIRE(c.provenance.size() == 1);
    CHECK(c.provenance[0].received == 5);
    CHECK(c.provenance[0].origin == "batch");
}

TEST_CASE("merge of an empty list leaves the corpus unchanged") {
    Corpus c;
    merge_into_corpus(c, {paper("a", "A")});
    const auto before = c.papers;
    const auto report = merge_into_corpus(c, {});
    CHECK(report == MergeReport{});
    CHECK(c.papers == before);
}

TEST_CASE("merging a corpus into itself adds nothing") {
    Corpus c;
    merge_into_corpus(c, {paper("a", "A"), paper("b", "B"), paper("c", "C", "10.5/c")});
    const auto copy = c.papers;
    const auto report = merge_into_corpus(c, copy);
    CHECK(report.added == 0);
    CHECK(report.duplicates_removed == copy.size());
    CHECK(c.papers == copy);
}

TEST_CASE("colliding ids with different keys are suffixed") {
    Corpus c;
    merge_into_corpus(c, {paper("k", "One")});
    const auto report = merge_into_corpus(c, {paper("k", "Two"), paper("k", "Three")});
    CHECK(report.added_ids == std::vector<std::string>{"k-2", "k-3"});
    CHECK(c.find("k-3")->title == "Three");
}

TEST_CASE("property: merge is idempotent and conserves counts") {
    std::mt19937 rng(7);
    const std::vector<std::string> words = {"graph", "Graph", "vr", "VR!", "layout", "edge", "node", "--"};
    for (int round = 0; round < 200; ++round) {
        std::vector<PaperRecord> records;
        const int n = static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            std::string title = words[rng() % words.size()] + " " + words[rng() % words.size()];
            if (text::trim(title).empty() || title == "-- --") title = "x";
            std::optional<std::string> doi;
            if (rng() % 3 == 0) doi = "10.1/" + std::to_string(rng() % 4);
            const auto kind = rng() % 4 == 0 ? EntryKind::other : EntryKind::article;
            records.push_back(paper("r" + std::to_string(i), title, doi, kind, rng() % 2 ? "abs" : ""));
        }
        Corpus once;
        const auto r1 = merge_into_corpus(once, records);
        CHECK(r1.added + r1.duplicates_removed + r1.non_papers_excluded == records.size());

        Corpus twice = once;
        const auto r2 = merge_into_corpus(twice, records);
        CHECK(r2.added + r2.duplicates_removed + r2.non_papers_excluded == records.size());
        CHECK(r2.added == 0);
        CHECK(twice.papers == once.papers);

        std::set<std::string> keys, ids;
        for (const auto& p : once.papers) {
            CHECK(keys.insert(dedup_key(p)).second);
            CHECK(ids.insert(p.id).second);
        }
        std::size_t total = 0;
        for (const auto& e : twice.provenance) total += e.added + e.duplicates_removed + e.non_papers_excluded;
        std::size_t dropped = 0;
        for (const auto& e : twice.provenance) dropped += e.duplicates_removed + e.non_papers_excluded;
        CHECK(total == twice.papers.size() + dropped);
    }
}

TEST_CASE("corpus csv export") {
    Corpus c;
    auto p = paper("a", "Graphs, \"quoted\"", "10.1/a");
    p.authors = {"Ada Lovelace", "Alan Turing"};
    p.year = 2020;
    p.source = "bibtex:x.bib";
    merge_into_corpus(c, {p});
    const auto csv = export_corpus_csv(c);
    CHECK(csv ==
          "id,title,abstract,authors,year,venue,doi,source\r\n"
          "a,\"Graphs, \"\"quoted\"\"\",Some abstract.,Ada Lovelace; Alan Turing,2020,,10.1/a,bibtex:x.bib\r\n");
}
