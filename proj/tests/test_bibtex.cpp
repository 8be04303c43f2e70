#include "litsieve/bibtex.hpp"
#include "litsieve/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace litsieve;

TEST_CASE("empty input yields nothing") {
    const auto r = parse_bibtex("");
    CHECK(r.records.empty());
    CHECK(r.diagnostics.empty());
    CHECK(parse_bibtex("  \n\t ").records.empty());
}

TEST_CASE("single article maps fields") {
    const auto r = parse_bibtex(
        "@article{k1, title={A {VR} Graph Tool}, abstract={We present...}, year={2020}}");
    REQUIRE(r.records.size() == 1);
    CHECK(r.diagnostics.empty());
    const auto& p = r.records[0];
    CHECK(p.id == "k1");
    CHECK(p.title == "A VR Graph Tool");
    CHECK(p.abstract == "We present...");
    CHECK(p.year == 2020);
    CHECK(p.entry_kind == EntryKind::article);
}

TEST_CASE("mixed.bib: 12 entries, 2 malformed") {
    const auto r = parse_bibtex(testing::slurp(testing::fixture("mixed.bib")), "mixed.bib");
    CHECK(r.records.size() == 10);
    REQUIRE(r.diagnostics.size() == 2);
    CHECK(r.diagnostics[0].entry_key == "broken_comma");
    CHECK(r.diagnostics[1].entry_key == "unterminated");
    CHECK(r.diagnostics[0].line == 41);

    Corpus c;
    const auto report = merge_into_corpus(c, r.records, "mixed.bib");
    CHECK(report.added == 7);
    CHECK(report.duplicates_removed == 2);
    CHECK(report.non_papers_excluded == 1);
    CHECK(report.duplicate_ids == std::vector<std::string>{"ieee_graphvr", "hand2022_scopus"});
}

TEST_CASE("mixed.bib field decoding") {
    const auto r = parse_bibtex(testing::slurp(testing::fixture("mixed.bib")));
    auto find = [&](const std::string& id) -> const PaperRecord& {
        for (const auto& p : r.records) {
            if (p.id == id) return p;
        }
        FAIL("missing " << id);
        return r.records.front();
    };
    const auto& m = find("mueller2019");
    CHECK(m.authors == std::vector<std::string>{"J\xC3\xB6rg M\xC3\xBCller", "Ana Garc\xC3\xAD" "a"});
    CHECK(m.entry_kind == EntryKind::inproceedings);
    CHECK(m.venue == "Proc. ISMAR");
    CHECK(find("ieee_graphvr").doi == "10.1145/3313831.3376777");
    CHECK(find("ieee_graphvr").title == "GraphVR \xE2\x80\x93 Immersive Exploration of Network Data");
    CHECK(find("quoted2019").title == "Quoted Title Concatenation \xE2\x80\x94 Graphs on Walls");
    CHECK(find("quoted2019").year == 2019);
    CHECK(find("keynote2021").entry_kind == EntryKind::other);
    CHECK(find("joos2021survey").venue == "Computer Graphics Forum");
}

TEST_CASE("tex escapes decode to unicode") {
    CHECK(decode_tex("M\\\"{u}ller") == "M\xC3\xBCller");
    CHECK(decode_tex("{\\'e}t{\\'e}") == "\xC3\xA9t\xC3\xA9");
    CHECK(decode_tex("pages 1--5") == "pages 1\xE2\x80\x93" "5");
    CHECK(decode_tex("{T}he {VR} Case") == "The VR Case");
    CHECK(decode_tex("Stra{\\ss}e") == "Stra\xC3\x9F" "e");
    CHECK(decode_tex("a~b") == "a b");
}

TEST_CASE("unsupported types and titleless entries become diagnostics") {
    const auto r = parse_bibtex("@book{b1, title={A Book}}\n@article{a1, year={2020}}\n@misc{m1, title={Ok}}");
    CHECK(r.records.size() == 1);
    REQUIRE(r.diagnostics.size() == 2);
    CHECK(r.diagnostics[0].entry_key == "b1");
    CHECK(r.diagnostics[1].message == "entry has no title");
}

TEST_CASE("comments, strings and macros") {
    const auto r = parse_bibtex(
        "% line comment\n@comment{ignored}\n@string{vis = \"IEEE VIS\"}\n"
        "@inproceedings{x, title={T}, booktitle=vis # \" 2020\", month=jun}");
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].venue == "IEEE VIS 2020");
}

TEST_CASE("latin-1 input falls back cleanly") {
    const auto r = parse_bibtex("@article{l1, title={J\xF6rg's Graphs}}");
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].title == "J\xC3\xB6rg's Graphs");
}

TEST_CASE("binary input is an ingestion error with offset") {
    const std::string bytes = std::string("@article{x, title={ok}}\n") + std::string("\x00\x01\x02", 3);
    try {
        parse_bibtex(bytes);
        FAIL("expected IngestionError");
    } catch (const IngestionError& e) {
        CHECK(e.byte_offset() == 24);
    }
}

TEST_CASE("property: parsing is total and never yields an empty title") {
    const std::string base = testing::slurp(testing::fixture("mixed.bib"));
    std::mt19937 rng(42);
    const std::string alphabet = "@{}\",=#%\\ \nabc";
    for (int round = 0; round < 500; ++round) {
        std::string s = base;
        const int edits = 1 + static_cast<int>(rng() % 20);
        for (int e = 0; e < edits; ++e) {
            const std::size_t at = rng() % s.size();
            switch (rng() % 3) {
                case 0: s.erase(at, 1 + rng() % 5); break;
                case 1: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
                default: s[at] = alphabet[rng() % alphabet.size()]; break;
            }
            if (s.empty()) s = "@";
        }
        BibtexParseResult r;
        CHECK_NOTHROW(r = parse_bibtex(s));
        for (const auto& p : r.records) CHECK_FALSE(p.title.empty());
    }
}
