#include "litsieve/corpus.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

#include <chrono>
#include <ctime>
#include <regex>
#include <unordered_set>

namespace litsieve {

std::string_view to_string(EntryKind kind) {
    switch (kind) {
        case EntryKind::article: return "article";
        case EntryKind::inproceedings: return "inproceedings";
        case EntryKind::other: return "other";
    }
    return "other";
}

EntryKind entry_kind_from_string(std::string_view name) {
    if (name == "article") return EntryKind::article;
    if (name == "inproceedings") return EntryKind::inproceedings;
    if (name == "other") return EntryKind::other;
    throw ValidationError("unknown entry_kind '" + std::string(name) + "'");
}

const PaperRecord* Corpus::find(std::string_view paper_id) const {
    for (const auto& p : papers) {
        if (p.id == paper_id) return &p;
    }
    return nullptr;
}

bool is_valid_doi(std::string_view doi) {
    static const std::regex pattern(R"(^10\.[0-9]+(\.[0-9]+)*/\S+$)");
    return std::regex_match(doi.begin(), doi.end(), pattern);
}

std::optional<std::string> normalize_doi(std::string_view raw) {
    std::string doi = text::to_lower_ascii(text::trim(raw));
    for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                                    "http://dx.doi.org/", "doi.org/", "doi:"}) {
        if (doi.starts_with(prefix)) {
            doi.erase(0, prefix.size());
            break;
        }
    }
    doi = std::string(text::trim(doi));
    if (!is_valid_doi(doi)) return std::nullopt;
    return doi;
}

namespace {

bool is_unicode_punctuation(char32_t cp) {
    return (cp >= 0xA0 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2000 && cp <= 0x206F) ||
           (cp >= 0x3000 && cp <= 0x303F);
}

}  // namespace

std::string dedup_key(const PaperRecord& record) {
    if (record.doi) return *record.doi;
    std::string key;
    key.reserve(record.title.size());
    std::size_t pos = 0;
    const std::string_view title = record.title;
    while (pos < title.size()) {
        char32_t cp = text::next_codepoint(title, pos);
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (text::is_ascii_alnum(c)) key.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c);
            continue;
        }
        if (is_unicode_punctuation(cp)) continue;
        if (cp >= 0xC0 && cp <= 0xDE) cp += 0x20;
        text::append_utf8(key, cp);
    }
    return key;
}

MergeReport merge_into_corpus(Corpus& corpus, const std::vector<PaperRecord>& records,
                              std::string_view origin) {
    MergeReport report;
    std::unordered_set<std::string> keys;
    std::unordered_set<std::string> ids;
    for (const auto& p : corpus.papers) {
        keys.insert(dedup_key(p));
        ids.insert(p.id);
    }

    for (const auto& incoming : records) {
        if (incoming.entry_kind == EntryKind::other && incoming.abstract.empty()) {
            ++report.non_papers_excluded;
            continue;
        }
        const std::string key = dedup_key(incoming);
        if (keys.contains(key)) {
            ++report.duplicates_removed;
            report.duplicate_ids.push_back(incoming.id);
            continue;
        }
        PaperRecord record = incoming;
        if (record.id.empty()) record.id = key;
        if (ids.contains(record.id)) {
            const std::string base = record.id;
            for (int n = 2;; ++n) {
                record.id = base + "-" + std::to_string(n);
                if (!ids.contains(record.id)) break;
            }
        }
        if (record.missing_abstract()) ++report.missing_abstract;
        keys.insert(key);
        ids.insert(record.id);
        report.added_ids.push_back(record.id);
        corpus.papers.push_back(std::move(record));
        ++report.added;
    }

    corpus.provenance.push_back(ProvenanceEvent{
        .origin = std::string(origin),
        .timestamp = utc_timestamp_now(),
        .received = records.size(),
        .added = report.added,
        .duplicates_removed = report.duplicates_removed,
        .non_papers_excluded = report.non_papers_excluded,
    });
    return report;
}

std::string export_corpus_csv(const Corpus& corpus) {
    std::string out = text::csv::row({"id", "title", "abstract", "authors", "year", "venue", "doi", "source"});
    for (const auto& p : corpus.papers) {
        out += text::csv::row({
            p.id,
            p.title,
            p.abstract,
            text::join(p.authors, "; "),
            p.year ? std::to_string(*p.year) : std::string(),
            p.venue.value_or(""),
            p.doi.value_or(""),
            p.source,
        });
    }
    return out;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace litsieve
