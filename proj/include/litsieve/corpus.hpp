#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

enum class EntryKind { article, inproceedings, other };

std::string_view to_string(EntryKind kind);
EntryKind entry_kind_from_string(std::string_view name);

/// One bibliographic item flowing through the screening pipeline.
struct PaperRecord {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::optional<std::string> doi;
    /// Originating file name, DOI resolver name, ...
    std::string source;
    EntryKind entry_kind = EntryKind::other;

    bool missing_abstract() const { return abstract.empty(); }

    friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct ProvenanceEvent {
    std::string origin;
    std::string timestamp;  // ISO-8601 UTC
    std::size_t received = 0;
    std::size_t added = 0;
    std::size_t duplicates_removed = 0;
    std::size_t non_papers_excluded = 0;

    friend bool operator==(const ProvenanceEvent&, const ProvenanceEvent&) = default;
};

struct Corpus {
    std::string id;
    std::vector<PaperRecord> papers;
    std::vector<ProvenanceEvent> provenance;

    const PaperRecord* find(std::string_view paper_id) const;
};

struct MergeReport {
    std::size_t added = 0;
    std::size_t duplicates_removed = 0;
    std::size_t non_papers_excluded = 0;
    std::size_t missing_abstract = 0;
    /// Ids assigned to the added records, in input order.
    std::vector<std::string> added_ids;
    /// Ids of incoming records dropped as duplicates.
    std::vector<std::string> duplicate_ids;

    friend bool operator==(const MergeReport&, const MergeReport&) = default;
};

/// Lowercased, `https://doi.org/` / `doi:` prefixes stripped; nullopt when the
/// string is not a DOI.
std::optional<std::string> normalize_doi(std::string_view raw);
bool is_valid_doi(std::string_view doi);

/// DOI when present, otherwise the lowercased title with every
/// non-alphanumeric character removed.
std::string dedup_key(const PaperRecord& record);

/// Adds `records` to `corpus`, dropping duplicates and non-papers (kind
/// `other` without an abstract). Ids that collide with an existing paper of a
/// different key are suffixed to stay unique. Appends one provenance event.
MergeReport merge_into_corpus(Corpus& corpus, const std::vector<PaperRecord>& records,
                              std::string_view origin = "merge");

/// UTF-8 CSV with header `id,title,abstract,authors,year,venue,doi,source`.
std::string export_corpus_csv(const Corpus& corpus);

std::string utc_timestamp_now();

}  // namespace litsieve
