#pragma once

#include "litsieve/corpus.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

/// Metadata lookup by DOI. Implementations throw NotFoundError for unknown
/// DOIs and TransportError for retryable network failures.
class DoiResolver {
public:
    virtual ~DoiResolver() = default;
    virtual PaperRecord lookup(const std::string& doi) = 0;
    virtual std::string name() const = 0;
};

/// Validates and normalizes `doi` before any lookup; tags the record with the
/// resolver's name and the normalized DOI.
PaperRecord resolve_doi(std::string_view doi, DoiResolver& resolver);

struct DoiBatchResult {
    std::vector<PaperRecord> records;
    /// doi -> error message, for lookups that failed.
    std::map<std::string, std::string> failures;
};

/// Resolves DOIs with at most `max_in_flight` concurrent lookups. Output order
/// follows input order.
DoiBatchResult resolve_dois(const std::vector<std::string>& dois, DoiResolver& resolver,
                            std::size_t max_in_flight = 4);

/// Maps a CrossRef-style work object (`title`, `abstract`, `author`, `issued`,
/// `container-title`; optionally wrapped in `message`) to a record.
PaperRecord record_from_work_json(const nlohmann::json& work, const std::string& doi);

/// GET `<base_url>/<doi>`.
class HttpDoiResolver : public DoiResolver {
public:
    explicit HttpDoiResolver(std::string base_url,
                             std::chrono::milliseconds timeout = std::chrono::seconds(10));

    PaperRecord lookup(const std::string& doi) override;
    std::string name() const override { return "doi:" + base_url_; }

private:
    std::string base_url_;
    std::chrono::milliseconds timeout_;
};

/// Table-backed resolver for offline use.
class StaticDoiResolver : public DoiResolver {
public:
    explicit StaticDoiResolver(std::map<std::string, PaperRecord> table) : table_(std::move(table)) {}

    PaperRecord lookup(const std::string& doi) override;
    std::string name() const override { return "doi:static"; }

private:
    std::map<std::string, PaperRecord> table_;
};

}  // namespace litsieve
