#include "litsieve/doi.hpp"

#include "http_util.hpp"
#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace litsieve {

namespace {

// CrossRef returns most text fields as single-element arrays.
std::string first_text(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_array() && !value.empty() && value.front().is_string()) return value.front().get<std::string>();
    return {};
}

std::string strip_markup(std::string_view s) {
    std::string out;
    bool in_tag = false;
    for (char c : s) {
        if (c == '<') in_tag = true;
        else if (c == '>' && in_tag) in_tag = false;
        else if (!in_tag) out.push_back(c);
    }
    return text::collapse_whitespace(out);
}

}  // namespace

PaperRecord record_from_work_json(const nlohmann::json& document, const std::string& doi) {
    const nlohmann::json& work = document.contains("message") && document["message"].is_object()
                                     ? document["message"]
                                     : document;
    if (!work.is_object()) throw ValidationError("resolver response is not a JSON object");

    PaperRecord record;
    record.id = doi;
    record.doi = doi;
    record.title = text::collapse_whitespace(first_text(work.value("title", nlohmann::json())));
    record.abstract = strip_markup(first_text(work.value("abstract", nlohmann::json())));
    if (auto it = work.find("author"); it != work.end() && it->is_array()) {
        for (const auto& a : *it) {
            std::string name;
            if (a.is_string()) {
                name = a.get<std::string>();
            } else if (a.is_object()) {
                std::string given = a.value("given", "");
                std::string family = a.value("family", "");
                name = given.empty() ? family : family.empty() ? given : given + " " + family;
                if (name.empty()) name = a.value("name", "");
            }
            name = text::collapse_whitespace(name);
            if (!name.empty()) record.authors.push_back(std::move(name));
        }
    }
    if (auto it = work.find("issued"); it != work.end()) {
        if (it->is_number_integer()) {
            record.year = it->get<int>();
        } else if (it->is_object() && it->contains("date-parts")) {
            const auto& parts = (*it)["date-parts"];
            if (parts.is_array() && !parts.empty() && parts[0].is_array() && !parts[0].empty() &&
                parts[0][0].is_number_integer()) {
                record.year = parts[0][0].get<int>();
            }
        }
    }
    if (std::string venue = first_text(work.value("container-title", nlohmann::json())); !venue.empty()) {
        record.venue = text::collapse_whitespace(venue);
    }
    const std::string type = work.value("type", "");
    if (type == "journal-article") record.entry_kind = EntryKind::article;
    else if (type == "proceedings-article") record.entry_kind = EntryKind::inproceedings;
    else record.entry_kind = record.abstract.empty() ? EntryKind::other : EntryKind::article;
    if (record.title.empty()) throw ValidationError("resolver returned no title for " + doi);
    return record;
}

PaperRecord resolve_doi(std::string_view doi, DoiResolver& resolver) {
    auto normalized = normalize_doi(doi);
    if (!normalized) throw ValidationError("invalid DOI '" + std::string(doi) + "'");
    PaperRecord record = resolver.lookup(*normalized);
    record.doi = *normalized;
    if (record.id.empty()) record.id = *normalized;
    record.source = resolver.name();
    return record;
}

DoiBatchResult resolve_dois(const std::vector<std::string>& dois, DoiResolver& resolver, std::size_t max_in_flight) {
    std::vector<std::optional<PaperRecord>> slots(dois.size());
    std::vector<std::string> errors(dois.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < dois.size(); i = next++) {
            try {
                slots[i] = resolve_doi(dois[i], resolver);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t n = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(dois.size(), 1));
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    }

    DoiBatchResult result;
    for (std::size_t i = 0; i < dois.size(); ++i) {
        if (slots[i]) result.records.push_back(std::move(*slots[i]));
        else result.failures[dois[i]] = errors[i];
    }
    return result;
}

HttpDoiResolver::HttpDoiResolver(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
    detail::split_url(base_url_);
}

PaperRecord HttpDoiResolver::lookup(const std::string& doi) {
    const auto url = detail::split_url(base_url_);
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    auto res = client.Get(url.path + "/" + detail::encode_path(doi), {{"Accept", "application/json"}});
    if (!res) throw TransportError("DOI lookup failed: " + httplib::to_string(res.error()));
    if (res->status == 404) throw NotFoundError("unknown DOI " + doi);
    if (res->status == 429 || res->status >= 500) {
        throw TransportError("DOI resolver returned HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) throw ValidationError("DOI resolver returned HTTP " + std::to_string(res->status));
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("DOI resolver sent malformed JSON: ") + e.what());
    }
    return record_from_work_json(body, doi);
}

PaperRecord StaticDoiResolver::lookup(const std::string& doi) {
    auto it = table_.find(doi);
    if (it == table_.end()) throw NotFoundError("unknown DOI " + doi);
    return it->second;
}

}  // namespace litsieve
