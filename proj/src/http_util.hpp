#pragma once

#include <string>
#include <string_view>

namespace litsieve::detail {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/', no trailing slash unless root
};

/// Throws ValidationError unless `url` is absolute http(s).
SplitUrl split_url(std::string_view url);

bool is_absolute_http_url(std::string_view url);

/// Percent-encodes everything outside the unreserved set and '/'.
std::string encode_path(std::string_view raw);

}  // namespace litsieve::detail
