#include "http_util.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

namespace litsieve::detail {

bool is_absolute_http_url(std::string_view url) {
    std::string_view rest;
    if (url.starts_with("http://")) rest = url.substr(7);
    else if (url.starts_with("https://")) rest = url.substr(8);
    else return false;
    const auto host_end = rest.find('/');
    const auto host = rest.substr(0, host_end);
    return !host.empty() && host.find_first_of(" \t") == std::string_view::npos;
}

SplitUrl split_url(std::string_view url) {
    if (!is_absolute_http_url(url)) throw ValidationError("not an absolute http(s) URL: '" + std::string(url) + "'");
    const std::size_t scheme_end = url.find("://") + 3;
    const auto slash = url.find('/', scheme_end);
    SplitUrl out;
    out.origin = std::string(url.substr(0, slash));
    out.path = slash == std::string_view::npos ? "" : std::string(url.substr(slash));
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

std::string encode_path(std::string_view raw) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (char ch : raw) {
        const auto c = static_cast<unsigned char>(ch);
        if (text::is_ascii_alnum(ch) || ch == '-' || ch == '_' || ch == '.' || ch == '~' || ch == '/') {
            out.push_back(ch);
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

}  // namespace litsieve::detail
