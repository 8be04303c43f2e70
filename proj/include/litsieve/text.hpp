#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve::text {

/// Byte offset of the first invalid UTF-8 sequence, or nullopt if the whole
/// buffer is well-formed.
std::optional<std::size_t> first_invalid_utf8(std::string_view bytes);

std::string latin1_to_utf8(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);

/// Decodes one code point starting at `pos` and advances it. Input must be
/// valid UTF-8.
char32_t next_codepoint(std::string_view s, std::size_t& pos);

std::size_t codepoint_count(std::string_view s);

/// First `max_codepoints` code points of `s` (never splits a sequence).
std::string_view utf8_prefix(std::string_view s, std::size_t max_codepoints);

std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool is_ascii_alnum(char c);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

namespace csv {

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// One record terminated by CRLF.
std::string row(const std::vector<std::string>& fields);

/// Parses RFC-4180 text (CRLF or LF line endings). Empty trailing lines are
/// skipped.
std::vector<std::vector<std::string>> parse(std::string_view data);

}  // namespace csv

}  // namespace litsieve::text
