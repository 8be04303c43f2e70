#pragma once

#include "litsieve/corpus.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

struct ParseDiagnostic {
    std::size_t byte_offset = 0;
    std::size_t line = 0;
    /// Citation key when it could be read, otherwise empty.
    std::string entry_key;
    std::string message;
};

struct BibtexParseResult {
    std::vector<PaperRecord> records;
    std::vector<ParseDiagnostic> diagnostics;
};

/// Parses `@article`, `@inproceedings`, `@conference` and `@misc` entries.
/// Garbled or unsupported entries become diagnostics; parsing resumes at the
/// next entry. Input that is not UTF-8 is re-read as Latin-1. Throws
/// IngestionError only for binary input.
BibtexParseResult parse_bibtex(std::string_view bytes, std::string_view source_tag = "bibtex");

/// Decodes TeX accents, dashes, escaped specials and casing braces to plain
/// UTF-8 text with collapsed whitespace.
std::string decode_tex(std::string_view value);

}  // namespace litsieve
