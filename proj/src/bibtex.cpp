#include "litsieve/bibtex.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>

namespace litsieve {

namespace {

// (accent command, base letter) -> precomposed UTF-8.
const std::map<std::pair<char, char>, std::string_view>& accent_table() {
    static const std::map<std::pair<char, char>, std::string_view> table = [] {
        std::map<std::pair<char, char>, std::string_view> t;
        auto add = [&t](char accent, std::string_view bases, std::initializer_list<std::string_view> glyphs) {
            std::size_t i = 0;
            for (auto g : glyphs) t[{accent, bases[i++]}] = g;
        };
        add('\'', "aeiouyAEIOUYcCnNsSzZlr",
            {"á", "é", "í", "ó", "ú", "ý", "Á", "É", "Í", "Ó", "Ú", "Ý", "ć", "Ć", "ń", "Ń", "ś", "Ś", "ź", "Ź", "ĺ", "ŕ"});
        add('`', "aeiouAEIOU", {"à", "è", "ì", "ò", "ù", "À", "È", "Ì", "Ò", "Ù"});
        add('"', "aeiouyAEIOU", {"ä", "ë", "ï", "ö", "ü", "ÿ", "Ä", "Ë", "Ï", "Ö", "Ü"});
        add('^', "aeiouAEIOU", {"â", "ê", "î", "ô", "û", "Â", "Ê", "Î", "Ô", "Û"});
        add('~', "anoANO", {"ã", "ñ", "õ", "Ã", "Ñ", "Õ"});
        add('c', "cCsS", {"ç", "Ç", "ş", "Ş"});
        add('v', "cCsSzZrReEnN", {"č", "Č", "š", "Š", "ž", "Ž", "ř", "Ř", "ě", "Ě", "ň", "Ň"});
        add('r', "aAuU", {"å", "Å", "ů", "Ů"});
        add('H', "oOuU", {"ő", "Ő", "ű", "Ű"});
        add('=', "aeiouAEIOU", {"ā", "ē", "ī", "ō", "ū", "Ā", "Ē", "Ī", "Ō", "Ū"});
        add('.', "zZeEI", {"ż", "Ż", "ė", "Ė", "İ"});
        add('u', "aAgG", {"ă", "Ă", "ğ", "Ğ"});
        add('k', "aAeE", {"ą", "Ą", "ę", "Ę"});
        return t;
    }();
    return table;
}

char32_t combining_mark(char accent) {
    switch (accent) {
        case '`': return 0x300;
        case '\'': return 0x301;
        case '^': return 0x302;
        case '~': return 0x303;
        case '=': return 0x304;
        case 'u': return 0x306;
        case '.': return 0x307;
        case '"': return 0x308;
        case 'r': return 0x30A;
        case 'H': return 0x30B;
        case 'v': return 0x30C;
        case 'c': return 0x327;
        case 'k': return 0x328;
        default: return 0;
    }
}

const std::unordered_map<std::string_view, std::string_view>& symbol_commands() {
    static const std::unordered_map<std::string_view, std::string_view> table = {
        {"ss", "ß"}, {"ae", "æ"}, {"AE", "Æ"}, {"oe", "œ"}, {"OE", "Œ"}, {"o", "ø"},
        {"O", "Ø"}, {"aa", "å"}, {"AA", "Å"}, {"l", "ł"}, {"L", "Ł"}, {"i", "ı"},
        {"j", "ȷ"}, {"textendash", "–"}, {"textemdash", "—"}, {"ldots", "…"},
        {"dots", "…"}, {"textregistered", "®"}, {"texttrademark", "™"}, {"copyright", "©"},
        {"textquoteright", "’"}, {"textquoteleft", "‘"}, {"textquotedblleft", "“"},
        {"textquotedblright", "”"}, {"textasciitilde", "~"}, {"textbackslash", "\\"},
        {"alpha", "α"}, {"beta", "β"}, {"gamma", "γ"}, {"delta", "δ"}, {"mu", "μ"},
        {"pi", "π"}, {"sigma", "σ"}, {"lambda", "λ"}, {"times", "×"}, {"textdegree", "°"},
    };
    return table;
}

bool is_accent_command(char c) {
    switch (c) {
        case '\'': case '`': case '"': case '^': case '~': case '=': case '.':
            return true;
        default:
            return false;
    }
}

class TexDecoder {
public:
    explicit TexDecoder(std::string_view in) : in_(in) {}

    std::string run() {
        while (pos_ < in_.size()) step();
        return text::collapse_whitespace(out_);
    }

private:
    void step() {
        const char c = in_[pos_];
        switch (c) {
            case '\\':
                command();
                return;
            case '{':
            case '}':
            case '$':
                ++pos_;
                return;
            case '~':
                out_.push_back(' ');
                ++pos_;
                return;
            case '-':
                dashes();
                return;
            default:
                out_.push_back(c);
                ++pos_;
        }
    }

    void dashes() {
        std::size_t n = 0;
        while (pos_ < in_.size() && in_[pos_] == '-') {
            ++n;
            ++pos_;
        }
        if (n == 2) {
            out_ += "–";
        } else if (n == 3) {
            out_ += "—";
        } else {
            out_.append(n, '-');
        }
    }

    // Reads the argument of an accent: `{x}`, `{\i}`, `x` or `\i`.
    std::string accent_argument() {
        skip_spaces();
        std::string base;
        bool braced = false;
        if (pos_ < in_.size() && in_[pos_] == '{') {
            braced = true;
            ++pos_;
            skip_spaces();
        }
        if (pos_ < in_.size() && in_[pos_] == '\\') {
            ++pos_;
            std::string name = read_letters();
            if (name == "i") {
                base = "i";
            } else if (name == "j") {
                base = "j";
            } else {
                auto it = symbol_commands().find(name);
                if (it != symbol_commands().end()) base = it->second;
            }
        } else if (pos_ < in_.size() && in_[pos_] != '}') {
            std::size_t start = pos_;
            text::next_codepoint(in_, pos_);
            base = std::string(in_.substr(start, pos_ - start));
        }
        if (braced) {
            // Anything else inside the group is kept as plain text.
            while (pos_ < in_.size() && in_[pos_] != '}') step();
            if (pos_ < in_.size()) ++pos_;
        }
        return base;
    }

    void emit_accented(char accent, const std::string& base) {
        if (base.size() == 1) {
            auto it = accent_table().find({accent, base[0]});
            if (it != accent_table().end()) {
                out_ += it->second;
                return;
            }
        }
        out_ += base;
        if (!base.empty()) {
            if (char32_t mark = combining_mark(accent)) text::append_utf8(out_, mark);
        }
    }

    void command() {
        ++pos_;  // backslash
        if (pos_ >= in_.size()) return;
        const char c = in_[pos_];
        if (is_accent_command(c)) {
            ++pos_;
            emit_accented(c, accent_argument());
            return;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            ++pos_;
            if (c == '\\') {
                out_.push_back(' ');
            } else if (c != '/') {
                out_.push_back(c);  // \& \% \_ \{ \} \# \$
            }
            return;
        }
        std::string name = read_letters();
        if (name.size() == 1 && combining_mark(name[0]) != 0 && !symbol_commands().contains(name)) {
            emit_accented(name[0], accent_argument());
            return;
        }
        if (auto it = symbol_commands().find(name); it != symbol_commands().end()) {
            out_ += it->second;
            if (pos_ < in_.size() && in_[pos_] == '{' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '}') pos_ += 2;
            else skip_one_space();
            return;
        }
        // Unknown macro such as \emph or \textbf: drop the name, keep its argument.
        skip_one_space();
    }

    std::string read_letters() {
        std::size_t start = pos_;
        while (pos_ < in_.size() && std::isalpha(static_cast<unsigned char>(in_[pos_]))) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    void skip_spaces() {
        while (pos_ < in_.size() && in_[pos_] == ' ') ++pos_;
    }

    void skip_one_space() {
        if (pos_ < in_.size() && in_[pos_] == ' ') ++pos_;
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    std::string out_;
};

struct SyntaxError {
    std::size_t offset;
    std::string message;
    std::string key;
};

struct RawEntry {
    std::string type;
    std::string key;
    std::size_t offset = 0;
    std::vector<std::pair<std::string, std::string>> fields;  // lowercased name -> raw value
};

bool is_name_char(char c) {
    return text::is_ascii_alnum(c) || c == '_' || c == '-' || c == ':' || c == '.' || c == '+' || c == '/';
}

class BibScanner {
public:
    BibScanner(std::string_view in, std::unordered_map<std::string, std::string>& macros)
        : in_(in), macros_(macros) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    bool at_end() const { return pos_ >= in_.size(); }

    /// Moves to the next `@`. Text between entries is a comment.
    bool next_entry_start() {
        while (pos_ < in_.size() && in_[pos_] != '@') ++pos_;
        return pos_ < in_.size();
    }

    /// Next `@` that begins a line (after optional blanks), strictly after `from`.
    std::size_t recovery_point(std::size_t from) const {
        for (std::size_t i = from + 1; i < in_.size(); ++i) {
            if (in_[i] == '@' && starts_line(i)) return i;
        }
        return in_.size();
    }

    RawEntry entry() {
        RawEntry e;
        e.offset = pos_;
        current_key_.clear();
        ++pos_;  // '@'
        skip_ws();
        e.type = text::to_lower_ascii(read_name());
        if (e.type.empty()) fail("missing entry type after '@'");
        skip_ws();
        if (pos_ >= in_.size() || (in_[pos_] != '{' && in_[pos_] != '(')) fail("expected '{' after entry type");
        const char close = in_[pos_] == '{' ? '}' : ')';
        ++pos_;

        if (e.type == "comment" || e.type == "preamble") {
            skip_balanced(close);
            return e;
        }
        if (e.type == "string") {
            skip_ws();
            auto [name, value] = field();
            macros_[name] = value;
            skip_ws();
            expect(close);
            return e;
        }

        skip_ws();
        std::size_t key_start = pos_;
        while (pos_ < in_.size() && in_[pos_] != ',' && in_[pos_] != close &&
               !std::isspace(static_cast<unsigned char>(in_[pos_]))) {
            ++pos_;
        }
        e.key = std::string(in_.substr(key_start, pos_ - key_start));
        current_key_ = e.key;
        skip_ws();
        if (pos_ < in_.size() && in_[pos_] == close) {
            ++pos_;
            return e;
        }
        expect(',');
        while (true) {
            skip_ws();
            if (pos_ >= in_.size()) fail("unexpected end of input inside entry '" + e.key + "'");
            if (in_[pos_] == close) {
                ++pos_;
                break;
            }
            e.fields.push_back(field());
            skip_ws();
            if (pos_ < in_.size() && in_[pos_] == ',') {
                ++pos_;
                continue;
            }
            skip_ws();
            if (pos_ < in_.size() && in_[pos_] == close) {
                ++pos_;
                break;
            }
            fail("expected ',' or end of entry after field '" + e.fields.back().first + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw SyntaxError{pos_, message, current_key_}; }

    bool starts_line(std::size_t i) const {
        while (i > 0) {
            const char p = in_[i - 1];
            if (p == '\n') return true;
            if (p != ' ' && p != '\t' && p != '\r') return false;
            --i;
        }
        return true;
    }

    void expect(char c) {
        if (pos_ >= in_.size() || in_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < in_.size()) {
            const char c = in_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '%') {
                while (pos_ < in_.size() && in_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string read_name() {
        std::size_t start = pos_;
        while (pos_ < in_.size() && is_name_char(in_[pos_])) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    std::pair<std::string, std::string> field() {
        std::string name = text::to_lower_ascii(read_name());
        if (name.empty()) fail("expected field name");
        skip_ws();
        expect('=');
        std::string value;
        while (true) {
            skip_ws();
            value += value_part();
            skip_ws();
            if (pos_ < in_.size() && in_[pos_] == '#') {
                ++pos_;
                continue;
            }
            break;
        }
        return {std::move(name), std::move(value)};
    }

    std::string value_part() {
        if (pos_ >= in_.size()) fail("expected field value");
        const char c = in_[pos_];
        if (c == '{') {
            ++pos_;
            return delimited('}');
        }
        if (c == '"') {
            ++pos_;
            return delimited('"');
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < in_.size() && std::isdigit(static_cast<unsigned char>(in_[pos_]))) ++pos_;
            return std::string(in_.substr(start, pos_ - start));
        }
        std::string macro = text::to_lower_ascii(read_name());
        if (macro.empty()) fail("expected field value");
        if (auto it = macros_.find(macro); it != macros_.end()) return it->second;
        return macro;
    }

    // Content up to the matching terminator; nested braces are kept verbatim.
    std::string delimited(char terminator) {
        std::size_t start = pos_;
        int depth = 0;
        while (pos_ < in_.size()) {
            const char c = in_[pos_];
            if (c == '\\' && pos_ + 1 < in_.size()) {
                pos_ += 2;
                continue;
            }
            if (c == '@' && depth >= 0 && starts_line(pos_) && looks_like_entry(pos_)) {
                fail("unterminated field value");
            }
            if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (depth == 0) {
                    if (terminator == '}') {
                        std::string v(in_.substr(start, pos_ - start));
                        ++pos_;
                        return v;
                    }
                    fail("unbalanced '}' in quoted value");
                }
                --depth;
            } else if (c == '"' && terminator == '"' && depth == 0) {
                std::string v(in_.substr(start, pos_ - start));
                ++pos_;
                return v;
            }
            ++pos_;
        }
        fail("unterminated field value");
    }

    bool looks_like_entry(std::size_t at) const {
        std::size_t i = at + 1;
        std::size_t letters = 0;
        while (i < in_.size() && std::isalpha(static_cast<unsigned char>(in_[i]))) {
            ++i;
            ++letters;
        }
        while (i < in_.size() && (in_[i] == ' ' || in_[i] == '\t')) ++i;
        return letters > 0 && i < in_.size() && (in_[i] == '{' || in_[i] == '(');
    }

    void skip_balanced(char close) {
        int depth = 0;
        while (pos_ < in_.size()) {
            const char c = in_[pos_++];
            if (c == '{') {
                ++depth;
            } else if (c == '}' || c == ')') {
                if (depth == 0 && c == close) return;
                if (c == '}') --depth;
            }
        }
        fail("unterminated entry");
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    std::unordered_map<std::string, std::string>& macros_;
    std::string current_key_;
};

std::size_t line_of(std::string_view in, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < in.size(); ++i) {
        if (in[i] == '\n') ++line;
    }
    return line;
}

std::optional<EntryKind> supported_kind(std::string_view type) {
    if (type == "article") return EntryKind::article;
    if (type == "inproceedings" || type == "conference") return EntryKind::inproceedings;
    if (type == "misc") return EntryKind::other;
    return std::nullopt;
}

// Splits an author list on top-level " and ".
std::vector<std::string> split_authors(std::string_view raw) {
    std::vector<std::string> names;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '{') ++depth;
        else if (raw[i] == '}') --depth;
        else if (depth == 0 && std::isspace(static_cast<unsigned char>(raw[i])) && i + 4 < raw.size() &&
                 raw.substr(i + 1, 3) == "and" && std::isspace(static_cast<unsigned char>(raw[i + 4]))) {
            names.emplace_back(raw.substr(start, i - start));
            start = i + 5;
            i += 4;
        }
    }
    names.emplace_back(raw.substr(start));

    std::vector<std::string> out;
    for (auto& n : names) {
        std::string decoded = decode_tex(n);
        if (decoded.empty()) continue;
        // "Last, First" -> "First Last"
        if (auto comma = decoded.find(','); comma != std::string::npos) {
            std::string last(text::trim(std::string_view(decoded).substr(0, comma)));
            std::string first(text::trim(std::string_view(decoded).substr(comma + 1)));
            decoded = first.empty() ? last : first + " " + last;
        }
        out.push_back(std::move(decoded));
    }
    return out;
}

std::optional<int> parse_year(std::string_view raw) {
    for (std::size_t i = 0; i + 4 <= raw.size(); ++i) {
        bool digits = true;
        for (std::size_t k = 0; k < 4; ++k) digits = digits && std::isdigit(static_cast<unsigned char>(raw[i + k]));
        if (digits && (i + 4 == raw.size() || !std::isdigit(static_cast<unsigned char>(raw[i + 4])))) {
            return std::stoi(std::string(raw.substr(i, 4)));
        }
        while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) ++i;
    }
    return std::nullopt;
}

std::size_t first_binary_byte(std::string_view bytes) {
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const auto c = static_cast<unsigned char>(bytes[i]);
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r' && c != '\f') return i;
    }
    return std::string_view::npos;
}

}  // namespace

std::string decode_tex(std::string_view value) {
    return TexDecoder(value).run();
}

BibtexParseResult parse_bibtex(std::string_view bytes, std::string_view source_tag) {
    BibtexParseResult result;
    if (text::trim(bytes).empty()) return result;

    if (auto bad = first_binary_byte(bytes); bad != std::string_view::npos) {
        throw IngestionError("input is not text", bad);
    }
    std::string owned;
    std::string_view in = bytes;
    if (text::first_invalid_utf8(bytes)) {
        owned = text::latin1_to_utf8(bytes);
        in = owned;
    }
    if (in.starts_with("\xEF\xBB\xBF")) in.remove_prefix(3);

    std::unordered_map<std::string, std::string> macros = {
        {"jan", "January"}, {"feb", "February"}, {"mar", "March"}, {"apr", "April"},
        {"may", "May"}, {"jun", "June"}, {"jul", "July"}, {"aug", "August"},
        {"sep", "September"}, {"oct", "October"}, {"nov", "November"}, {"dec", "December"},
    };
    BibScanner scanner(in, macros);

    auto diagnose = [&](std::size_t offset, std::string key, std::string message) {
        result.diagnostics.push_back(ParseDiagnostic{
            .byte_offset = offset,
            .line = line_of(in, offset),
            .entry_key = std::move(key),
            .message = std::move(message),
        });
    };

    while (scanner.next_entry_start()) {
        const std::size_t start = scanner.pos();
        RawEntry raw;
        try {
            raw = scanner.entry();
        } catch (const SyntaxError& err) {
            diagnose(err.offset, err.key, err.message);
            scanner.seek(scanner.recovery_point(start));
            continue;
        }
        if (raw.type == "comment" || raw.type == "preamble" || raw.type == "string") continue;

        auto kind = supported_kind(raw.type);
        if (!kind) {
            diagnose(raw.offset, raw.key, "unsupported entry type '@" + raw.type + "'");
            continue;
        }

        PaperRecord record;
        record.id = raw.key;
        record.entry_kind = *kind;
        record.source = std::string(source_tag);
        for (const auto& [name, value] : raw.fields) {
            if (name == "title") {
                record.title = decode_tex(value);
            } else if (name == "abstract") {
                record.abstract = decode_tex(value);
            } else if (name == "author") {
                record.authors = split_authors(value);
            } else if (name == "year") {
                record.year = parse_year(value);
            } else if (name == "journal" || name == "booktitle") {
                if (!record.venue || name == "journal") {
                    std::string venue = decode_tex(value);
                    if (!venue.empty()) record.venue = std::move(venue);
                }
            } else if (name == "doi") {
                record.doi = normalize_doi(value);
            }
        }
        if (record.title.empty()) {
            diagnose(raw.offset, raw.key, "entry has no title");
            continue;
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

}  // namespace litsieve
