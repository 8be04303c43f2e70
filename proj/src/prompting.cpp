#include "litsieve/prompting.hpp"

#include "litsieve/error.hpp"
#include "litsieve/text.hpp"

namespace litsieve {

namespace {

bool has_word(std::string_view haystack, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = haystack.find(word, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !text::is_ascii_alnum(haystack[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right_ok = end == haystack.size() || !text::is_ascii_alnum(haystack[end]);
        if (left_ok && right_ok) return true;
        pos = end;
    }
    return false;
}

// Appends "." unless the sentence already ends with terminal punctuation.
std::string sentence(std::string_view s) {
    std::string out(text::trim(s));
    if (!out.empty() && out.back() != '.' && out.back() != '!' && out.back() != '?') out.push_back('.');
    return out;
}

std::string list_of(const std::vector<std::string>& items) {
    std::vector<std::string> trimmed;
    for (const auto& i : items) trimmed.emplace_back(text::trim(i));
    return text::join(trimmed, ", ");
}

}  // namespace

std::vector<TemplateViolation> validate_template(const PromptTemplate& tmpl) {
    std::vector<TemplateViolation> out;
    if (text::trim(tmpl.topic_title).empty()) out.push_back({"topic_title", "must not be empty"});
    if (!has_word(tmpl.output_instruction, "INCLUDE")) {
        out.push_back({"output_instruction", "must contain the token INCLUDE"});
    }
    if (!has_word(tmpl.output_instruction, "DISCARD")) {
        out.push_back({"output_instruction", "must contain the token DISCARD"});
    }
    for (std::size_t i = 0; i < tmpl.aspects.size(); ++i) {
        if (text::trim(tmpl.aspects[i].name).empty()) {
            out.push_back({"aspects[" + std::to_string(i) + "].name", "must not be empty"});
        }
    }
    for (std::size_t i = 0; i < tmpl.exclusion_rules.size(); ++i) {
        if (text::trim(tmpl.exclusion_rules[i]).empty()) {
            out.push_back({"exclusion_rules[" + std::to_string(i) + "]", "must not be empty"});
        }
    }
    for (std::size_t i = 0; i < tmpl.inclusion_rules.size(); ++i) {
        if (text::trim(tmpl.inclusion_rules[i]).empty()) {
            out.push_back({"inclusion_rules[" + std::to_string(i) + "]", "must not be empty"});
        }
    }
    if (tmpl.version < 0) out.push_back({"version", "must not be negative"});
    return out;
}

std::string render_prompt(const PromptTemplate& tmpl, const PaperRecord& paper, const RenderOptions& options) {
    if (auto violations = validate_template(tmpl); !violations.empty()) {
        std::string message = "invalid prompt template:";
        for (const auto& v : violations) message += " " + v.field + " " + v.message + ";";
        throw ValidationError(message);
    }
    if (text::trim(paper.title).empty()) throw PreconditionError("paper '" + paper.id + "' has no title");

    std::string out;
    out += text::trim(tmpl.role_preamble);
    out += "\n";
    out += task_statement;
    out += "\n\n";
    out += "The research direction is the topic of \"" + std::string(text::trim(tmpl.topic_title)) + "\".\n";

    if (!tmpl.aspects.empty()) {
        std::vector<std::string> names;
        for (const auto& a : tmpl.aspects) names.push_back(a.name);
        out += "\nTherefore include papers that deal with " + list_of(names) + ".";
        for (const auto& a : tmpl.aspects) {
            if (a.example_terms.empty()) continue;
            out += " Examples of " + std::string(text::trim(a.name)) + " are: " + list_of(a.example_terms) + ".";
        }
        out += "\n";
    }
    if (!tmpl.exclusion_rules.empty()) {
        out += "\n";
        for (const auto& rule : tmpl.exclusion_rules) out += "You MUST discard papers that " + sentence(rule) + "\n";
    }
    if (!tmpl.inclusion_rules.empty()) {
        out += "\n";
        for (const auto& rule : tmpl.inclusion_rules) out += "You MUST include papers that " + sentence(rule) + "\n";
    }

    out += "\n";
    out += text::trim(tmpl.output_instruction);
    out += "\n\n";
    out += "Title: " + paper.title + "\n";

    std::string_view abstract = paper.abstract;
    std::string clipped;
    if (text::codepoint_count(abstract) > options.abstract_budget) {
        clipped = std::string(text::utf8_prefix(abstract, options.abstract_budget)) + "…";
        abstract = clipped;
    }
    out += "Abstract: " + std::string(abstract) + "\n";
    return out;
}

}  // namespace litsieve
