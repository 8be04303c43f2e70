#pragma once

#include "litsieve/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace litsieve {

struct Aspect {
    std::string name;
    std::vector<std::string> example_terms;

    friend bool operator==(const Aspect&, const Aspect&) = default;
};

/// Screening prompt: role framing, research topic, aspects with example terms,
/// hard exclusion/inclusion rules and the fixed answer-format instruction.
struct PromptTemplate {
    static constexpr std::string_view default_role_preamble =
        "You are a professor in computer science conducting a literature review.";
    static constexpr std::string_view default_output_instruction =
        "Below is the title and abstract. You must only answer with INCLUDE or DISCARD and a 2-sentence "
        "reason of why.";

    std::string id;
    std::string role_preamble{default_role_preamble};
    std::string topic_title;
    std::vector<Aspect> aspects;
    std::vector<std::string> exclusion_rules;
    std::vector<std::string> inclusion_rules;
    std::string output_instruction{default_output_instruction};
    /// Assigned by the store on save; 0 for unsaved templates.
    std::int64_t version = 0;

    friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

struct TemplateViolation {
    std::string field;
    std::string message;

    friend bool operator==(const TemplateViolation&, const TemplateViolation&) = default;
};

std::vector<TemplateViolation> validate_template(const PromptTemplate& tmpl);

struct RenderOptions {
    /// Abstracts longer than this many code points are cut and marked with "…".
    std::size_t abstract_budget = 8000;
};

/// Fixed sentence between the role preamble and the topic.
inline constexpr std::string_view task_statement =
    "Please decide and classify if the following paper belongs to a specific research direction or not. "
    "For this, you are provided with the title and the abstract, which should give you sufficient "
    "information for an informed and accurate decision.";

/// Throws ValidationError (listing every violation) for invalid templates and
/// PreconditionError for papers without a title.
std::string render_prompt(const PromptTemplate& tmpl, const PaperRecord& paper, const RenderOptions& options = {});

}  // namespace litsieve
