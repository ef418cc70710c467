#pragma once

#include "vlmrrt/oracle.hpp"

#include <string>

namespace vlmrrt {

struct Prompt {
    std::string system_text;
    std::string user_text;
    std::vector<std::uint8_t> image_png;  // empty when the query carries no snapshot
};

/// Assembles the chat prompt for a query. Zero-shot: task instructions plus
/// the current navigation state. Few-shot additionally includes worked
/// example scenes (unobstructed through multi-obstacle) with stated answers.
/// Chain-of-thought additionally prescribes a three-step reasoning scaffold:
/// obstacle identification, relative position analysis, path feasibility
/// evaluation. Every variant ends with the mandatory output-format clause.
Prompt build_prompt(const OracleQuery& query, PromptMode mode);

/// The exact final clause appended to every prompt.
std::string output_format_clause();

}  // namespace vlmrrt
