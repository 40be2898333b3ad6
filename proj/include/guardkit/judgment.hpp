#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "guardkit/labels.hpp"

namespace guardkit {

/// Labels extracted from one model completion.
struct ParsedJudgment {
  HarmLabel prompt_harm = HarmLabel::None;
  HarmLabel response_harm = HarmLabel::None;
  RefusalLabel response_refusal = RefusalLabel::None;
  std::optional<std::string> trace;  // reasoning span, delimiters excluded
  std::string raw;

  friend bool operator==(const ParsedJudgment&, const ParsedJudgment&) = default;
};

enum class ParseErrorKind { MissingPromptHarm, BadLabel, UnterminatedTrace };

struct ParseError {
  ParseErrorKind kind;
  std::string detail;
  std::string raw;
};

std::string_view to_string(ParseErrorKind kind) noexcept;

struct ReasoningDelimiters {
  std::string open = "<think>";
  std::string close = "</think>";
};

using ParseResult = std::variant<ParsedJudgment, ParseError>;

/// Splits off the reasoning span (when expected) and reads the three labeled
/// answer lines from the remainder. The last occurrence of each line wins,
/// matching is case-insensitive and tolerant of quotes and whitespace, and
/// text after the answer block is ignored. Only "Prompt harm" is mandatory.
/// Never throws.
ParseResult parse_judgment(std::string_view raw, bool reasoning_expected,
                           const ReasoningDelimiters& delimiters = {});

/// Canonical answer block, e.g. "Prompt harm: harmful\nResponse harm: None\n
/// Response refusal: None". The refusal line is omitted when refusal is nullopt.
std::string format_answer_block(HarmLabel prompt_harm, HarmLabel response_harm,
                                std::optional<RefusalLabel> refusal);
std::string format_answer_block(const ParsedJudgment& judgment);

/// True if the line would be read as one of the three answer lines.
bool is_answer_line(std::string_view line);

}  // namespace guardkit
