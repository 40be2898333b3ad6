#include "guardkit/judgment.hpp"

#include <array>

#include "guardkit/text.hpp"

namespace guardkit {

namespace {

constexpr std::string_view kDecoration = "\"'`*";

std::string_view strip_decoration(std::string_view s, std::string_view extra_tail = {}) {
  for (bool changed = true; changed;) {
    changed = false;
    s = text::trim(s);
    if (!s.empty() && kDecoration.find(s.front()) != std::string_view::npos) {
      s.remove_prefix(1);
      changed = true;
    }
    if (!s.empty() && (kDecoration.find(s.back()) != std::string_view::npos ||
                       extra_tail.find(s.back()) != std::string_view::npos)) {
      s.remove_suffix(1);
      changed = true;
    }
  }
  return s;
}

enum class AnswerKey { PromptHarm, ResponseHarm, ResponseRefusal };

constexpr std::array<std::pair<AnswerKey, std::string_view>, 3> kKeys{{
    {AnswerKey::PromptHarm, "prompt harm"},
    {AnswerKey::ResponseHarm, "response harm"},
    {AnswerKey::ResponseRefusal, "response refusal"},
}};

struct AnswerLine {
  AnswerKey key;
  std::string_view value;
};

std::optional<AnswerLine> match_answer_line(std::string_view line) {
  line = strip_decoration(line);
  for (const auto& [key, name] : kKeys) {
    if (!text::istarts_with(line, name)) continue;
    std::string_view rest = line.substr(name.size());
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    if (rest.empty() || rest.front() != ':') continue;
    rest.remove_prefix(1);
    return AnswerLine{key, strip_decoration(rest, ".<>")};
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ParseErrorKind kind) noexcept {
  switch (kind) {
    case ParseErrorKind::MissingPromptHarm: return "MissingPromptHarm";
    case ParseErrorKind::BadLabel: return "BadLabel";
    case ParseErrorKind::UnterminatedTrace: break;
  }
  return "UnterminatedTrace";
}

bool is_answer_line(std::string_view line) { return match_answer_line(line).has_value(); }

ParseResult parse_judgment(std::string_view raw, bool reasoning_expected,
                           const ReasoningDelimiters& delimiters) {
  std::optional<std::string> trace;
  std::string_view rest = raw;

  if (reasoning_expected) {
    const auto open = raw.find(delimiters.open);
    if (open != std::string_view::npos) {
      const auto body = open + delimiters.open.size();
      const auto close = raw.find(delimiters.close, body);
      if (close == std::string_view::npos) {
        return ParseError{ParseErrorKind::UnterminatedTrace, "reasoning span opened but never closed",
                          std::string(raw)};
      }
      trace = std::string(text::trim(raw.substr(body, close - body)));
      rest = raw.substr(close + delimiters.close.size());
    } else if (const auto close = raw.find(delimiters.close); close != std::string_view::npos) {
      // Some teachers omit the opening tag and start reasoning immediately.
      trace = std::string(text::trim(raw.substr(0, close)));
      rest = raw.substr(close + delimiters.close.size());
    }
    if (trace && trace->empty()) trace.reset();
  }

  std::optional<std::string_view> values[3];
  for (std::string_view line : text::split_lines(rest)) {
    if (auto m = match_answer_line(line)) values[static_cast<int>(m->key)] = m->value;
  }

  const auto& prompt_value = values[static_cast<int>(AnswerKey::PromptHarm)];
  if (!prompt_value) {
    return ParseError{ParseErrorKind::MissingPromptHarm, "no 'Prompt harm:' line", std::string(raw)};
  }

  ParsedJudgment out;
  out.raw = std::string(raw);
  out.trace = std::move(trace);

  auto bad = [&](std::string_view what, std::string_view token) {
    return ParseError{ParseErrorKind::BadLabel,
                      std::string(what) + " has unrecognized label '" + std::string(token) + "'",
                      std::string(raw)};
  };

  auto ph = parse_harm_label(*prompt_value);
  if (!ph || *ph == HarmLabel::None) return bad("Prompt harm", *prompt_value);
  out.prompt_harm = *ph;

  if (const auto& v = values[static_cast<int>(AnswerKey::ResponseHarm)]) {
    auto rh = parse_harm_label(*v);
    if (!rh) return bad("Response harm", *v);
    out.response_harm = *rh;
  }
  if (const auto& v = values[static_cast<int>(AnswerKey::ResponseRefusal)]) {
    auto rr = parse_refusal_label(*v);
    if (!rr) return bad("Response refusal", *v);
    out.response_refusal = *rr;
  }
  return out;
}

std::string format_answer_block(HarmLabel prompt_harm, HarmLabel response_harm,
                                std::optional<RefusalLabel> refusal) {
  std::string out = "Prompt harm: ";
  out += to_string(prompt_harm);
  out += "\nResponse harm: ";
  out += to_string(response_harm);
  if (refusal) {
    out += "\nResponse refusal: ";
    out += to_string(*refusal);
  }
  return out;
}

std::string format_answer_block(const ParsedJudgment& j) {
  return format_answer_block(j.prompt_harm, j.response_harm, j.response_refusal);
}

}  // namespace guardkit
