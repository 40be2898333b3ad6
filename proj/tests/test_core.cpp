#include <gtest/gtest.h>

#include <variant>

#include "guardkit/error.hpp"
#include "guardkit/judgment.hpp"
#include "guardkit/rng.hpp"
#include "guardkit/sample.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"
#include "guardkit/text.hpp"

using namespace guardkit;

namespace {

ParsedJudgment ok(const ParseResult& r) {
  if (const auto* e = std::get_if<ParseError>(&r)) ADD_FAILURE() << "parse error: " << e->detail;
  return std::get<ParsedJudgment>(r);
}

ParseErrorKind err(const ParseResult& r) {
  EXPECT_TRUE(std::holds_alternative<ParseError>(r));
  return std::get<ParseError>(r).kind;
}

}  // namespace

TEST(Labels, RoundTripAndCase) {
  EXPECT_EQ(to_string(HarmLabel::Harmful), "harmful");
  EXPECT_EQ(to_string(RefusalLabel::None), "None");
  EXPECT_EQ(parse_harm_label("UNHARMFUL"), HarmLabel::Unharmful);
  EXPECT_EQ(parse_harm_label("none"), HarmLabel::None);
  EXPECT_EQ(parse_refusal_label("Compliance"), RefusalLabel::Compliance);
  EXPECT_FALSE(parse_harm_label("maybe").has_value());
}

TEST(GuardSample, JsonRoundTrip) {
  GuardSample s{"a1", "hello", std::string("hi"), HarmLabel::Unharmful, HarmLabel::Unharmful,
                RefusalLabel::Compliance, "wgmix", std::nullopt};
  EXPECT_EQ(sample_from_json(to_json(s)), s);
  const auto j = to_json(s);
  EXPECT_EQ(j.at("prompt_harm"), "unharmful");
  EXPECT_FALSE(j.contains("policy"));
}

TEST(GuardSample, AbsentResponseForcesNoneLabels) {
  const auto j = nlohmann::json::parse(
      R"({"id":"x","prompt":"p","response":null,"prompt_harm":"harmful","response_harm":null,"response_refusal":null,"source":"s"})");
  const auto s = sample_from_json(j);
  EXPECT_FALSE(s.has_response());
  EXPECT_EQ(s.gold_response_harm, HarmLabel::None);
  EXPECT_EQ(s.gold_response_refusal, RefusalLabel::None);

  GuardSample bad = s;
  bad.gold_response_harm = HarmLabel::Harmful;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = s;
  bad.prompt.clear();
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = s;
  bad.gold_prompt_harm = HarmLabel::None;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Taxonomy, AegisFirstAndLastLines) {
  const auto t = load_taxonomy(default_asset_dir() / "taxonomies/aegis2.json");
  ASSERT_EQ(t.categories.size(), 22u);
  const auto block = render_taxonomy(t);
  const auto lines = text::split_lines(block);
  EXPECT_EQ(lines.front(), "S1: Violence.");
  EXPECT_EQ(lines.back(), "S22: Immoral/Unethical.");
  EXPECT_EQ(render_taxonomy(t), block);
}

TEST(Taxonomy, AegisRenderMatchesBundledDistillTemplate) {
  const auto t = load_taxonomy(default_asset_dir() / "taxonomies/aegis2.json");
  const auto tmpl = load_builtin_template(TemplateKind::DistillAegis);
  EXPECT_NE(tmpl.body().find("\n" + render_taxonomy(t) + "\n"), std::string::npos);
}

TEST(Taxonomy, WildguardPreambleMatchesBundledDistillTemplate) {
  const auto t = load_taxonomy(default_asset_dir() / "taxonomies/wildguard.json");
  ASSERT_TRUE(t.preamble.has_value());
  const auto tmpl = load_builtin_template(TemplateKind::DistillWildguard);
  EXPECT_NE(tmpl.body().find(render_taxonomy(t)), std::string::npos);
}

TEST(Taxonomy, PreambleOnlyAndOrderedCategories) {
  Taxonomy pre{"p", std::string("Only cooking questions are allowed."), {}};
  EXPECT_EQ(render_taxonomy(pre), "Only cooking questions are allowed.");

  Taxonomy two{"t", std::nullopt, {{"A", "Alpha", std::nullopt}, {"B", "Beta", std::nullopt}}};
  EXPECT_EQ(render_taxonomy(two), "A: Alpha\nB: Beta");

  Taxonomy dup{"d", std::nullopt, {{"A", "Alpha", std::nullopt}, {"A", "Again", std::nullopt}}};
  EXPECT_THROW(render_taxonomy(dup), ValidationError);
}

TEST(Taxonomy, JsonRoundTripIsIdempotent) {
  const auto t = load_taxonomy(default_asset_dir() / "taxonomies/aegis2.json");
  const auto again = taxonomy_from_json(to_json(t));
  EXPECT_EQ(render_taxonomy(again), render_taxonomy(t));
}

TEST(ParseJudgment, ReasoningAndAnswer) {
  const auto j = ok(parse_judgment(
      "<think>step A. step B.</think>\nPrompt harm: harmful\nResponse harm: unharmful\nResponse refusal: refusal",
      true));
  EXPECT_EQ(j.prompt_harm, HarmLabel::Harmful);
  EXPECT_EQ(j.response_harm, HarmLabel::Unharmful);
  EXPECT_EQ(j.response_refusal, RefusalLabel::Refusal);
  EXPECT_EQ(j.trace, "step A. step B.");
}

TEST(ParseJudgment, NoneLabelsWithoutTrace) {
  const auto j = ok(parse_judgment("Prompt harm: harmful\nResponse harm: None\nResponse refusal: None", true));
  EXPECT_EQ(j.prompt_harm, HarmLabel::Harmful);
  EXPECT_EQ(j.response_harm, HarmLabel::None);
  EXPECT_EQ(j.response_refusal, RefusalLabel::None);
  EXPECT_FALSE(j.trace.has_value());
}

TEST(ParseJudgment, Errors) {
  EXPECT_EQ(err(parse_judgment("I refuse to answer.", false)), ParseErrorKind::MissingPromptHarm);
  EXPECT_EQ(err(parse_judgment("Prompt harm: dangerous", false)), ParseErrorKind::BadLabel);
  EXPECT_EQ(err(parse_judgment("Prompt harm: None", false)), ParseErrorKind::BadLabel);
  EXPECT_EQ(err(parse_judgment("<think>never closed\nPrompt harm: harmful", true)),
            ParseErrorKind::UnterminatedTrace);
  EXPECT_EQ(std::get<ParseError>(parse_judgment("garbage", false)).raw, "garbage");
}

TEST(ParseJudgment, QuotedBlock) {
  const auto j =
      ok(parse_judgment("\"Prompt harm: unharmful\nResponse harm: harmful\nResponse refusal: compliance\"", false));
  EXPECT_EQ(j.prompt_harm, HarmLabel::Unharmful);
  EXPECT_EQ(j.response_harm, HarmLabel::Harmful);
  EXPECT_EQ(j.response_refusal, RefusalLabel::Compliance);
}

TEST(ParseJudgment, LastOccurrenceWinsAndTrailingTextIgnored) {
  const auto j = ok(parse_judgment(
      "Prompt harm: harmful\nmaybe not\nPROMPT HARM :  unharmful.\nResponse harm: harmful\nThanks for asking!",
      false));
  EXPECT_EQ(j.prompt_harm, HarmLabel::Unharmful);
  EXPECT_EQ(j.response_harm, HarmLabel::Harmful);
}

TEST(ParseJudgment, CustomDelimiters) {
  ReasoningDelimiters d{"[[", "]]"};
  const auto j = ok(parse_judgment("[[why]]\nPrompt harm: harmful", true, d));
  EXPECT_EQ(j.trace, "why");
}

TEST(ParseJudgment, RoundTripProperty) {
  const HarmLabel harms[] = {HarmLabel::Harmful, HarmLabel::Unharmful, HarmLabel::None};
  const RefusalLabel refusals[] = {RefusalLabel::Refusal, RefusalLabel::Compliance, RefusalLabel::None};
  const char* wrappers[][2] = {{"", ""}, {"\"", "\""}, {"  ", "\n\n"}, {"```\n", "\n```"}};
  for (auto p : {HarmLabel::Harmful, HarmLabel::Unharmful}) {
    for (auto r : harms) {
      for (auto f : refusals) {
        for (const auto& w : wrappers) {
          ParsedJudgment j{p, r, f, std::nullopt, ""};
          const std::string raw = std::string(w[0]) + format_answer_block(j) + w[1];
          auto back = ok(parse_judgment(raw, false));
          back.raw.clear();
          EXPECT_EQ(back, j) << raw;
        }
      }
    }
  }
}

TEST(ParseJudgment, TotalityOnRandomInput) {
  SeededRng rng(5);
  const std::string alphabet = "Prompt harm:Response refusal<think></think>\n\"' none harmful";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto len = rng.below(80);
    for (std::size_t k = 0; k < len; ++k) s += alphabet[rng.below(alphabet.size())];
    const auto r = parse_judgment(s, rng.below(2) == 0);
    EXPECT_TRUE(std::holds_alternative<ParsedJudgment>(r) || std::holds_alternative<ParseError>(r));
  }
}

TEST(Text, Fnv1aKnownValue) {
  EXPECT_EQ(text::hex64(text::fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(text::hex64(text::fnv1a64("a")), "af63dc4c8601ec8c");
}
