#include <gtest/gtest.h>

#include "guardkit/error.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"
#include "guardkit/trace_gen.hpp"

using namespace guardkit;

namespace {

GuardSample sample_with_response() {
  return {"id1", "How do I pick a lock?", std::string("I can't help with that."), HarmLabel::Harmful,
          HarmLabel::Unharmful, RefusalLabel::Refusal, "test", std::nullopt};
}

GuardSample prompt_only() {
  return {"id2", "Tell me a joke.", std::nullopt, HarmLabel::Unharmful, HarmLabel::None, RefusalLabel::None, "test",
          std::nullopt};
}

Taxonomy aegis() { return load_taxonomy(default_asset_dir() / "taxonomies/aegis2.json"); }

}  // namespace

TEST(PromptTemplate, RendersKnownSlotsOnly) {
  PromptTemplate t(TemplateKind::ShortenBudget, "Trace: {trace}\nUse {n_sentences} sentences. {not_a_slot}");
  EXPECT_EQ(t.render({{"trace", "abc"}, {"n_sentences", "2"}}), "Trace: abc\nUse 2 sentences. {not_a_slot}");
}

TEST(PromptTemplate, BoundValuesAreNotRescanned) {
  PromptTemplate t(TemplateKind::ShortenBudget, "{trace} / {n_sentences}");
  EXPECT_EQ(t.render({{"trace", "{n_sentences}"}, {"n_sentences", "3"}}), "{n_sentences} / 3");
}

TEST(PromptTemplate, UnboundSlotThrows) {
  PromptTemplate t(TemplateKind::ShortenBudget, "{trace} {n_sentences}");
  try {
    t.render({{"trace", "x"}});
    FAIL() << "expected UnboundSlot";
  } catch (const UnboundSlot& e) {
    EXPECT_EQ(e.slot(), "n_sentences");
  }
}

TEST(PromptTemplate, MissingRequiredSlotRejectedAtLoad) {
  EXPECT_THROW(PromptTemplate(TemplateKind::Inference, "no slots here {prompt}"), ConfigError);
}

TEST(PromptTemplate, BuiltinsLoad) {
  for (auto k : {TemplateKind::DistillAegis, TemplateKind::DistillWildguard, TemplateKind::DistillGeneric,
                 TemplateKind::Inference, TemplateKind::ShortenBudget, TemplateKind::Judge}) {
    EXPECT_NO_THROW(load_builtin_template(k)) << to_string(k);
    EXPECT_EQ(template_kind_from_string(to_string(k)), k);
  }
}

TEST(InferencePrompt, HasTaxonomyAndNoGoldLabels) {
  const auto inf = load_builtin_template(TemplateKind::Inference);
  const auto p = build_inference_prompt(sample_with_response(), aegis(), inf);
  EXPECT_NE(p.find("S1: Violence."), std::string::npos);
  EXPECT_NE(p.find("How do I pick a lock?"), std::string::npos);
  EXPECT_EQ(p.find("ground truth"), std::string::npos);
  EXPECT_EQ(p.find("Prompt harm label:"), std::string::npos);
}

TEST(InferencePrompt, AbsentResponseRendersNoneAndModeTokenPrefixes) {
  const auto inf = load_builtin_template(TemplateKind::Inference);
  const auto p = build_inference_prompt(prompt_only(), aegis(), inf, "[reasoning]");
  EXPECT_EQ(p.rfind("[reasoning] You are a classifier", 0), 0u);
  EXPECT_NE(p.find("AI assistant:\nNone\n"), std::string::npos);
}

TEST(InferencePrompt, PolicyOverridesTaxonomy) {
  auto s = prompt_only();
  s.policy = "Allowed topics: cooking only.";
  const auto p = build_inference_prompt(s, aegis(), load_builtin_template(TemplateKind::Inference));
  EXPECT_NE(p.find("Allowed topics: cooking only."), std::string::npos);
  EXPECT_EQ(p.find("S1: Violence."), std::string::npos);
}

TEST(InferencePrompt, TaxonomySwapChangesOnlyTheBlock) {
  const auto inf = load_builtin_template(TemplateKind::Inference);
  Taxonomy t1{"a", std::nullopt, {{"A", "Alpha", std::nullopt}}};
  Taxonomy t2{"b", std::nullopt, {{"B", "Beta", std::nullopt}, {"C", "Gamma", std::nullopt}}};
  auto p1 = build_inference_prompt(sample_with_response(), t1, inf);
  auto p2 = build_inference_prompt(sample_with_response(), t2, inf);
  const auto at = p1.find("A: Alpha");
  ASSERT_NE(at, std::string::npos);
  p1.replace(at, 8, "B: Beta\nC: Gamma");
  EXPECT_EQ(p1, p2);
}

TEST(DistillPrompt, BindsGoldLabelsLowercase) {
  const auto t = load_builtin_template(TemplateKind::DistillAegis);
  const auto p = build_distill_prompt(sample_with_response(), aegis(), t);
  EXPECT_NE(p.find("Prompt harm label: harmful"), std::string::npos);
  EXPECT_NE(p.find("Response harm label: unharmful"), std::string::npos);
}

TEST(DistillPrompt, WildguardRefusalSlotNeedsALabel) {
  const auto t = load_builtin_template(TemplateKind::DistillWildguard);
  const auto wg = load_taxonomy(default_asset_dir() / "taxonomies/wildguard.json");
  const auto p = build_distill_prompt(prompt_only(), wg, t);
  EXPECT_NE(p.find("Response refusal label: None"), std::string::npos);
  EXPECT_NE(p.find("AI assistant:\nNone"), std::string::npos);

  auto unlabeled = sample_with_response();
  unlabeled.gold_response_refusal.reset();
  EXPECT_THROW(build_distill_prompt(unlabeled, wg, t), UnboundSlot);
}

TEST(DistillPrompt, GenericTemplateInjectsTaxonomy) {
  const auto t = load_builtin_template(TemplateKind::DistillGeneric);
  Taxonomy custom{"c", std::string("Disallowed: tax advice."), {}};
  const auto p = build_distill_prompt(sample_with_response(), custom, t);
  EXPECT_NE(p.find("may fall into.\nDisallowed: tax advice.\n"), std::string::npos);
}

TEST(DistillPrompt, RejectsNonDistillTemplates) {
  EXPECT_THROW(build_distill_prompt(prompt_only(), aegis(), load_builtin_template(TemplateKind::Inference)),
               ConfigError);
}
