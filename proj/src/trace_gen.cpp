#include "guardkit/trace_gen.hpp"

#include <spdlog/spdlog.h>

#include "guardkit/error.hpp"
#include "guardkit/parallel.hpp"
#include "guardkit/text.hpp"

namespace guardkit {

std::string build_distill_prompt(const GuardSample& sample, const Taxonomy& taxonomy,
                                 const PromptTemplate& distill_template) {
  if (!is_distill_kind(distill_template.kind())) {
    throw ConfigError(std::string(to_string(distill_template.kind())) + " is not a distillation template");
  }
  SlotBindings bindings{
      {"prompt", sample.prompt},
      {"response", sample.has_response() ? *sample.response : std::string("None")},
      {"prompt_harm_label", std::string(to_string(sample.gold_prompt_harm))},
      {"response_harm_label", std::string(to_string(sample.gold_response_harm))},
  };
  if (distill_template.references("taxonomy")) {
    bindings.emplace("taxonomy", sample.policy ? *sample.policy : render_taxonomy(taxonomy));
  }
  if (!sample.has_response()) {
    bindings.emplace("response_refusal_label", "None");
  } else if (sample.gold_response_refusal) {
    bindings.emplace("response_refusal_label", std::string(to_string(*sample.gold_response_refusal)));
  }
  return distill_template.render(bindings);
}

bool verdict_matches_gold(const ParsedJudgment& verdict, const GuardSample& sample) {
  if (verdict.prompt_harm != sample.gold_prompt_harm) return false;
  if (verdict.response_harm != sample.gold_response_harm) return false;
  if (sample.gold_response_refusal && verdict.response_refusal != *sample.gold_response_refusal) return false;
  return true;
}

namespace {

bool trace_contains_answer(const std::string& trace) {
  for (auto line : text::split_lines(trace)) {
    if (is_answer_line(line)) return true;
  }
  return false;
}

}  // namespace

DistilledRecord distill_sample(const GuardSample& sample, const Taxonomy& taxonomy,
                               const PromptTemplate& distill_template, llm::ChatClient& teacher,
                               const llm::SamplingParams& params, const DistillOptions& options,
                               int first_attempt) {
  DistilledRecord record;
  record.sample = sample;
  record.teacher_model = teacher.endpoint().model_name;

  const std::string prompt = build_distill_prompt(sample, taxonomy, distill_template);
  llm::SamplingParams single = params;
  single.n = 1;

  std::string_view last_failure = reason::kUnparseable;
  record.attempt = first_attempt;
  for (int attempt = first_attempt; attempt <= options.max_attempts; ++attempt) {
    record.attempt = attempt;
    std::string raw;
    try {
      raw = teacher.chat(std::nullopt, prompt, single).front().text;
    } catch (const llm::TransportError& e) {
      spdlog::warn("distill {}: transport error: {}", sample.id, e.what());
      record.raw_output.clear();
      record.reject(reason::kTransportError);
      record.reasons.back() += std::string(": ") + e.what();
      return record;
    }
    record.raw_output = raw;

    auto parsed = parse_judgment(raw, /*reasoning_expected=*/true, options.delimiters);
    auto* verdict = std::get_if<ParsedJudgment>(&parsed);
    if (verdict == nullptr || !verdict->trace || trace_contains_answer(*verdict->trace)) {
      last_failure = reason::kUnparseable;
      continue;
    }
    if (!verdict_matches_gold(*verdict, sample)) {
      last_failure = reason::kTeacherDisagrees;
      record.verdict = *verdict;
      continue;
    }
    record.trace = *verdict->trace;
    record.verdict = std::move(*verdict);
    record.status = RecordStatus::Pending;
    return record;
  }
  record.reject(last_failure);
  return record;
}

DistillResult distill(const std::vector<GuardSample>& samples, const Taxonomy& taxonomy,
                      const PromptTemplate& distill_template, llm::ChatClient& teacher,
                      const llm::SamplingParams& params, const DistillOptions& options) {
  auto records = ordered_parallel_map(samples, options.workers, [&](const GuardSample& s) {
    return distill_sample(s, taxonomy, distill_template, teacher, params, options);
  });
  DistillResult out;
  for (auto& r : records) {
    (r.status == RecordStatus::Rejected ? out.rejected : out.pending).push_back(std::move(r));
  }
  return out;
}

}  // namespace guardkit
