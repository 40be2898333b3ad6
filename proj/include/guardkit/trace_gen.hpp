#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "guardkit/judgment.hpp"
#include "guardkit/llm_client.hpp"
#include "guardkit/record.hpp"
#include "guardkit/sample.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"

namespace guardkit {

/// Binds a sample and its gold labels into a distillation template. An absent
/// response renders as "None"; labels render lowercase.
/// Throws UnboundSlot if the template asks for a refusal label the sample lacks,
/// ConfigError if the template is not a distillation kind.
std::string build_distill_prompt(const GuardSample& sample, const Taxonomy& taxonomy,
                                 const PromptTemplate& distill_template);

/// The teacher was shown the gold labels, so its verdict has to repeat them.
/// Refusal is compared only when the sample carries a refusal label.
bool verdict_matches_gold(const ParsedJudgment& verdict, const GuardSample& sample);

struct DistillOptions {
  int max_attempts = 3;
  std::size_t workers = 1;
  ReasoningDelimiters delimiters;
};

struct DistillResult {
  std::vector<DistilledRecord> pending;
  std::vector<DistilledRecord> rejected;  // quarantine
};

/// Runs attempts first_attempt..max_attempts for one sample. Transport errors
/// reject the sample instead of propagating.
DistilledRecord distill_sample(const GuardSample& sample, const Taxonomy& taxonomy,
                               const PromptTemplate& distill_template, llm::ChatClient& teacher,
                               const llm::SamplingParams& params, const DistillOptions& options,
                               int first_attempt = 1);

/// Every input sample lands in exactly one of pending/rejected, in input order.
DistillResult distill(const std::vector<GuardSample>& samples, const Taxonomy& taxonomy,
                      const PromptTemplate& distill_template, llm::ChatClient& teacher,
                      const llm::SamplingParams& params, const DistillOptions& options);

}  // namespace guardkit
