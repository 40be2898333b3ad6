#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "guardkit/llm_client.hpp"
#include "guardkit/quality_filter.hpp"
#include "guardkit/record.hpp"
#include "guardkit/sentences.hpp"
#include "guardkit/templates.hpp"

namespace guardkit {

struct BudgetConfig {
  int n_sentences = 1;
  int tolerance = 0;
  int max_attempts = 3;

  void validate() const;
};

/// |count - n| <= tolerance
bool within_budget(int count, const BudgetConfig& config) noexcept;

struct ShortenContext {
  const PromptTemplate& shorten_template;
  llm::ChatClient& teacher;
  llm::SamplingParams params;
  const LeakageDetector& leakage;
  ReasoningDelimiters delimiters;
};

/// Asks the teacher to rewrite the trace in n sentences. On success the new
/// trace is installed and the record stays Accepted; otherwise it is rejected
/// with BudgetViolation and budget.measured holds the last count.
DistilledRecord shorten_trace(const DistilledRecord& record, const BudgetConfig& config, const ShortenContext& ctx);

std::vector<DistilledRecord> shorten_all(const std::vector<DistilledRecord>& records, const BudgetConfig& config,
                                         const ShortenContext& ctx, std::size_t workers = 1);

struct BudgetRow {
  int n_sentences = 0;
  double mean_words_per_sentence = 0.0;
  double mean_total_words = 0.0;
  std::size_t sample_count = 0;
};

struct BudgetStats {
  std::vector<BudgetRow> rows;  // sorted by budget
  std::size_t skipped = 0;      // traces with no countable sentence
};

BudgetStats budget_stats(const std::map<int, std::vector<std::string>>& corpora);

/// budget,mean_words_per_sentence,mean_total_words,n
std::string budget_stats_csv(const BudgetStats& stats);

}  // namespace guardkit
