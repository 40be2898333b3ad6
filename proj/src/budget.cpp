#include "guardkit/budget.hpp"

#include <cstdio>

#include <spdlog/spdlog.h>

#include "guardkit/error.hpp"
#include "guardkit/parallel.hpp"
#include "guardkit/text.hpp"

namespace guardkit {

void BudgetConfig::validate() const {
  if (n_sentences < 1 || n_sentences > 10) throw ConfigError("n_sentences must be in [1, 10]");
  if (tolerance < 0) throw ConfigError("tolerance must be non-negative");
  if (max_attempts < 1) throw ConfigError("max_attempts must be positive");
}

bool within_budget(int count, const BudgetConfig& config) noexcept {
  const int diff = count > config.n_sentences ? count - config.n_sentences : config.n_sentences - count;
  return diff <= config.tolerance;
}

namespace {

// Teachers sometimes wrap the rewrite in a reasoning span; keep what follows it.
std::string clean_rewrite(const std::string& raw, const ReasoningDelimiters& delims) {
  std::string_view body = raw;
  const auto close = body.find(delims.close);
  if (close != std::string_view::npos) body = body.substr(close + delims.close.size());
  return std::string(text::trim(body));
}

}  // namespace

DistilledRecord shorten_trace(const DistilledRecord& record, const BudgetConfig& config, const ShortenContext& ctx) {
  config.validate();
  DistilledRecord out = record;
  const std::string prompt = ctx.shorten_template.render(
      {{"trace", record.trace}, {"n_sentences", std::to_string(config.n_sentences)}});
  llm::SamplingParams params = ctx.params;
  params.n = 1;

  int measured = count_sentences(record.trace);
  std::string last_problem;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    std::string rewrite;
    try {
      rewrite = clean_rewrite(ctx.teacher.chat(std::nullopt, prompt, params).front().text, ctx.delimiters);
    } catch (const llm::TransportError& e) {
      last_problem = e.what();
      spdlog::warn("shorten {} attempt {}: {}", record.sample.id, attempt, e.what());
      continue;
    }
    measured = count_sentences(rewrite);
    if (!within_budget(measured, config)) {
      last_problem = std::to_string(measured) + " sentences";
      continue;
    }
    if (!ctx.leakage.scan(rewrite).empty()) {
      last_problem = "label leakage";
      continue;
    }
    out.trace = std::move(rewrite);
    out.budget = BudgetInfo{config.n_sentences, measured};
    return out;
  }
  spdlog::debug("shorten {} failed: {}", record.sample.id, last_problem);
  out.budget = BudgetInfo{config.n_sentences, measured};
  out.reject(reason::kBudgetViolation);
  return out;
}

std::vector<DistilledRecord> shorten_all(const std::vector<DistilledRecord>& records, const BudgetConfig& config,
                                         const ShortenContext& ctx, std::size_t workers) {
  return ordered_parallel_map(records, workers,
                              [&](const DistilledRecord& r) { return shorten_trace(r, config, ctx); });
}

BudgetStats budget_stats(const std::map<int, std::vector<std::string>>& corpora) {
  BudgetStats stats;
  for (const auto& [budget, traces] : corpora) {
    double wps_sum = 0.0;
    double words_sum = 0.0;
    std::size_t n = 0;
    for (const auto& trace : traces) {
      const int sentences = count_sentences(trace);
      if (sentences == 0) {
        ++stats.skipped;
        continue;
      }
      const auto words = static_cast<double>(text::word_count(trace));
      wps_sum += words / sentences;
      words_sum += words;
      ++n;
    }
    if (n == 0) continue;
    stats.rows.push_back({budget, wps_sum / static_cast<double>(n), words_sum / static_cast<double>(n), n});
  }
  return stats;
}

std::string budget_stats_csv(const BudgetStats& stats) {
  std::string out = "budget,mean_words_per_sentence,mean_total_words,n\n";
  char buf[128];
  for (const auto& row : stats.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f,%zu\n", row.n_sentences, row.mean_words_per_sentence,
                  row.mean_total_words, row.sample_count);
    out += buf;
  }
  return out;
}

}  // namespace guardkit
