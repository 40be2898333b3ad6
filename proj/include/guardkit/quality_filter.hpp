#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/llm_client.hpp"
#include "guardkit/record.hpp"
#include "guardkit/templates.hpp"

namespace guardkit {

const std::vector<std::string>& default_leakage_patterns();

struct FilterConfig {
  std::vector<std::string> leakage_patterns = default_leakage_patterns();
  int ngram_n = 4;
  int ngram_repeat_threshold = 3;
  double repeat_fraction_threshold = 0.15;
  int max_trace_sentences = 40;
  int max_trace_words = 600;

  void validate() const;
};

FilterConfig filter_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FilterConfig& c);

/// Case-insensitive regexes compiled once; invalid patterns fail here, at load time.
class LeakageDetector {
 public:
  explicit LeakageDetector(const std::vector<std::string>& patterns);

  /// One finding per match of each pattern.
  std::vector<FilterFinding> scan(std::string_view trace) const;

 private:
  std::vector<std::pair<std::string, std::regex>> patterns_;
};

std::vector<FilterFinding> detect_label_leakage(std::string_view trace, const LeakageDetector& detector);

struct RepetitionResult {
  int max_ngram_count = 0;
  double repeat_fraction = 0.0;
  std::vector<FilterFinding> findings;
};

/// Lowercases, strips ASCII punctuation, splits on whitespace and counts every
/// n-gram. repeat_fraction = tokens covered by n-grams seen at least twice /
/// total tokens.
RepetitionResult detect_repetition(std::string_view trace, const FilterConfig& config);

std::optional<FilterFinding> detect_overthinking(std::string_view trace, const FilterConfig& config);

struct JudgeSettings {
  llm::ChatClient* client = nullptr;
  PromptTemplate prompt_template;
  llm::SamplingParams params;
};

struct JudgeVerdict {
  enum class Kind { Pass, Reject, Deferred };
  Kind kind = Kind::Pass;
  std::string reason;
};

/// First line PASS/FAIL (case-insensitive). Anything else passes with a warning.
JudgeVerdict parse_judge_output(std::string_view output);

/// Transport failures defer the record rather than rejecting it.
JudgeVerdict judge_trace(const DistilledRecord& record, const JudgeSettings& judge);

struct FilterResult {
  std::vector<DistilledRecord> accepted;
  std::vector<DistilledRecord> rejected;
  std::vector<DistilledRecord> deferred;  // judge unreachable; still Pending
};

class QualityFilter {
 public:
  explicit QualityFilter(FilterConfig config, std::optional<JudgeSettings> judge = std::nullopt);

  const FilterConfig& config() const noexcept { return config_; }
  const LeakageDetector& leakage() const noexcept { return leakage_; }

  /// Leakage, then repetition, then overthinking; all findings are collected.
  std::vector<FilterFinding> rule_findings(std::string_view trace) const;

  /// Rule findings reject; otherwise the judge (if any) decides.
  FilterResult run(const std::vector<DistilledRecord>& records, std::size_t workers = 1) const;

 private:
  FilterConfig config_;
  LeakageDetector leakage_;
  std::optional<JudgeSettings> judge_;
};

}  // namespace guardkit
