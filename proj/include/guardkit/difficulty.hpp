#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/judgment.hpp"
#include "guardkit/llm_client.hpp"
#include "guardkit/sample.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"

namespace guardkit {

enum class Bucket { Easy, Difficult, Noisy };

std::string_view to_string(Bucket bucket) noexcept;

/// Easy = n correct, Difficult = n-2 or n-1 correct, Noisy otherwise.
Bucket bucket_for(int correct_count, int n);

/// Prompt harm must match; response harm must match when the gold has one.
bool generation_correct(const ParsedJudgment& verdict, const GuardSample& sample);

inline constexpr std::string_view kCorrectnessRule = "prompt_harm and response_harm (when gold is not None)";

struct GenerationOutcome {
  std::optional<ParsedJudgment> verdict;  // nullopt = parse failure
  std::string parse_error;
  bool correct = false;
};

struct DifficultyRecord {
  std::string sample_id;
  int n = 4;
  int correct_count = 0;
  std::vector<GenerationOutcome> per_generation;
  Bucket bucket = Bucket::Noisy;
};

nlohmann::json to_json(const DifficultyRecord& record);
DifficultyRecord difficulty_record_from_json(const nlohmann::json& j);

struct MineOptions {
  int n = 4;
  std::size_t workers = 1;
  bool reasoning_expected = true;
  std::string mode_token;
  ReasoningDelimiters delimiters;
};

struct MineResult {
  std::vector<DifficultyRecord> records;
  std::vector<std::string> deferred;  // sample ids lost to transport failures
};

DifficultyRecord score_generations(const GuardSample& sample, const std::vector<std::string>& outputs,
                                   const MineOptions& options);

MineResult mine(const std::vector<GuardSample>& samples, llm::ChatClient& guard, const Taxonomy& taxonomy,
                const PromptTemplate& inference, llm::SamplingParams params, const MineOptions& options);

struct DifficultySummary {
  std::size_t total = 0;
  std::map<Bucket, std::size_t> bucket_counts;
  std::map<int, std::size_t> correct_histogram;

  double fraction(Bucket b) const;
};

/// Throws ValidationError on an empty input.
DifficultySummary summarize(const std::vector<DifficultyRecord>& records);
nlohmann::json to_json(const DifficultySummary& summary);

/// Ids of records in the given buckets, in record order.
std::vector<std::string> ids_in(const std::vector<DifficultyRecord>& records, const std::vector<Bucket>& buckets);

}  // namespace guardkit
