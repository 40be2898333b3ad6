#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/judgment.hpp"
#include "guardkit/labels.hpp"
#include "guardkit/llm_client.hpp"
#include "guardkit/sample.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"

namespace guardkit {

enum class BenchmarkScope { PromptOnly, ResponseOnly, Both };

std::string_view to_string(BenchmarkScope scope) noexcept;
BenchmarkScope benchmark_scope_from_string(std::string_view s);

struct Benchmark {
  std::string name;
  BenchmarkScope scope = BenchmarkScope::Both;
  Taxonomy taxonomy;
  std::vector<GuardSample> samples;

  bool scores_prompt() const noexcept { return scope != BenchmarkScope::ResponseOnly; }
  bool scores_response() const noexcept { return scope != BenchmarkScope::PromptOnly; }
  void validate() const;
};

/// Manifest JSON: {"name", "scope": "prompt"|"response"|"both", "taxonomy", "samples"};
/// paths are relative to the manifest file.
Benchmark load_benchmark(const std::filesystem::path& manifest_path);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

/// Harmful is the positive class. A None prediction stands for an unparseable
/// output and always counts as wrong. With no gold positives and no predicted
/// positives the score is 1.0. Gold labels must not be None.
F1Score harmful_f1(const std::vector<HarmLabel>& predictions, const std::vector<HarmLabel>& golds);

inline constexpr std::string_view kDegenerateF1Convention =
    "no gold positives and no predicted positives scores 1.0";

struct SideReport {
  std::vector<double> per_generation_f1;
  std::vector<Confusion> per_generation_confusion;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // population std over generations
  std::size_t scored_samples = 0;
};

struct EvalReport {
  std::string benchmark;
  BenchmarkScope scope = BenchmarkScope::Both;
  int n_gens = 4;
  std::optional<SideReport> prompt;
  std::optional<SideReport> response;
  std::size_t parse_attempts = 0;
  std::size_t unparsed_count = 0;
  std::size_t dropped_samples = 0;
  double mean_latency_s = 0.0;
};

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

double mean_of(const std::vector<double>& values);
double population_std(const std::vector<double>& values);

struct EvalOptions {
  int n_gens = 4;
  std::size_t workers = 1;
  bool reasoning_expected = true;
  std::string mode_token;
  ReasoningDelimiters delimiters;
};

/// Scores completions already collected: outputs[s][g] is generation g of sample s.
EvalReport score_outputs(const Benchmark& benchmark, const std::vector<std::vector<std::string>>& outputs,
                         const EvalOptions& options);

/// Generation g of every sample forms run g; F1 is computed per run, then
/// averaged. Samples whose requests fail are dropped from every run.
EvalReport evaluate(const Benchmark& benchmark, llm::ChatClient& guard, const PromptTemplate& inference,
                    llm::SamplingParams params, const EvalOptions& options);

enum class Weighting { Sides, Benchmarks, Samples };

std::string_view to_string(Weighting w) noexcept;
Weighting weighting_from_string(std::string_view s);

struct CustomSuite {
  std::string name;
  std::vector<std::string> benchmarks;
};

struct EvalLayout {
  std::vector<std::string> prompt;
  std::vector<std::string> response;
  std::vector<CustomSuite> custom;
  Weighting weighting = Weighting::Sides;
};

EvalLayout eval_layout_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalLayout& layout);

/// One benchmark's scores as the summary table sees them.
struct BenchmarkScore {
  std::optional<double> prompt_f1;
  std::optional<double> response_f1;
  std::size_t prompt_n = 0;
  std::size_t response_n = 0;
};

BenchmarkScore score_of(const EvalReport& report);

struct SummaryRow {
  std::string model;
  std::optional<double> prompt_avg;
  std::optional<double> response_avg;
  std::optional<double> overall_avg;
  std::vector<std::pair<std::string, std::optional<double>>> suites;
  std::optional<double> custom_avg;
};

/// Sides: overall = mean of the prompt and response averages, custom = mean of
/// suite averages. Benchmarks: every listed value counts once. Samples: values
/// weighted by scored sample counts. Empty groups are omitted with a warning.
SummaryRow aggregate(const std::string& model, const std::map<std::string, BenchmarkScore>& scores,
                     const EvalLayout& layout);
SummaryRow aggregate(const std::string& model, const std::vector<EvalReport>& reports, const EvalLayout& layout);

/// Fixed-width text table and CSV with Prompt / Resp. / Avg and per-suite columns.
std::string render_summary_text(const std::vector<SummaryRow>& rows, const EvalLayout& layout);
std::string render_summary_csv(const std::vector<SummaryRow>& rows, const EvalLayout& layout);

/// (candidate - baseline) / baseline * 100. Throws ValidationError on a zero baseline.
double latency_overhead_pct(double candidate_mean_s, double baseline_mean_s);

struct LatencyRow {
  std::string name;
  double mean_s = 0.0;
  double overhead_pct = 0.0;
};

struct NamedGuard {
  std::string name;
  llm::ChatClient* client = nullptr;
  std::string mode_token;
};

std::vector<LatencyRow> latency_table(const std::vector<std::pair<std::string, double>>& means,
                                      const std::string& baseline);

/// One n=1 request per sample per endpoint; mean seconds per sample.
std::vector<LatencyRow> latency_bench(const std::vector<NamedGuard>& guards, const std::vector<GuardSample>& samples,
                                      const Taxonomy& taxonomy, const PromptTemplate& inference,
                                      llm::SamplingParams params, const std::string& baseline,
                                      std::size_t workers = 1);

/// name,mean_seconds_per_sample,overhead_pct
std::string latency_csv(const std::vector<LatencyRow>& rows);

}  // namespace guardkit
