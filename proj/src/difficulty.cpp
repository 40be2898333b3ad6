#include "guardkit/difficulty.hpp"

#include <algorithm>
#include <variant>

#include <spdlog/spdlog.h>

#include "guardkit/error.hpp"
#include "guardkit/parallel.hpp"

namespace guardkit {

std::string_view to_string(Bucket bucket) noexcept {
  switch (bucket) {
    case Bucket::Easy: return "easy";
    case Bucket::Difficult: return "difficult";
    case Bucket::Noisy: return "noisy";
  }
  return "noisy";
}

namespace {

Bucket bucket_from_string(std::string_view s) {
  if (s == "easy") return Bucket::Easy;
  if (s == "difficult") return Bucket::Difficult;
  if (s == "noisy") return Bucket::Noisy;
  throw ValidationError("unknown bucket '" + std::string(s) + "'");
}

nlohmann::json verdict_json(const ParsedJudgment& v) {
  auto label = [](auto l) { return std::string(to_string(l)); };
  return {{"prompt_harm", label(v.prompt_harm)},
          {"response_harm", label(v.response_harm)},
          {"response_refusal", label(v.response_refusal)}};
}

}  // namespace

Bucket bucket_for(int correct_count, int n) {
  if (n < 1 || correct_count < 0 || correct_count > n) {
    throw ValidationError("correct count " + std::to_string(correct_count) + " out of range for n=" +
                          std::to_string(n));
  }
  if (correct_count == n) return Bucket::Easy;
  if (correct_count >= n - 2) return Bucket::Difficult;
  return Bucket::Noisy;
}

bool generation_correct(const ParsedJudgment& verdict, const GuardSample& sample) {
  if (verdict.prompt_harm != sample.gold_prompt_harm) return false;
  return sample.gold_response_harm == HarmLabel::None || verdict.response_harm == sample.gold_response_harm;
}

nlohmann::json to_json(const DifficultyRecord& r) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : r.per_generation) {
    nlohmann::json j{{"correct", g.correct}};
    if (g.verdict) {
      j["verdict"] = verdict_json(*g.verdict);
    } else {
      j["verdict"] = nullptr;
      j["parse_error"] = g.parse_error;
    }
    gens.push_back(std::move(j));
  }
  return {{"sample_id", r.sample_id},
          {"n", r.n},
          {"correct_count", r.correct_count},
          {"bucket", to_string(r.bucket)},
          {"per_generation", std::move(gens)}};
}

DifficultyRecord difficulty_record_from_json(const nlohmann::json& j) {
  try {
    DifficultyRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.n = j.at("n").get<int>();
    r.correct_count = j.at("correct_count").get<int>();
    r.bucket = bucket_from_string(j.at("bucket").get<std::string>());
    for (const auto& g : j.value("per_generation", nlohmann::json::array())) {
      GenerationOutcome out;
      out.correct = g.at("correct").get<bool>();
      if (!g.at("verdict").is_null()) {
        const auto& v = g.at("verdict");
        ParsedJudgment p;
        p.prompt_harm = parse_harm_label(v.at("prompt_harm").get<std::string>()).value();
        p.response_harm = parse_harm_label(v.at("response_harm").get<std::string>()).value();
        p.response_refusal = parse_refusal_label(v.at("response_refusal").get<std::string>()).value();
        out.verdict = p;
      } else {
        out.parse_error = g.value("parse_error", std::string());
      }
      r.per_generation.push_back(std::move(out));
    }
    if (r.bucket != bucket_for(r.correct_count, r.n)) {
      throw ValidationError("record " + r.sample_id + ": bucket disagrees with correct_count");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad difficulty record: ") + e.what());
  } catch (const std::bad_optional_access&) {
    throw ValidationError("bad label in difficulty record");
  }
}

DifficultyRecord score_generations(const GuardSample& sample, const std::vector<std::string>& outputs,
                                   const MineOptions& options) {
  DifficultyRecord r;
  r.sample_id = sample.id;
  r.n = static_cast<int>(outputs.size());
  for (const auto& text : outputs) {
    GenerationOutcome g;
    auto parsed = parse_judgment(text, options.reasoning_expected, options.delimiters);
    if (auto* v = std::get_if<ParsedJudgment>(&parsed)) {
      g.correct = generation_correct(*v, sample);
      g.verdict = std::move(*v);
    } else {
      g.parse_error = std::get<ParseError>(parsed).detail;
    }
    r.correct_count += g.correct ? 1 : 0;
    r.per_generation.push_back(std::move(g));
  }
  r.bucket = bucket_for(r.correct_count, r.n);
  return r;
}

MineResult mine(const std::vector<GuardSample>& samples, llm::ChatClient& guard, const Taxonomy& taxonomy,
                const PromptTemplate& inference, llm::SamplingParams params, const MineOptions& options) {
  if (options.n < 1) throw ConfigError("n must be positive");
  params.n = options.n;
  auto results = ordered_parallel_map(samples, options.workers, [&](const GuardSample& s) {
    std::optional<DifficultyRecord> out;
    try {
      const auto completions =
          guard.chat(std::nullopt, build_inference_prompt(s, taxonomy, inference, options.mode_token), params);
      std::vector<std::string> texts;
      for (const auto& c : completions) texts.push_back(c.text);
      out = score_generations(s, texts, options);
    } catch (const llm::TransportError& e) {
      spdlog::warn("mine: deferring {}: {}", s.id, e.what());
    }
    return out;
  });
  MineResult result;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (results[i]) {
      result.records.push_back(std::move(*results[i]));
    } else {
      result.deferred.push_back(samples[i].id);
    }
  }
  return result;
}

double DifficultySummary::fraction(Bucket b) const {
  if (total == 0) return 0.0;
  const auto it = bucket_counts.find(b);
  return it == bucket_counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

DifficultySummary summarize(const std::vector<DifficultyRecord>& records) {
  if (records.empty()) throw ValidationError("cannot summarize an empty difficulty run");
  DifficultySummary s;
  s.total = records.size();
  for (auto b : {Bucket::Easy, Bucket::Difficult, Bucket::Noisy}) s.bucket_counts[b] = 0;
  for (const auto& r : records) {
    ++s.bucket_counts[r.bucket];
    ++s.correct_histogram[r.correct_count];
  }
  return s;
}

nlohmann::json to_json(const DifficultySummary& s) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json fractions = nlohmann::json::object();
  for (const auto& [b, c] : s.bucket_counts) {
    counts[std::string(to_string(b))] = c;
    fractions[std::string(to_string(b))] = s.fraction(b);
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, c] : s.correct_histogram) hist[std::to_string(k)] = c;
  return {{"total", s.total},
          {"bucket_counts", counts},
          {"bucket_fractions", fractions},
          {"correct_count_histogram", hist},
          {"correctness_rule", kCorrectnessRule}};
}

std::vector<std::string> ids_in(const std::vector<DifficultyRecord>& records, const std::vector<Bucket>& buckets) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    if (std::find(buckets.begin(), buckets.end(), r.bucket) != buckets.end()) out.push_back(r.sample_id);
  }
  return out;
}

}  // namespace guardkit
