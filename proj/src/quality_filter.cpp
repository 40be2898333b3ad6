#include "guardkit/quality_filter.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "guardkit/error.hpp"
#include "guardkit/parallel.hpp"
#include "guardkit/sentences.hpp"
#include "guardkit/text.hpp"

namespace guardkit {

const std::vector<std::string>& default_leakage_patterns() {
  static const std::vector<std::string> kPatterns{
      R"(ground[\s-]*truth)",
      R"(\bthe\s+labels?\s+(say|says|said|state|states|stated)\b)",
      R"(\bas\s+(given|stated)\s+in\s+the\s+labels?\b)",
      R"(\bprovided\s+labels?\b)",
  };
  return kPatterns;
}

void FilterConfig::validate() const {
  if (ngram_n < 2) throw ConfigError("ngram_n must be >= 2");
  if (ngram_repeat_threshold < 1) throw ConfigError("ngram_repeat_threshold must be positive");
  if (!(repeat_fraction_threshold > 0 && repeat_fraction_threshold <= 1)) {
    throw ConfigError("repeat_fraction_threshold must be in (0, 1]");
  }
  if (max_trace_sentences < 1) throw ConfigError("max_trace_sentences must be positive");
  if (max_trace_words < 1) throw ConfigError("max_trace_words must be positive");
  (void)LeakageDetector{leakage_patterns};  // compiles every pattern
}

FilterConfig filter_config_from_json(const nlohmann::json& j) {
  FilterConfig c;
  try {
    c.leakage_patterns = j.value("leakage_patterns", c.leakage_patterns);
    c.ngram_n = j.value("ngram_n", c.ngram_n);
    c.ngram_repeat_threshold = j.value("ngram_repeat_threshold", c.ngram_repeat_threshold);
    c.repeat_fraction_threshold = j.value("repeat_fraction_threshold", c.repeat_fraction_threshold);
    c.max_trace_sentences = j.value("max_trace_sentences", c.max_trace_sentences);
    c.max_trace_words = j.value("max_trace_words", c.max_trace_words);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad filter config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const FilterConfig& c) {
  return {{"leakage_patterns", c.leakage_patterns},
          {"ngram_n", c.ngram_n},
          {"ngram_repeat_threshold", c.ngram_repeat_threshold},
          {"repeat_fraction_threshold", c.repeat_fraction_threshold},
          {"max_trace_sentences", c.max_trace_sentences},
          {"max_trace_words", c.max_trace_words}};
}

LeakageDetector::LeakageDetector(const std::vector<std::string>& patterns) {
  for (const auto& p : patterns) {
    try {
      patterns_.emplace_back(p, std::regex(p, std::regex::ECMAScript | std::regex::icase));
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid leakage pattern '" + p + "': " + e.what());
    }
  }
}

std::vector<FilterFinding> LeakageDetector::scan(std::string_view trace) const {
  std::vector<FilterFinding> out;
  for (const auto& [source, re] : patterns_) {
    for (auto it = std::cregex_iterator(trace.data(), trace.data() + trace.size(), re);
         it != std::cregex_iterator(); ++it) {
      const auto start = static_cast<std::size_t>(it->position());
      const auto end = start + static_cast<std::size_t>(it->length());
      out.push_back({FindingRule::LabelLeakage, "matched /" + source + "/: \"" + it->str() + "\"",
                     std::pair{start, end}});
    }
  }
  return out;
}

std::vector<FilterFinding> detect_label_leakage(std::string_view trace, const LeakageDetector& detector) {
  return detector.scan(trace);
}

namespace {

struct Token {
  std::string norm;
  std::size_t begin;
  std::size_t end;
};

std::vector<Token> normalized_tokens(std::string_view trace) {
  std::vector<Token> out;
  for (auto word : text::split_whitespace(trace)) {
    std::string norm;
    for (char c : word) {
      const auto u = static_cast<unsigned char>(c);
      if (u < 0x80 && std::ispunct(u)) continue;
      norm += static_cast<char>(std::tolower(u));
    }
    if (norm.empty()) continue;
    const auto begin = static_cast<std::size_t>(word.data() - trace.data());
    out.push_back({std::move(norm), begin, begin + word.size()});
  }
  return out;
}

}  // namespace

RepetitionResult detect_repetition(std::string_view trace, const FilterConfig& config) {
  RepetitionResult result;
  const auto tokens = normalized_tokens(trace);
  const auto n = static_cast<std::size_t>(config.ngram_n);
  if (tokens.size() < n) return result;

  const std::size_t grams = tokens.size() - n + 1;
  std::vector<std::string> keys(grams);
  std::unordered_map<std::string, int> counts;
  for (std::size_t i = 0; i < grams; ++i) {
    std::string key = tokens[i].norm;
    for (std::size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k].norm;
    }
    ++counts[key];
    keys[i] = std::move(key);
  }

  std::vector<bool> covered(tokens.size(), false);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < grams; ++i) {
    const int c = counts[keys[i]];
    if (c >= 2) std::fill(covered.begin() + static_cast<long>(i), covered.begin() + static_cast<long>(i + n), true);
    if (c > result.max_ngram_count) {
      result.max_ngram_count = c;
      worst = i;
    }
  }
  result.repeat_fraction = static_cast<double>(std::count(covered.begin(), covered.end(), true)) /
                           static_cast<double>(tokens.size());

  if (result.max_ngram_count >= config.ngram_repeat_threshold ||
      result.repeat_fraction >= config.repeat_fraction_threshold) {
    std::size_t last = worst;
    for (std::size_t i = worst; i < grams; ++i) {
      if (keys[i] == keys[worst]) last = i;
    }
    const std::string detail = std::to_string(n) + "-gram '" + keys[worst] + "' occurs " +
                               std::to_string(result.max_ngram_count) + " times; " +
                               std::to_string(static_cast<int>(result.repeat_fraction * 100.0 + 0.5)) +
                               "% of tokens are in repeated " + std::to_string(n) + "-grams";
    result.findings.push_back(
        {FindingRule::NGramRepetition, detail, std::pair{tokens[worst].begin, tokens[last + n - 1].end}});
  }
  return result;
}

std::optional<FilterFinding> detect_overthinking(std::string_view trace, const FilterConfig& config) {
  const int sentences = count_sentences(trace);
  const auto words = text::word_count(trace);
  if (sentences > config.max_trace_sentences || words > static_cast<std::size_t>(config.max_trace_words)) {
    return FilterFinding{FindingRule::Overthinking,
                         std::to_string(sentences) + " sentences, " + std::to_string(words) + " words (limits " +
                             std::to_string(config.max_trace_sentences) + "/" +
                             std::to_string(config.max_trace_words) + ")",
                         std::nullopt};
  }
  return std::nullopt;
}

namespace {

std::string_view after_reasoning(std::string_view output) {
  const auto close = output.find("</think>");
  return close == std::string_view::npos ? output : output.substr(close + 8);
}

std::string_view strip_marks(std::string_view s) {
  constexpr std::string_view kMarks = "\"'`*#";
  for (bool changed = true; changed;) {
    changed = false;
    s = text::trim(s);
    if (!s.empty() && kMarks.find(s.front()) != std::string_view::npos) {
      s.remove_prefix(1);
      changed = true;
    }
  }
  return s;
}

}  // namespace

JudgeVerdict parse_judge_output(std::string_view output) {
  const auto lines = text::split_lines(after_reasoning(output));
  std::size_t i = 0;
  while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
  if (i < lines.size()) {
    std::string_view first = strip_marks(lines[i]);
    if (text::istarts_with(first, "PASS")) return {JudgeVerdict::Kind::Pass, {}};
    if (text::istarts_with(first, "FAIL")) {
      std::string_view rest = first.substr(4);
      while (!rest.empty() && (rest.front() == ':' || rest.front() == '-' || rest.front() == '*' ||
                               std::isspace(static_cast<unsigned char>(rest.front())))) {
        rest.remove_prefix(1);
      }
      rest = text::trim(rest);
      for (std::size_t k = i + 1; rest.empty() && k < lines.size(); ++k) rest = text::trim(lines[k]);
      return {JudgeVerdict::Kind::Reject, std::string(rest)};
    }
  }
  spdlog::warn("judge output has no PASS/FAIL verdict; treating as pass: {}",
               std::string(text::trim(output)).substr(0, 120));
  return {JudgeVerdict::Kind::Pass, {}};
}

JudgeVerdict judge_trace(const DistilledRecord& record, const JudgeSettings& judge) {
  if (judge.client == nullptr) throw ConfigError("judge endpoint not configured");
  const auto& s = record.sample;
  const SlotBindings bindings{
      {"trace", record.trace},
      {"prompt", s.prompt},
      {"response", s.has_response() ? *s.response : std::string("None")},
      {"prompt_harm_label", std::string(to_string(s.gold_prompt_harm))},
      {"response_harm_label", std::string(to_string(s.gold_response_harm))},
      {"response_refusal_label",
       std::string(s.gold_response_refusal ? to_string(*s.gold_response_refusal) : "None")},
  };
  llm::SamplingParams params = judge.params;
  params.n = 1;
  try {
    const auto out = judge.client->chat(std::nullopt, judge.prompt_template.render(bindings), params);
    return parse_judge_output(out.front().text);
  } catch (const llm::TransportError& e) {
    spdlog::warn("judge unavailable for {}: {}", s.id, e.what());
    return {JudgeVerdict::Kind::Deferred, e.what()};
  }
}

QualityFilter::QualityFilter(FilterConfig config, std::optional<JudgeSettings> judge)
    : config_(std::move(config)), leakage_(config_.leakage_patterns), judge_(std::move(judge)) {
  config_.validate();
}

std::vector<FilterFinding> QualityFilter::rule_findings(std::string_view trace) const {
  auto findings = leakage_.scan(trace);
  auto rep = detect_repetition(trace, config_);
  findings.insert(findings.end(), rep.findings.begin(), rep.findings.end());
  if (auto over = detect_overthinking(trace, config_)) findings.push_back(std::move(*over));
  return findings;
}

FilterResult QualityFilter::run(const std::vector<DistilledRecord>& records, std::size_t workers) const {
  enum class Route { Accept, Reject, Defer };
  auto routed = ordered_parallel_map(records, workers, [&](const DistilledRecord& in) {
    DistilledRecord r = in;
    r.findings = rule_findings(r.trace);
    if (!r.findings.empty()) {
      r.status = RecordStatus::Rejected;
      for (const auto& f : r.findings) {
        const std::string name(to_string(f.rule));
        if (std::find(r.reasons.begin(), r.reasons.end(), name) == r.reasons.end()) r.reasons.push_back(name);
      }
      return std::pair{Route::Reject, std::move(r)};
    }
    if (judge_) {
      auto verdict = judge_trace(r, *judge_);
      if (verdict.kind == JudgeVerdict::Kind::Deferred) return std::pair{Route::Defer, std::move(r)};
      if (verdict.kind == JudgeVerdict::Kind::Reject) {
        r.findings.push_back({FindingRule::JudgeReject, verdict.reason, std::nullopt});
        r.reject(to_string(FindingRule::JudgeReject));
        return std::pair{Route::Reject, std::move(r)};
      }
    }
    r.status = RecordStatus::Accepted;
    return std::pair{Route::Accept, std::move(r)};
  });

  FilterResult out;
  for (auto& [route, r] : routed) {
    switch (route) {
      case Route::Accept: out.accepted.push_back(std::move(r)); break;
      case Route::Reject: out.rejected.push_back(std::move(r)); break;
      case Route::Defer: out.deferred.push_back(std::move(r)); break;
    }
  }
  return out;
}

}  // namespace guardkit
