#include "guardkit/eval.hpp"

#include <cmath>
#include <cstdio>
#include <variant>

#include <spdlog/spdlog.h>

#include "guardkit/error.hpp"
#include "guardkit/jsonl.hpp"
#include "guardkit/parallel.hpp"
#include "guardkit/text.hpp"

namespace guardkit {

std::string_view to_string(BenchmarkScope scope) noexcept {
  switch (scope) {
    case BenchmarkScope::PromptOnly: return "prompt";
    case BenchmarkScope::ResponseOnly: return "response";
    case BenchmarkScope::Both: break;
  }
  return "both";
}

BenchmarkScope benchmark_scope_from_string(std::string_view s) {
  if (text::iequals(s, "prompt")) return BenchmarkScope::PromptOnly;
  if (text::iequals(s, "response")) return BenchmarkScope::ResponseOnly;
  if (text::iequals(s, "both")) return BenchmarkScope::Both;
  throw ConfigError("unknown benchmark scope '" + std::string(s) + "'");
}

void Benchmark::validate() const {
  if (name.empty()) throw ValidationError("benchmark needs a name");
  taxonomy.validate();
  for (const auto& s : samples) {
    s.validate();
    if (scope == BenchmarkScope::ResponseOnly && s.gold_response_harm == HarmLabel::None) {
      throw ValidationError("benchmark " + name + ": sample " + s.id + " has no response label");
    }
  }
}

Benchmark load_benchmark(const std::filesystem::path& manifest_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(manifest_path.string() + ": " + e.what());
  }
  const auto dir = manifest_path.parent_path();
  Benchmark b;
  try {
    b.name = j.at("name").get<std::string>();
    b.scope = benchmark_scope_from_string(j.at("scope").get<std::string>());
    b.taxonomy = load_taxonomy(dir / j.at("taxonomy").get<std::string>());
    b.samples = read_jsonl_as<GuardSample>(dir / j.at("samples").get<std::string>(), sample_from_json);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(manifest_path.string() + ": " + e.what());
  }
  b.validate();
  return b;
}

F1Score harmful_f1(const std::vector<HarmLabel>& predictions, const std::vector<HarmLabel>& golds) {
  if (predictions.size() != golds.size()) {
    throw ValidationError("prediction/gold length mismatch: " + std::to_string(predictions.size()) + " vs " +
                          std::to_string(golds.size()));
  }
  F1Score s;
  auto& c = s.confusion;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const HarmLabel g = golds[i];
    const HarmLabel p = predictions[i];
    if (g == HarmLabel::None) throw ValidationError("gold label None must be excluded before scoring");
    if (g == HarmLabel::Harmful) {
      ++(p == HarmLabel::Harmful ? c.tp : c.fn);
    } else {
      ++(p == HarmLabel::Unharmful ? c.tn : c.fp);
    }
  }
  if (c.tp + c.fp == 0 && c.tp + c.fn == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  s.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  // Offsets from the first value keep identical inputs exact.
  const double base = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - base;
  return base + sum / static_cast<double>(values.size());
}

double population_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

namespace {

nlohmann::json confusion_json(const Confusion& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

nlohmann::json side_json(const std::optional<SideReport>& side) {
  if (!side) return nullptr;
  nlohmann::json conf = nlohmann::json::array();
  for (const auto& c : side->per_generation_confusion) conf.push_back(confusion_json(c));
  return {{"per_generation_f1", side->per_generation_f1},
          {"per_generation_confusion", conf},
          {"mean_f1", side->mean_f1},
          {"std_f1", side->std_f1},
          {"scored_samples", side->scored_samples}};
}

std::optional<SideReport> side_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  SideReport s;
  s.per_generation_f1 = j.at("per_generation_f1").get<std::vector<double>>();
  for (const auto& c : j.at("per_generation_confusion")) {
    s.per_generation_confusion.push_back(
        {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
         c.at("tn").get<std::size_t>()});
  }
  s.mean_f1 = j.at("mean_f1").get<double>();
  s.std_f1 = j.at("std_f1").get<double>();
  s.scored_samples = j.at("scored_samples").get<std::size_t>();
  return s;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  return {{"benchmark", r.benchmark},
          {"scope", to_string(r.scope)},
          {"n_gens", r.n_gens},
          {"prompt", side_json(r.prompt)},
          {"response", side_json(r.response)},
          {"parse_attempts", r.parse_attempts},
          {"unparsed_count", r.unparsed_count},
          {"dropped_samples", r.dropped_samples},
          {"mean_latency_s", r.mean_latency_s},
          {"f1_convention", kDegenerateF1Convention}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.benchmark = j.at("benchmark").get<std::string>();
    r.scope = benchmark_scope_from_string(j.at("scope").get<std::string>());
    r.n_gens = j.at("n_gens").get<int>();
    r.prompt = side_from_json(j.at("prompt"));
    r.response = side_from_json(j.at("response"));
    r.parse_attempts = j.value("parse_attempts", std::size_t{0});
    r.unparsed_count = j.value("unparsed_count", std::size_t{0});
    r.dropped_samples = j.value("dropped_samples", std::size_t{0});
    r.mean_latency_s = j.value("mean_latency_s", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad eval report: ") + e.what());
  }
}

EvalReport score_outputs(const Benchmark& benchmark, const std::vector<std::vector<std::string>>& outputs,
                         const EvalOptions& options) {
  if (outputs.size() != benchmark.samples.size()) throw ValidationError("one output list per sample required");
  EvalReport report;
  report.benchmark = benchmark.name;
  report.scope = benchmark.scope;
  report.n_gens = options.n_gens;

  SideReport prompt_side, response_side;
  for (int g = 0; g < options.n_gens; ++g) {
    std::vector<HarmLabel> pp, pg, rp, rg;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const auto& s = benchmark.samples[i];
      if (outputs[i].size() != static_cast<std::size_t>(options.n_gens)) {
        throw ValidationError("sample " + s.id + ": expected " + std::to_string(options.n_gens) + " generations");
      }
      ++report.parse_attempts;
      auto parsed = parse_judgment(outputs[i][g], options.reasoning_expected, options.delimiters);
      const auto* v = std::get_if<ParsedJudgment>(&parsed);
      if (!v) ++report.unparsed_count;
      if (benchmark.scores_prompt()) {
        pp.push_back(v ? v->prompt_harm : HarmLabel::None);
        pg.push_back(s.gold_prompt_harm);
      }
      if (benchmark.scores_response() && s.gold_response_harm != HarmLabel::None) {
        rp.push_back(v ? v->response_harm : HarmLabel::None);
        rg.push_back(s.gold_response_harm);
      }
    }
    if (benchmark.scores_prompt()) {
      const auto f = harmful_f1(pp, pg);
      prompt_side.per_generation_f1.push_back(f.f1);
      prompt_side.per_generation_confusion.push_back(f.confusion);
      prompt_side.scored_samples = pg.size();
    }
    if (benchmark.scores_response()) {
      const auto f = harmful_f1(rp, rg);
      response_side.per_generation_f1.push_back(f.f1);
      response_side.per_generation_confusion.push_back(f.confusion);
      response_side.scored_samples = rg.size();
    }
  }
  for (auto* side : {&prompt_side, &response_side}) {
    side->mean_f1 = mean_of(side->per_generation_f1);
    side->std_f1 = population_std(side->per_generation_f1);
  }
  if (benchmark.scores_prompt()) report.prompt = std::move(prompt_side);
  if (benchmark.scores_response()) {
    if (response_side.scored_samples == 0 && !outputs.empty()) {
      spdlog::warn("eval {}: no response labels to score; response side omitted", benchmark.name);
    } else {
      report.response = std::move(response_side);
    }
  }
  return report;
}

EvalReport evaluate(const Benchmark& benchmark, llm::ChatClient& guard, const PromptTemplate& inference,
                    llm::SamplingParams params, const EvalOptions& options) {
  if (options.n_gens < 1) throw ConfigError("n_gens must be positive");
  params.n = options.n_gens;
  using Collected = std::optional<std::vector<llm::Completion>>;
  auto collected = ordered_parallel_map(benchmark.samples, options.workers, [&](const GuardSample& s) -> Collected {
    try {
      return guard.chat(std::nullopt, build_inference_prompt(s, benchmark.taxonomy, inference, options.mode_token),
                        params);
    } catch (const llm::TransportError& e) {
      spdlog::warn("eval {}: dropping {}: {}", benchmark.name, s.id, e.what());
      return std::nullopt;
    }
  });

  Benchmark kept = benchmark;
  kept.samples.clear();
  std::vector<std::vector<std::string>> outputs;
  double latency_sum = 0.0;
  std::size_t latency_n = 0;
  for (std::size_t i = 0; i < collected.size(); ++i) {
    if (!collected[i]) continue;
    kept.samples.push_back(benchmark.samples[i]);
    std::vector<std::string> texts;
    for (const auto& c : *collected[i]) {
      texts.push_back(c.text);
      latency_sum += c.latency_s;
      ++latency_n;
    }
    outputs.push_back(std::move(texts));
  }
  EvalReport report = score_outputs(kept, outputs, options);
  report.dropped_samples = benchmark.samples.size() - kept.samples.size();
  if (report.dropped_samples > 0) {
    spdlog::warn("eval {}: {} samples dropped from every generation", benchmark.name, report.dropped_samples);
  }
  report.mean_latency_s = latency_n == 0 ? 0.0 : latency_sum / static_cast<double>(latency_n);
  return report;
}

std::string_view to_string(Weighting w) noexcept {
  switch (w) {
    case Weighting::Sides: return "sides";
    case Weighting::Benchmarks: return "benchmarks";
    case Weighting::Samples: break;
  }
  return "samples";
}

Weighting weighting_from_string(std::string_view s) {
  if (text::iequals(s, "sides")) return Weighting::Sides;
  if (text::iequals(s, "benchmarks")) return Weighting::Benchmarks;
  if (text::iequals(s, "samples")) return Weighting::Samples;
  throw ConfigError("unknown weighting '" + std::string(s) + "'");
}

EvalLayout eval_layout_from_json(const nlohmann::json& j) {
  EvalLayout l;
  try {
    l.prompt = j.value("prompt", l.prompt);
    l.response = j.value("response", l.response);
    for (const auto& c : j.value("custom", nlohmann::json::array())) {
      l.custom.push_back({c.at("name").get<std::string>(), c.at("benchmarks").get<std::vector<std::string>>()});
    }
    if (j.contains("weighting")) l.weighting = weighting_from_string(j.at("weighting").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad eval layout: ") + e.what());
  }
  return l;
}

nlohmann::json to_json(const EvalLayout& l) {
  nlohmann::json custom = nlohmann::json::array();
  for (const auto& c : l.custom) custom.push_back({{"name", c.name}, {"benchmarks", c.benchmarks}});
  return {{"prompt", l.prompt}, {"response", l.response}, {"custom", custom}, {"weighting", to_string(l.weighting)}};
}

BenchmarkScore score_of(const EvalReport& r) {
  BenchmarkScore s;
  if (r.prompt) {
    s.prompt_f1 = r.prompt->mean_f1;
    s.prompt_n = r.prompt->scored_samples;
  }
  if (r.response) {
    s.response_f1 = r.response->mean_f1;
    s.response_n = r.response->scored_samples;
  }
  return s;
}

namespace {

struct Value {
  double v;
  double weight;
};

std::optional<double> weighted_mean(const std::vector<Value>& values, bool by_weight) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0, total = 0.0;
  for (const auto& x : values) {
    const double w = by_weight ? x.weight : 1.0;
    sum += x.v * w;
    total += w;
  }
  if (total == 0.0) return std::nullopt;
  return sum / total;
}

enum class Side { Prompt, Response, Primary };

std::optional<Value> lookup(const std::map<std::string, BenchmarkScore>& scores, const std::string& name, Side side) {
  const auto it = scores.find(name);
  if (it == scores.end()) {
    spdlog::warn("layout names benchmark '{}' with no report", name);
    return std::nullopt;
  }
  const auto& s = it->second;
  if (side == Side::Prompt || (side == Side::Primary && !s.response_f1)) {
    if (s.prompt_f1) return Value{*s.prompt_f1, static_cast<double>(s.prompt_n)};
  } else if (side == Side::Response || (side == Side::Primary && !s.prompt_f1)) {
    if (s.response_f1) return Value{*s.response_f1, static_cast<double>(s.response_n)};
  } else {
    // both sides scored on a custom-policy benchmark: average them
    return Value{(*s.prompt_f1 + *s.response_f1) / 2.0, static_cast<double>(s.prompt_n + s.response_n)};
  }
  spdlog::warn("benchmark '{}' has no score for the requested side", name);
  return std::nullopt;
}

std::vector<Value> collect(const std::map<std::string, BenchmarkScore>& scores, const std::vector<std::string>& names,
                           Side side) {
  std::vector<Value> out;
  for (const auto& n : names) {
    if (auto v = lookup(scores, n, side)) out.push_back(*v);
  }
  return out;
}

std::optional<double> group_mean(const std::vector<Value>& values, Weighting w, const std::string& group) {
  auto m = weighted_mean(values, w == Weighting::Samples);
  if (!m) spdlog::warn("group '{}' is empty; omitted", group);
  return m;
}

}  // namespace

SummaryRow aggregate(const std::string& model, const std::map<std::string, BenchmarkScore>& scores,
                     const EvalLayout& layout) {
  SummaryRow row;
  row.model = model;
  const bool by_samples = layout.weighting == Weighting::Samples;

  const auto prompt_vals = collect(scores, layout.prompt, Side::Prompt);
  const auto response_vals = collect(scores, layout.response, Side::Response);
  row.prompt_avg = group_mean(prompt_vals, layout.weighting, "prompt");
  row.response_avg = group_mean(response_vals, layout.weighting, "response");
  if (layout.weighting == Weighting::Sides) {
    std::vector<Value> sides;
    if (row.prompt_avg) sides.push_back({*row.prompt_avg, 1.0});
    if (row.response_avg) sides.push_back({*row.response_avg, 1.0});
    row.overall_avg = weighted_mean(sides, false);
  } else {
    auto pooled = prompt_vals;
    pooled.insert(pooled.end(), response_vals.begin(), response_vals.end());
    row.overall_avg = weighted_mean(pooled, by_samples);
  }

  std::vector<Value> suite_avgs, custom_pooled;
  for (const auto& suite : layout.custom) {
    const auto vals = collect(scores, suite.benchmarks, Side::Primary);
    const auto m = group_mean(vals, layout.weighting, suite.name);
    row.suites.emplace_back(suite.name, m);
    if (m) {
      double weight = 0.0;
      for (const auto& v : vals) weight += v.weight;
      suite_avgs.push_back({*m, weight});
    }
    custom_pooled.insert(custom_pooled.end(), vals.begin(), vals.end());
  }
  if (layout.weighting == Weighting::Sides) {
    row.custom_avg = weighted_mean(suite_avgs, false);
  } else {
    row.custom_avg = weighted_mean(custom_pooled, by_samples);
  }
  return row;
}

SummaryRow aggregate(const std::string& model, const std::vector<EvalReport>& reports, const EvalLayout& layout) {
  std::map<std::string, BenchmarkScore> scores;
  for (const auto& r : reports) {
    if (!scores.emplace(r.benchmark, score_of(r)).second) {
      throw ValidationError("duplicate report for benchmark " + r.benchmark);
    }
  }
  return aggregate(model, scores, layout);
}

namespace {

std::string fmt3(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::vector<std::string> header(const EvalLayout& layout) {
  std::vector<std::string> h{"Model", "Prompt", "Resp.", "Avg"};
  for (const auto& s : layout.custom) h.push_back(s.name);
  if (!layout.custom.empty()) h.push_back("Custom Avg");
  return h;
}

std::vector<std::string> cells(const SummaryRow& r, const EvalLayout& layout) {
  std::vector<std::string> c{r.model, fmt3(r.prompt_avg), fmt3(r.response_avg), fmt3(r.overall_avg)};
  for (const auto& [name, v] : r.suites) c.push_back(fmt3(v));
  if (!layout.custom.empty()) c.push_back(fmt3(r.custom_avg));
  return c;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string render_summary_text(const std::vector<SummaryRow>& rows, const EvalLayout& layout) {
  std::vector<std::vector<std::string>> table{header(layout)};
  for (const auto& r : rows) table.push_back(cells(r, layout));
  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (std::size_t k = 0; k < table.size(); ++k) {
    std::string line;
    for (std::size_t i = 0; i < table[k].size(); ++i) {
      const auto& cell = table[k][i];
      const std::string pad(width[i] - cell.size(), ' ');
      line += (i == 0 ? "" : " | ") + (i == 0 ? cell + pad : pad + cell);
    }
    out += line + "\n";
    if (k == 0) {
      std::string rule;
      for (std::size_t i = 0; i < width.size(); ++i) rule += (i == 0 ? "" : "-+-") + std::string(width[i], '-');
      out += rule + "\n";
    }
  }
  return out;
}

std::string render_summary_csv(const std::vector<SummaryRow>& rows, const EvalLayout& layout) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) out += (i ? "," : "") + csv_field(line[i]);
    out += "\n";
  };
  emit(header(layout));
  for (const auto& r : rows) emit(cells(r, layout));
  return out;
}

double latency_overhead_pct(double candidate_mean_s, double baseline_mean_s) {
  if (baseline_mean_s == 0.0) throw ValidationError("baseline latency is zero");
  return (candidate_mean_s - baseline_mean_s) / baseline_mean_s * 100.0;
}

std::vector<LatencyRow> latency_table(const std::vector<std::pair<std::string, double>>& means,
                                      const std::string& baseline) {
  const auto it = std::find_if(means.begin(), means.end(), [&](const auto& m) { return m.first == baseline; });
  if (it == means.end()) throw ConfigError("baseline '" + baseline + "' is not among the endpoints");
  std::vector<LatencyRow> rows;
  for (const auto& [name, mean] : means) rows.push_back({name, mean, latency_overhead_pct(mean, it->second)});
  return rows;
}

std::vector<LatencyRow> latency_bench(const std::vector<NamedGuard>& guards, const std::vector<GuardSample>& samples,
                                      const Taxonomy& taxonomy, const PromptTemplate& inference,
                                      llm::SamplingParams params, const std::string& baseline, std::size_t workers) {
  if (samples.empty()) throw ValidationError("latency benchmark needs samples");
  params.n = 1;
  std::vector<std::pair<std::string, double>> means;
  for (const auto& g : guards) {
    if (!g.client) throw ConfigError("endpoint '" + g.name + "' has no client");
    auto latencies = ordered_parallel_map(samples, workers, [&](const GuardSample& s) {
      return g.client->chat(std::nullopt, build_inference_prompt(s, taxonomy, inference, g.mode_token), params)
          .front()
          .latency_s;
    });
    means.emplace_back(g.name, mean_of(latencies));
  }
  return latency_table(means, baseline);
}

std::string latency_csv(const std::vector<LatencyRow>& rows) {
  std::string out = "name,mean_seconds_per_sample,overhead_pct\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.2f\n", r.mean_s, r.overhead_pct);
    out += csv_field(r.name) + buf;
  }
  return out;
}

}  // namespace guardkit
