#include "guardkit/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "guardkit/assembly.hpp"
#include "guardkit/budget.hpp"
#include "guardkit/cli/manifest.hpp"
#include "guardkit/cli/run_config.hpp"
#include "guardkit/difficulty.hpp"
#include "guardkit/error.hpp"
#include "guardkit/eval.hpp"
#include "guardkit/jsonl.hpp"
#include "guardkit/parallel.hpp"
#include "guardkit/quality_filter.hpp"
#include "guardkit/trace_gen.hpp"

namespace guardkit::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string log_level;
  std::string input;
  std::string output;
  bool resume = false;
  std::optional<int> n_sentences;
  std::optional<int> n_gens;
};

// A path as written in the config (recorded in manifests) and as resolved.
struct PathArg {
  std::string raw;
  fs::path path;
};

PathArg path_arg(const RunConfig& cfg, const std::string& section, const std::string& key) {
  const auto& s = cfg.section(section);
  if (!s.contains(key) || !s.at(key).is_string()) throw ConfigError("missing " + section + "." + key);
  const auto raw = s.at(key).get<std::string>();
  return {raw, cfg.resolve(raw)};
}

std::optional<PathArg> optional_path_arg(const RunConfig& cfg, const std::string& section, const std::string& key) {
  if (!cfg.section(section).contains(key) || cfg.section(section).at(key).is_null()) return std::nullopt;
  return path_arg(cfg, section, key);
}

// out.jsonl -> out_<suffix>.jsonl, or out_<suffix><extension> when one is given
PathArg sibling(const PathArg& base, const std::string& suffix, const std::string& extension = "") {
  auto with_suffix = [&](const std::string& s) {
    const fs::path p(s);
    const auto ext = extension.empty() ? p.extension().string() : extension;
    return (p.parent_path() / (p.stem().string() + "_" + suffix + ext)).string();
  };
  return {with_suffix(base.raw), fs::path(with_suffix(base.path.string()))};
}

PathArg path_or_sibling(const RunConfig& cfg, const std::string& section, const std::string& key,
                        const PathArg& base, const std::string& suffix, const std::string& extension = "") {
  if (auto p = optional_path_arg(cfg, section, key)) return *p;
  return sibling(base, suffix, extension);
}

std::vector<GuardSample> read_samples(const fs::path& path) {
  return read_jsonl_as<GuardSample>(path, sample_from_json);
}

std::vector<DistilledRecord> read_records(const fs::path& path) {
  return read_jsonl_as<DistilledRecord>(path, record_from_json);
}

template <typename T>
void write_rows(const fs::path& path, const std::vector<T>& items) {
  std::vector<nlohmann::json> rows;
  rows.reserve(items.size());
  for (const auto& item : items) rows.push_back(to_json(item));
  write_jsonl_atomic(path, rows);
}

Manifest manifest_for(const std::string& command, const RunConfig& cfg) {
  return Manifest(command, cfg.hash(), cfg.seed());
}

Taxonomy section_taxonomy(const RunConfig& cfg, const std::string& section) {
  const auto& s = cfg.section(section);
  if (s.contains("taxonomy")) return cfg.taxonomy_at(s.at("taxonomy").get<std::string>());
  return cfg.taxonomy();
}

// ---------------------------------------------------------------- distill

std::vector<GuardSample> read_distill_input(const RunConfig& cfg, const fs::path& input) {
  if (cfg.section("distill").value("input_format", std::string("samples")) == "samples") return read_samples(input);
  std::vector<GuardSample> out;
  for (const auto& j : read_jsonl(input)) {
    auto samples = topic_dialogue_to_samples(topic_dialogue_from_json(j));
    out.insert(out.end(), samples.begin(), samples.end());
  }
  return out;
}

struct DistillSetup {
  Taxonomy taxonomy;
  PromptTemplate distill_template;
  llm::SamplingParams params;
  DistillOptions options;
};

DistillSetup distill_setup(const RunConfig& cfg) {
  const auto& d = cfg.section("distill");
  const auto kind = template_kind_from_string(d.value("template", std::string("distill_aegis")));
  DistillOptions options;
  options.max_attempts = d.value("max_attempts", options.max_attempts);
  options.workers = cfg.workers();
  options.delimiters = cfg.delimiters();
  if (options.max_attempts < 1) throw ConfigError("distill.max_attempts must be positive");
  return {section_taxonomy(cfg, "distill"), cfg.load_template(*kind), cfg.sampling("distill"), options};
}

int cmd_distill(const RunConfig& cfg, const Flags& flags) {
  const auto input = path_arg(cfg, "distill", "input");
  const auto output = path_arg(cfg, "distill", "output");
  const auto rejected_path = path_or_sibling(cfg, "distill", "rejected", output, "rejected");
  auto setup = distill_setup(cfg);
  auto teacher = llm::make_client(cfg.endpoint("teacher"));

  auto samples = read_distill_input(cfg, input.path);
  std::vector<DistilledRecord> kept_pending, kept_rejected;
  if (flags.resume) {
    if (fs::exists(output.path)) kept_pending = read_records(output.path);
    if (fs::exists(rejected_path.path)) kept_rejected = read_records(rejected_path.path);
    std::unordered_set<std::string> done;
    for (const auto& r : kept_pending) done.insert(r.sample.id);
    for (const auto& r : kept_rejected) done.insert(r.sample.id);
    const auto before = samples.size();
    std::erase_if(samples, [&](const GuardSample& s) { return done.count(s.id) > 0; });
    spdlog::info("resume: {} of {} samples already done", before - samples.size(), before);
  }

  auto result = distill(samples, setup.taxonomy, setup.distill_template, *teacher, setup.params, setup.options);
  kept_pending.insert(kept_pending.end(), result.pending.begin(), result.pending.end());
  kept_rejected.insert(kept_rejected.end(), result.rejected.begin(), result.rejected.end());
  write_rows(output.path, kept_pending);
  write_rows(rejected_path.path, kept_rejected);

  auto m = manifest_for("distill", cfg);
  m.add_input("samples", input.raw, samples.size());
  m.add_output("pending", output.raw, kept_pending.size());
  m.add_output("rejected", rejected_path.raw, kept_rejected.size());
  m.extra()["template"] = std::string(to_string(setup.distill_template.kind()));
  m.extra()["max_attempts"] = setup.options.max_attempts;
  m.extra()["resumed"] = flags.resume;
  m.write(output.path);
  spdlog::info("distill: {} pending, {} rejected", kept_pending.size(), kept_rejected.size());
  return kExitOk;
}

// ---------------------------------------------------------------- filter

int cmd_filter(const RunConfig& cfg, const Flags&) {
  const auto& f = cfg.section("filter");
  const auto input = path_arg(cfg, "filter", "input");
  const auto output = path_arg(cfg, "filter", "output");
  const auto rejected_path = path_or_sibling(cfg, "filter", "rejected", output, "rejected");
  const auto deferred_path = path_or_sibling(cfg, "filter", "deferred", output, "deferred");

  // Fail fast on config before touching data.
  const FilterConfig fc = cfg.filter_config();
  std::unique_ptr<llm::ChatClient> judge_client;
  std::optional<JudgeSettings> judge;
  if (f.value("judge", false)) {
    judge_client = llm::make_client(cfg.endpoint("judge"));
    judge = JudgeSettings{judge_client.get(), cfg.load_template(TemplateKind::Judge), cfg.sampling("filter")};
  }
  const QualityFilter filter(fc, std::move(judge));

  const bool regenerate = f.value("regenerate", cfg.has_section("distill") && cfg.has_endpoint("teacher"));
  std::optional<DistillSetup> setup;
  std::unique_ptr<llm::ChatClient> teacher;
  if (regenerate) {
    setup = distill_setup(cfg);
    teacher = llm::make_client(cfg.endpoint("teacher"));
  }

  const auto records = read_records(input.path);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < records.size(); ++i) position.emplace(records[i].sample.id, i);

  FilterResult total;
  std::size_t regenerated = 0;
  std::vector<DistilledRecord> round = records;
  while (!round.empty()) {
    auto result = filter.run(round, cfg.workers());
    total.accepted.insert(total.accepted.end(), result.accepted.begin(), result.accepted.end());
    total.deferred.insert(total.deferred.end(), result.deferred.begin(), result.deferred.end());
    round.clear();
    std::vector<DistilledRecord> retry;
    for (auto& r : result.rejected) {
      if (regenerate && r.attempt < setup->options.max_attempts) {
        retry.push_back(std::move(r));
      } else {
        total.rejected.push_back(std::move(r));
      }
    }
    if (retry.empty()) break;
    regenerated += retry.size();
    auto fresh = ordered_parallel_map(retry, cfg.workers(), [&](const DistilledRecord& r) {
      return distill_sample(r.sample, setup->taxonomy, setup->distill_template, *teacher, setup->params,
                            setup->options, r.attempt + 1);
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      if (fresh[i].status == RecordStatus::Rejected) {
        // keep the filter findings that triggered the retry next to the teacher failure
        auto r = std::move(fresh[i]);
        r.findings = retry[i].findings;
        total.rejected.push_back(std::move(r));
      } else {
        round.push_back(std::move(fresh[i]));
      }
    }
  }

  auto by_input_order = [&](std::vector<DistilledRecord>& v) {
    std::stable_sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
      return position.at(a.sample.id) < position.at(b.sample.id);
    });
  };
  by_input_order(total.accepted);
  by_input_order(total.rejected);
  by_input_order(total.deferred);

  write_rows(output.path, total.accepted);
  write_rows(rejected_path.path, total.rejected);
  write_rows(deferred_path.path, total.deferred);

  std::map<std::string, std::size_t> reasons;
  for (const auto& r : total.rejected) {
    for (const auto& why : r.reasons) ++reasons[why.substr(0, why.find(':'))];
  }
  auto m = manifest_for("filter", cfg);
  m.add_input("records", input.raw, records.size());
  m.add_output("accepted", output.raw, total.accepted.size());
  m.add_output("rejected", rejected_path.raw, total.rejected.size());
  m.add_output("deferred", deferred_path.raw, total.deferred.size());
  m.extra()["filter_config"] = to_json(fc);
  m.extra()["judge"] = f.value("judge", false);
  m.extra()["regenerated"] = regenerated;
  m.extra()["rejection_reasons"] = reasons;
  m.write(output.path);
  spdlog::info("filter: {} accepted, {} rejected, {} deferred ({} regenerations)", total.accepted.size(),
               total.rejected.size(), total.deferred.size(), regenerated);
  return kExitOk;
}

// ---------------------------------------------------------------- shorten

PathArg for_budget(const PathArg& p, int n, bool several) {
  const std::string marker = "{n}";
  auto sub = [&](std::string s) {
    const auto at = s.find(marker);
    if (at != std::string::npos) return s.replace(at, marker.size(), std::to_string(n));
    if (!several) return s;
    throw ConfigError("several budgets need a '{n}' placeholder in '" + s + "'");
  };
  return {sub(p.raw), fs::path(sub(p.path.string()))};
}

int cmd_shorten(const RunConfig& cfg, const Flags& flags) {
  const auto& s = cfg.section("shorten");
  const auto input = path_arg(cfg, "shorten", "input");
  const auto output = path_arg(cfg, "shorten", "output");
  const auto rejected_path = path_or_sibling(cfg, "shorten", "rejected", output, "rejected");
  std::vector<int> budgets = s.value("budgets", std::vector<int>{s.value("n_sentences", 1)});
  if (flags.n_sentences) budgets = {*flags.n_sentences};
  const bool several = budgets.size() > 1;

  const auto shorten_template = cfg.load_template(TemplateKind::ShortenBudget);
  const LeakageDetector leakage(cfg.filter_config().leakage_patterns);
  auto teacher = llm::make_client(cfg.endpoint(s.value("endpoint", std::string("teacher"))));
  const ShortenContext ctx{shorten_template, *teacher, cfg.sampling("shorten"), leakage, cfg.delimiters()};

  const auto records = read_records(input.path);
  std::map<int, std::vector<std::string>> corpora;
  auto m = manifest_for("shorten", cfg);
  m.add_input("records", input.raw, records.size());
  for (int n : budgets) {
    const BudgetConfig bc{n, s.value("tolerance", 0), s.value("max_attempts", 3)};
    bc.validate();
    auto shortened = shorten_all(records, bc, ctx, cfg.workers());
    std::vector<DistilledRecord> ok, bad;
    for (auto& r : shortened) (r.status == RecordStatus::Rejected ? bad : ok).push_back(std::move(r));
    for (const auto& r : ok) corpora[n].push_back(r.trace);
    const auto out_n = for_budget(output, n, several);
    const auto rej_n = for_budget(rejected_path, n, several);
    write_rows(out_n.path, ok);
    write_rows(rej_n.path, bad);
    m.add_output("budget_" + std::to_string(n), out_n.raw, ok.size());
    m.add_output("budget_" + std::to_string(n) + "_rejected", rej_n.raw, bad.size());
    spdlog::info("shorten n={}: {} accepted, {} budget violations", n, ok.size(), bad.size());
  }
  for (auto it = corpora.begin(); it != corpora.end();) {
    it = it->second.empty() ? corpora.erase(it) : std::next(it);
  }
  const auto stats = budget_stats(corpora);
  if (auto stats_path = optional_path_arg(cfg, "shorten", "stats")) {
    write_file_atomic(stats_path->path, budget_stats_csv(stats));
    m.add_output("stats", stats_path->raw, stats.rows.size());
  }
  m.extra()["budgets"] = budgets;
  m.extra()["tolerance"] = s.value("tolerance", 0);
  m.extra()["stats_skipped"] = stats.skipped;
  m.write(for_budget(output, budgets.front(), several).path);
  return kExitOk;
}

// ---------------------------------------------------------------- assemble

std::set<std::string> read_id_list(const fs::path& path) {
  try {
    auto j = nlohmann::json::parse(read_text_file(path));
    if (j.is_object()) j = j.at("ids");
    return j.get<std::set<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": expected a JSON array of ids: " + e.what());
  }
}

int cmd_assemble(const RunConfig& cfg, const Flags&) {
  const auto& a = cfg.section("assemble");
  const auto input = path_arg(cfg, "assemble", "input");
  const auto output = path_arg(cfg, "assemble", "output");
  const AssemblySpec spec = cfg.assembly_spec();
  const auto taxonomy = section_taxonomy(cfg, "assemble");
  const auto inference = cfg.load_template(TemplateKind::Inference);
  const auto delims = cfg.delimiters();

  auto m = manifest_for("assemble", cfg);
  auto records = read_records(input.path);
  m.add_input("records", input.raw, records.size());
  std::erase_if(records, [](const DistilledRecord& r) { return r.status == RecordStatus::Rejected; });
  if (spec.subset_size) records = sample_subset(records, *spec.subset_size, spec.seed);

  auto examples = assemble(records, taxonomy, inference, spec, delims);
  for (std::size_t i = 0; i < spec.merge_sources.size(); ++i) {
    const auto& src = spec.merge_sources[i];
    auto tf = read_records(cfg.resolve(src));
    m.add_input("merge_" + std::to_string(i), src, tf.size());
    AssemblySpec tf_spec = spec;
    tf_spec.seed = spec.seed + i + 1;
    examples = merge_topic_following(examples, assemble(tf, taxonomy, inference, tf_spec, delims), spec.seed);
  }
  if (auto ids_path = optional_path_arg(cfg, "assemble", "difficult_ids")) {
    const auto ids = read_id_list(ids_path->path);
    m.add_input("difficult_ids", ids_path->raw, ids.size());
    examples = augment_with_difficult(examples, ids, spec.difficult_multiplier);
  }
  write_rows(output.path, examples);
  m.add_output("examples", output.raw, examples.size());
  m.extra()["assembly"] = assembly_manifest(examples, spec);
  if (a.contains("note")) m.extra()["note"] = a.at("note");
  m.write(output.path);
  spdlog::info("assemble: {} training examples", examples.size());
  return kExitOk;
}

// ---------------------------------------------------------------- mine

int cmd_mine(const RunConfig& cfg, const Flags&) {
  const auto& s = cfg.section("mine");
  const auto input = path_arg(cfg, "mine", "input");
  const auto output = path_arg(cfg, "mine", "output");
  const auto summary_path = path_or_sibling(cfg, "mine", "summary", output, "summary", ".json");
  const auto ids_path = path_or_sibling(cfg, "mine", "difficult_ids", output, "difficult_ids", ".json");

  MineOptions options;
  options.n = s.value("n", 4);
  options.workers = cfg.workers();
  options.reasoning_expected = s.value("reasoning", true);
  options.mode_token = s.value("mode_token", std::string());
  options.delimiters = cfg.delimiters();
  const bool include_noisy = s.value("include_noisy", false);
  const auto taxonomy = section_taxonomy(cfg, "mine");
  const auto inference = cfg.load_template(TemplateKind::Inference);
  auto guard = llm::make_client(cfg.endpoint(s.value("endpoint", std::string("guard"))));

  const auto samples = read_samples(input.path);
  auto result = mine(samples, *guard, taxonomy, inference, cfg.sampling("mine"), options);
  write_rows(output.path, result.records);

  auto m = manifest_for("mine", cfg);
  m.add_input("samples", input.raw, samples.size());
  m.add_output("records", output.raw, result.records.size());
  if (!result.records.empty()) {
    const auto summary = summarize(result.records);
    write_file_atomic(summary_path.path, to_json(summary).dump(2) + "\n");
    m.add_output("summary", summary_path.raw, summary.total);
    spdlog::info("mine: easy {:.3f}, difficult {:.3f}, noisy {:.3f}", summary.fraction(Bucket::Easy),
                 summary.fraction(Bucket::Difficult), summary.fraction(Bucket::Noisy));
  }
  std::vector<Bucket> wanted{Bucket::Difficult};
  if (include_noisy) wanted.push_back(Bucket::Noisy);
  const auto ids = ids_in(result.records, wanted);
  write_file_atomic(ids_path.path, nlohmann::json(ids).dump(2) + "\n");
  m.add_output("difficult_ids", ids_path.raw, ids.size());
  m.extra()["n"] = options.n;
  m.extra()["correctness_rule"] = kCorrectnessRule;
  m.extra()["include_noisy"] = include_noisy;
  m.extra()["deferred"] = result.deferred;
  m.write(output.path);
  return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const RunConfig& cfg, const Flags& flags) {
  const auto& s = cfg.section("eval");
  const auto out_dir = path_arg(cfg, "eval", "output_dir");
  EvalOptions options;
  options.n_gens = flags.n_gens.value_or(s.value("n_gens", 4));
  options.workers = cfg.workers();
  options.reasoning_expected = s.value("reasoning", true);
  options.mode_token = s.value("mode_token", std::string());
  options.delimiters = cfg.delimiters();
  const auto inference = cfg.load_template(TemplateKind::Inference);
  auto guard = llm::make_client(cfg.endpoint(s.value("endpoint", std::string("guard"))));
  const auto params = cfg.sampling("eval");

  auto m = manifest_for("eval", cfg);
  nlohmann::json index = nlohmann::json::array();
  for (const auto& raw : s.value("benchmarks", std::vector<std::string>{})) {
    const auto bench = load_benchmark(cfg.resolve(raw));
    const auto report = evaluate(bench, *guard, inference, params, options);
    const std::string file = bench.name + ".report.json";
    write_file_atomic(out_dir.path / file, to_json(report).dump(2) + "\n");
    m.add_input(bench.name, raw, bench.samples.size());
    m.add_output(bench.name, (fs::path(out_dir.raw) / file).string(), 1);
    index.push_back({{"benchmark", bench.name}, {"report", file}});
    spdlog::info("eval {}: prompt {} response {}", bench.name,
                 report.prompt ? std::to_string(report.prompt->mean_f1) : "-",
                 report.response ? std::to_string(report.response->mean_f1) : "-");
  }
  const auto index_path = out_dir.path / "index.json";
  write_file_atomic(index_path, index.dump(2) + "\n");
  m.extra()["n_gens"] = options.n_gens;
  m.extra()["f1_convention"] = kDegenerateF1Convention;
  m.write(index_path);
  return kExitOk;
}

// ---------------------------------------------------------------- latency

int cmd_latency(const RunConfig& cfg, const Flags&) {
  const auto& s = cfg.section("latency");
  const auto input = path_arg(cfg, "latency", "input");
  const auto output = path_arg(cfg, "latency", "output");
  const auto baseline = s.value("baseline", std::string());
  const auto taxonomy = section_taxonomy(cfg, "latency");
  const auto inference = cfg.load_template(TemplateKind::Inference);

  std::vector<std::unique_ptr<llm::ChatClient>> clients;
  std::vector<NamedGuard> guards;
  for (const auto& ep : s.value("endpoints", nlohmann::json::array())) {
    clients.push_back(llm::make_client(cfg.endpoint_from(ep.at("endpoint"))));
    guards.push_back({ep.at("name").get<std::string>(), clients.back().get(), ep.value("mode_token", std::string())});
  }
  if (guards.empty()) throw ConfigError("latency.endpoints is empty");
  const auto samples = read_samples(input.path);
  const auto rows = latency_bench(guards, samples, taxonomy, inference, cfg.sampling("latency"), baseline,
                                  cfg.workers());
  write_file_atomic(output.path, latency_csv(rows));

  auto m = manifest_for("latency", cfg);
  m.add_input("samples", input.raw, samples.size());
  m.add_output("table", output.raw, rows.size());
  m.extra()["baseline"] = baseline;
  m.write(output.path);
  std::cout << latency_csv(rows);
  return kExitOk;
}

// ---------------------------------------------------------------- report

std::vector<fs::path> report_files(const fs::path& p) {
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    const auto name = e.path().filename().string();
    if (name.size() > 12 && name.ends_with(".report.json")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_report(const RunConfig& cfg, const Flags&) {
  const auto& s = cfg.section("report");
  const auto output = path_arg(cfg, "report", "output");
  const auto layout = cfg.eval_layout();
  auto m = manifest_for("report", cfg);

  std::vector<SummaryRow> rows;
  for (const auto& model : s.value("models", nlohmann::json::array())) {
    const auto name = model.at("name").get<std::string>();
    std::vector<EvalReport> reports;
    for (const auto& raw : model.at("reports").get<std::vector<std::string>>()) {
      for (const auto& file : report_files(cfg.resolve(raw))) {
        reports.push_back(eval_report_from_json(nlohmann::json::parse(read_text_file(file))));
      }
      m.add_input(name + ":" + raw, raw, reports.size());
    }
    rows.push_back(aggregate(name, reports, layout));
  }
  if (rows.empty()) throw ConfigError("report.models is empty");
  const auto table = render_summary_text(rows, layout);
  write_file_atomic(output.path, table);
  m.add_output("table", output.raw, rows.size());
  if (auto csv = optional_path_arg(cfg, "report", "csv")) {
    write_file_atomic(csv->path, render_summary_csv(rows, layout));
    m.add_output("csv", csv->raw, rows.size());
  }
  m.extra()["layout"] = to_json(layout);
  m.write(output.path);
  std::cout << table;
  return kExitOk;
}

// ---------------------------------------------------------------- driver

using Command = int (*)(const RunConfig&, const Flags&);

struct CommandSpec {
  const char* name;
  const char* help;
  Command fn;
};

constexpr CommandSpec kCommands[] = {
    {"distill", "Generate reasoning traces from a teacher shown the gold labels", cmd_distill},
    {"filter", "Apply rule-based and judge quality gates, regenerating rejects", cmd_filter},
    {"shorten", "Rewrite accepted traces to fixed sentence budgets", cmd_shorten},
    {"assemble", "Build SFT examples (subsets, dual-mode, merges, oversampling)", cmd_assemble},
    {"mine", "Best-of-N difficulty mining against a guard endpoint", cmd_mine},
    {"eval", "Harmful-F1 evaluation over benchmark manifests", cmd_eval},
    {"latency", "Mean latency per sample and overhead against a baseline", cmd_latency},
    {"report", "Render the summary table from eval reports", cmd_report},
};

void emit_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

void setup_logging(const std::string& level) {
  auto logger = std::make_shared<spdlog::logger>("guardkit", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

nlohmann::json overrides_for(const std::string& command, const Flags& flags) {
  nlohmann::json o = nlohmann::json::object();
  auto abs = [](const std::string& p) { return fs::absolute(p).lexically_normal().string(); };
  if (flags.seed) o["seed"] = *flags.seed;
  if (flags.workers) o["workers"] = *flags.workers;
  if (!flags.log_level.empty()) o["log_level"] = flags.log_level;
  if (!flags.input.empty()) set_dotted(o, command + ".input", abs(flags.input));
  if (!flags.output.empty()) {
    set_dotted(o, command + (command == "eval" ? ".output_dir" : ".output"), abs(flags.output));
  }
  if (flags.n_sentences) set_dotted(o, "shorten.budgets", std::vector<int>{*flags.n_sentences});
  if (flags.n_gens) set_dotted(o, "eval.n_gens", *flags.n_gens);
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"guardkit: reasoning-guard data pipeline", "guardkit"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& spec : kCommands) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("-c,--config", flags.config, "JSON run config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Override the global seed");
    sub->add_option("--workers", flags.workers, "Override the worker count")->check(CLI::PositiveNumber);
    sub->add_option("--log-level", flags.log_level, "trace|debug|info|warn|error|off");
    if (std::string(spec.name) != "report") {
      sub->add_option("-i,--input", flags.input, "Override the stage input path");
    }
    sub->add_option("-o,--output", flags.output, "Override the stage output path");
    subs[spec.name] = sub;
  }
  subs["distill"]->add_flag("--resume", flags.resume, "Skip samples already present in the outputs");
  subs["shorten"]->add_option("--n-sentences", flags.n_sentences, "Single sentence budget")->check(CLI::Range(1, 10));
  subs["eval"]->add_option("--n-gens", flags.n_gens, "Generations per sample")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return kExitUsageError;
  }

  const CommandSpec* chosen = nullptr;
  for (const auto& spec : kCommands) {
    if (subs[spec.name]->parsed()) chosen = &spec;
  }
  try {
    setup_logging(flags.log_level.empty() ? "info" : flags.log_level);
    const auto cfg = RunConfig::load(flags.config, overrides_for(chosen->name, flags));
    setup_logging(cfg.log_level());
    return chosen->fn(cfg, flags);
  } catch (const ConfigError& e) {
    emit_error("config", e.what());
    return kExitUsageError;
  } catch (const UnboundSlot& e) {
    emit_error("template", e.what());
    return kExitUsageError;
  } catch (const ValidationError& e) {
    emit_error("validation", e.what());
    return kExitDomainError;
  } catch (const llm::TransportError& e) {
    emit_error("transport", e.what());
    return kExitDomainError;
  } catch (const Error& e) {
    emit_error("error", e.what());
    return kExitDomainError;
  } catch (const nlohmann::json::exception& e) {
    emit_error("validation", e.what());
    return kExitDomainError;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error("io", e.what());
    return kExitDomainError;
  }
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace guardkit::cli
