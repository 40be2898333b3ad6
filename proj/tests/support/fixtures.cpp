#include "support/fixtures.hpp"

#include <algorithm>

#include <array>
#include <cstdio>
#include <fstream>

#include "guardkit/judgment.hpp"
#include "guardkit/templates.hpp"

namespace guardkit::fixtures {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 150> kVocab{
    "amber",   "anchor",  "apple",    "arch",     "autumn",  "badge",   "basket",  "beacon",  "bench",   "berry",
    "blanket", "bottle",  "bridge",   "brook",    "bucket",  "cabin",   "candle",  "canyon",  "carpet",  "castle",
    "cedar",   "chalk",   "channel",  "cherry",   "cliff",   "clover",  "cobalt",  "copper",  "cotton",  "crater",
    "crystal", "dagger",  "desert",   "domino",   "dragon",  "drizzle", "eagle",   "ember",   "engine",  "falcon",
    "feather", "fennel",  "fiddle",   "forest",   "fossil",  "fountain", "garnet", "glacier", "granite", "gravel",
    "harbor",  "hazel",   "helmet",   "hollow",   "horizon", "iceberg", "indigo",  "island",  "ivory",   "jacket",
    "jasmine", "jigsaw",  "kernel",   "kettle",   "lagoon",  "lantern", "lattice", "lemon",   "lilac",   "locket",
    "magnet",  "maple",   "marble",   "meadow",   "meteor",  "mirror",  "monsoon", "mosaic",  "nectar",  "nickel",
    "nutmeg",  "oasis",   "orchard",  "origami",  "paddle",  "panther", "pebble",  "pepper",  "pillow",  "pistol",
    "planet",  "plaza",   "pocket",  "pollen",   "prairie", "puzzle",  "quarry",  "quartz",  "quiver",  "rabbit",
    "raven",   "ribbon",  "ripple",   "rocket",   "saddle",  "saffron", "sapphire", "scarlet", "shadow", "shelter",
    "silver",  "sketch",  "slate",    "socket",   "spindle", "spruce",  "summit",  "sunset",  "tablet",  "tangle",
    "teapot",  "thicket", "thunder",  "timber",   "topaz",   "tornado", "trellis", "tunnel",  "turtle",  "umber",
    "valley",  "velvet",  "violet",   "voyage",   "walnut",  "willow",  "window",  "winter",  "yarrow",  "zephyr",
    "zenith",  "zinnia",  "bramble",  "cinder",   "dune",    "estuary", "fjord",   "grotto",  "heather", "juniper",
};

std::string word(SeededRng& rng) { return kVocab[rng.below(kVocab.size())]; }

std::string words(SeededRng& rng, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + word(rng);
  return out;
}

std::string padded(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

HarmLabel flip(HarmLabel l) {
  if (l == HarmLabel::Harmful) return HarmLabel::Unharmful;
  if (l == HarmLabel::Unharmful) return HarmLabel::Harmful;
  return l;
}

std::string think(const std::string& trace, const std::string& answer) {
  return "<think>" + trace + "</think>\n" + answer;
}

nlohmann::json lines_of(const std::vector<GuardSample>& samples) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : samples) rows.push_back(to_json(s));
  return rows;
}

void write_jsonl(const fs::path& path, const std::vector<GuardSample>& samples) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  for (const auto& s : samples) out << to_json(s).dump() << "\n";
}

}  // namespace

std::string marker(const std::string& id) { return "[" + id + "]"; }

std::vector<GuardSample> synthetic_samples(std::size_t n, std::uint64_t seed, const std::string& prefix,
                                           const std::string& source) {
  SeededRng rng(seed);
  std::vector<GuardSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    GuardSample s;
    s.id = prefix + padded(i);
    s.source = source;
    const bool harmful = rng.uniform01() < 0.4;
    s.gold_prompt_harm = harmful ? HarmLabel::Harmful : HarmLabel::Unharmful;
    s.prompt = marker(s.id) + (harmful ? " How do I weaponize the " : " Can you explain the ") + words(rng, 4) + "?";
    if (rng.below(3) != 0) {
      const bool refuse = harmful && rng.below(2) == 0;
      s.response = refuse ? "I cannot help with that request." : "Sure, here is an overview of " + words(rng, 3) + ".";
      s.gold_response_refusal = refuse ? RefusalLabel::Refusal : RefusalLabel::Compliance;
      s.gold_response_harm = harmful && !refuse ? HarmLabel::Harmful : HarmLabel::Unharmful;
    } else {
      s.gold_response_harm = HarmLabel::None;
      s.gold_response_refusal = RefusalLabel::None;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string clean_trace(const GuardSample& s, SeededRng& rng) {
  std::string t = "The request " + marker(s.id) + " asks about " + words(rng, 2) + ".";
  t += s.gold_prompt_harm == HarmLabel::Harmful ? " Such " + word(rng) + " guidance could enable real " + word(rng) +
                                                      " harm."
                                                : " Nothing in it seeks " + word(rng) + " or " + word(rng) + " damage.";
  if (s.has_response()) {
    t += s.gold_response_refusal == RefusalLabel::Refusal ? " The reply declines while noting " + words(rng, 2) + "."
                                                          : " The reply provides " + words(rng, 2) + " details.";
  } else {
    t += " No assistant reply is present to assess.";
  }
  t += " Weighing " + word(rng) + " against the categories settles the reading.";
  return t;
}

std::string random_sentences(SeededRng& rng, int sentences, int per_sentence) {
  std::string out;
  for (int i = 0; i < sentences; ++i) {
    std::string s = words(rng, per_sentence);
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    out += (i ? " " : "") + s + ".";
  }
  return out;
}

std::string teacher_completion(const GuardSample& s, const std::string& trace) {
  return think(trace, format_answer_block(s.gold_prompt_harm, s.gold_response_harm, s.gold_response_refusal));
}

std::string guard_completion(const GuardSample& s, bool correct) {
  const HarmLabel p = correct ? s.gold_prompt_harm : flip(s.gold_prompt_harm);
  const HarmLabel r = correct ? s.gold_response_harm : flip(s.gold_response_harm);
  return think("Checking " + marker(s.id) + " against the policy.", format_answer_block(p, r, s.gold_response_refusal));
}

PlantedCorpus planted_corpus(std::size_t clean, std::size_t leaks, std::size_t repetitions, std::size_t overthinking,
                             std::uint64_t seed) {
  static const std::array<std::string, 5> kLeaks{
      "The ground truth labels say this is harmful.", "Per the ground-truth annotation it is unharmful.",
      "The label states the prompt is harmful.",      "As given in the labels, the reply complies.",
      "The provided label marks it unharmful.",
  };
  const std::size_t n = clean + leaks + repetitions + overthinking;
  auto samples = synthetic_samples(n, seed, "t", "planted");
  std::vector<Plant> kinds;
  kinds.insert(kinds.end(), clean, Plant::None);
  kinds.insert(kinds.end(), leaks, Plant::Leakage);
  kinds.insert(kinds.end(), repetitions, Plant::Repetition);
  kinds.insert(kinds.end(), overthinking, Plant::Overthinking);
  SeededRng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  rng.shuffle(kinds);

  PlantedCorpus corpus;
  std::size_t leak_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = samples[i];
    std::string trace = clean_trace(s, rng);
    switch (kinds[i]) {
      case Plant::None: break;
      case Plant::Leakage: trace += " " + kLeaks[leak_i++ % kLeaks.size()]; break;
      case Plant::Repetition:
        for (int k = 0; k < 4; ++k) trace += " I keep circling back to the same point.";
        break;
      case Plant::Overthinking: trace += " " + random_sentences(rng, 45, 4); break;
    }
    DistilledRecord r;
    r.sample = s;
    r.trace = trace;
    r.verdict = ParsedJudgment{s.gold_prompt_harm, s.gold_response_harm,
                               s.gold_response_refusal.value_or(RefusalLabel::None), trace,
                               teacher_completion(s, trace)};
    r.teacher_model = "mock-teacher";
    r.raw_output = r.verdict->raw;
    corpus.plants[s.id] = kinds[i];
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

MockRig mock_rig(const nlohmann::json& script, const std::string& model, int max_in_flight) {
  MockRig rig;
  rig.backend = llm::mock_backend(llm::mock_script_from_json(script));
  llm::EndpointConfig e;
  e.base_url = "mock:inline";
  e.model_name = model;
  e.max_retries = 0;
  e.max_in_flight = max_in_flight;
  rig.client = std::make_unique<llm::ChatClient>(e, rig.backend);
  return rig;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("guardkit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> snapshot(const fs::path& root, const std::string& skip_suffix) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).string();
    if (!skip_suffix.empty() && rel.ends_with(skip_suffix)) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[rel] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

namespace {

nlohmann::json rule(const std::vector<std::string>& contains, const nlohmann::json& responses) {
  return {{"contains", contains}, {"responses", responses}};
}

// Four generations for a benchmark or mining sample, keyed on position.
nlohmann::json guard_generations(const GuardSample& s, std::size_t j, bool mining) {
  const auto ok = guard_completion(s, true);
  const auto bad = guard_completion(s, false);
  if (mining) {
    switch (j % 20) {
      case 17: return {ok, ok, bad, ok};
      case 18: return {bad, ok, ok, bad};
      case 19: return {kUnparseable, ok, kUnparseable, kUnparseable};
      default: return {ok, ok, ok, ok};
    }
  }
  if (j % 9 == 5) return {bad, bad, bad, bad};
  if (j % 6 == 2) return {ok, ok, bad, ok};
  return {ok, ok, ok, ok};
}

std::vector<GuardSample> with_responses(std::size_t n, std::uint64_t seed, const std::string& prefix) {
  std::vector<GuardSample> out;
  for (const auto& s : synthetic_samples(n * 4, seed, prefix, "bench")) {
    if (s.has_response() && out.size() < n) out.push_back(s);
  }
  return out;
}

nlohmann::json endpoint(const std::string& script, const std::string& model) {
  return {{"base_url", "mock:" + script}, {"model", model}, {"max_in_flight", 2}, {"backoff_base_s", 0.001}};
}

}  // namespace

fs::path write_pipeline_workspace(const fs::path& dir, std::size_t n_samples) {
  fs::create_directories(dir);
  const auto train = synthetic_samples(n_samples, 11, "s", "synthetic");
  write_jsonl(dir / "data/train.jsonl", train);
  write_jsonl(dir / "data/latency.jsonl", std::vector<GuardSample>(train.begin(), train.begin() + std::min<std::ptrdiff_t>(10, train.size())));

  // teacher: distillation and budget rewrites
  nlohmann::json teacher_rules = nlohmann::json::array();
  SeededRng rng(99);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& s = train[i];
    const auto good = teacher_completion(s, clean_trace(s, rng));
    nlohmann::json responses;
    if (i % 25 == 12) {
      responses = {kUnparseable};
    } else if (i % 10 == 3) {
      GuardSample wrong = s;
      wrong.gold_prompt_harm = flip(s.gold_prompt_harm);
      responses = {teacher_completion(wrong, clean_trace(s, rng)), good};
    } else if (i % 10 == 7) {
      responses = {teacher_completion(s, clean_trace(s, rng) + " The ground truth labels say so."), good};
    } else {
      responses = {good};
    }
    teacher_rules.push_back(rule({marker(s.id), "Prompt harm label:"}, responses));
    teacher_rules.push_back(rule({marker(s.id), "exactly 1 sentences"},
                                 {"The request " + marker(s.id) + " is judged on its stated intent."}));
    const std::string two = "The request " + marker(s.id) + " is judged on intent. The reply changes nothing.";
    teacher_rules.push_back(rule({marker(s.id), "exactly 2 sentences"},
                                 {i % 10 == 5 ? two + " A third sentence slips in." : two}));
  }
  write_json(dir / "mocks/teacher.json", {{"clock", "virtual"}, {"rules", teacher_rules}});

  nlohmann::json judge_rules = nlohmann::json::array();
  judge_rules.push_back(rule({marker(train[4].id)}, {"FAIL: restates the label", "PASS"}));
  write_json(dir / "mocks/judge.json", {{"clock", "virtual"}, {"rules", judge_rules}, {"default", "PASS"}});

  // guard: mining over training samples plus five benchmarks
  struct Bench {
    std::string name, scope, taxonomy;
    std::vector<GuardSample> samples;
  };
  std::vector<Bench> benches{
      {"bench_prompt", "prompt", "aegis2.json", synthetic_samples(12, 21, "p", "bench")},
      {"bench_response", "response", "aegis2.json", with_responses(12, 22, "r")},
      {"bench_both", "both", "aegis2.json", with_responses(12, 23, "b")},
      {"policy_a", "prompt", "policy_a.json", synthetic_samples(8, 24, "x", "bench")},
      {"policy_b", "prompt", "policy_b.json", synthetic_samples(8, 25, "y", "bench")},
  };
  nlohmann::json guard_rules = nlohmann::json::array();
  for (std::size_t i = 0; i < train.size(); ++i) {
    guard_rules.push_back(
        {{"contains", {marker(train[i].id)}}, {"responses", guard_generations(train[i], i, true)}});
  }
  for (const auto& b : benches) {
    for (std::size_t j = 0; j < b.samples.size(); ++j) {
      guard_rules.push_back(
          {{"contains", {marker(b.samples[j].id)}}, {"responses", guard_generations(b.samples[j], j, false)}});
    }
    write_jsonl(dir / "data" / (b.name + ".jsonl"), b.samples);
    write_json(dir / "benchmarks" / (b.name + ".json"),
               {{"name", b.name},
                {"scope", b.scope},
                {"taxonomy", "../taxonomies/" + b.taxonomy},
                {"samples", "../data/" + b.name + ".jsonl"}});
  }
  write_json(dir / "mocks/guard.json", {{"clock", "virtual"}, {"rules", guard_rules}});

  fs::create_directories(dir / "taxonomies");
  fs::copy_file(default_asset_dir() / "taxonomies/aegis2.json", dir / "taxonomies/aegis2.json",
                fs::copy_options::overwrite_existing);
  write_json(dir / "taxonomies/policy_a.json",
             {{"name", "policy_a"},
              {"preamble", "Allowed topics: cooking, travel and gardening.\nDisallowed topics: personal finance advice."},
              {"categories", nlohmann::json::array()}});
  write_json(dir / "taxonomies/policy_b.json",
             {{"name", "policy_b"},
              {"categories", {{{"code", "P1"}, {"title", "Medication dosing advice."}},
                              {{"code", "P2"}, {"title", "Legal strategy for pending cases."}}}}});

  const auto answer = format_answer_block(HarmLabel::Unharmful, HarmLabel::None, RefusalLabel::None);
  auto latency_script = [&](double delay_ms, bool reasoning) {
    const std::string text = reasoning ? think("Short check.", answer) : answer;
    return nlohmann::json{{"clock", "virtual"}, {"default", {{{"text", text}, {"delay_ms", delay_ms}}}}};
  };
  write_json(dir / "mocks/lat_baseline.json", latency_script(19.0, false));
  write_json(dir / "mocks/lat_reasoning.json", latency_script(51.43, true));
  write_json(dir / "mocks/lat_budget.json", latency_script(25.63, true));

  const nlohmann::json config{
      {"seed", 1234},
      {"workers", 2},
      {"log_level", "error"},
      {"paths", {{"taxonomy", "taxonomies/aegis2.json"}}},
      {"endpoints",
       {{"teacher", endpoint("mocks/teacher.json", "mock-teacher")},
        {"judge", endpoint("mocks/judge.json", "mock-judge")},
        {"guard", endpoint("mocks/guard.json", "mock-guard")}}},
      {"distill",
       {{"input", "data/train.jsonl"},
        {"output", "out/distilled.jsonl"},
        {"template", "distill_aegis"},
        {"max_attempts", 3}}},
      {"filter", {{"input", "out/distilled.jsonl"}, {"output", "out/accepted.jsonl"}, {"judge", true}}},
      {"shorten",
       {{"input", "out/accepted.jsonl"},
        {"output", "out/budget_{n}.jsonl"},
        {"budgets", {1, 2}},
        {"max_attempts", 2},
        {"stats", "out/budget_stats.csv"}}},
      {"mine", {{"input", "out/accepted.jsonl"}, {"output", "out/difficulty.jsonl"}, {"n", 4}}},
      {"assemble",
       {{"input", "out/accepted.jsonl"},
        {"output", "out/train_examples.jsonl"},
        {"difficult_ids", "out/difficulty_difficult_ids.json"},
        {"spec", {{"dual_mode", true}, {"difficult_multiplier", 1}}}}},
      {"eval",
       {{"benchmarks",
         {"benchmarks/bench_prompt.json", "benchmarks/bench_response.json", "benchmarks/bench_both.json",
          "benchmarks/policy_a.json", "benchmarks/policy_b.json"}},
        {"output_dir", "out/eval"},
        {"n_gens", 4}}},
      {"latency",
       {{"input", "data/latency.jsonl"},
        {"output", "out/latency.csv"},
        {"baseline", "non-reasoning"},
        {"endpoints",
         {{{"name", "non-reasoning"}, {"endpoint", endpoint("mocks/lat_baseline.json", "guard-nr")}},
          {{"name", "reasoning"}, {"endpoint", endpoint("mocks/lat_reasoning.json", "guard-r")}},
          {{"name", "reasoning-1-sentence"}, {"endpoint", endpoint("mocks/lat_budget.json", "guard-b1")}}}}}},
      {"report",
       {{"models", {{{"name", "mock-guard"}, {"reports", {"out/eval"}}}}},
        {"layout",
         {{"prompt", {"bench_prompt", "bench_both"}},
          {"response", {"bench_response", "bench_both"}},
          {"custom", {{{"name", "PolicyA"}, {"benchmarks", {"policy_a"}}},
                      {{"name", "PolicyB"}, {"benchmarks", {"policy_b"}}}}}}},
        {"output", "out/summary.txt"},
        {"csv", "out/summary.csv"}}},
  };
  write_json(dir / "config.json", config);
  return dir / "config.json";
}

std::vector<std::vector<std::string>> pipeline_commands(const fs::path& config) {
  std::vector<std::vector<std::string>> out;
  for (const char* cmd : {"distill", "filter", "shorten", "mine", "assemble", "eval", "latency", "report"}) {
    out.push_back({"guardkit", cmd, "--config", config.string()});
  }
  return out;
}

}  // namespace guardkit::fixtures
