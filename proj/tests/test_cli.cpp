#include <gtest/gtest.h>

#include <fstream>
#include <functional>

#include "guardkit/cli/commands.hpp"
#include "guardkit/jsonl.hpp"
#include "guardkit/text.hpp"
#include "support/fixtures.hpp"

using namespace guardkit;
namespace fs = std::filesystem;

namespace {

int run_cmd(const fs::path& config, const std::string& command, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"guardkit", command, "--config", config.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return cli::run(args);
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text_file(p)); }

void edit_config(const fs::path& config, const std::function<void(nlohmann::json&)>& edit) {
  auto j = read_json(config);
  edit(j);
  fixtures::write_json(config, j);
}

std::map<std::string, std::string> rows_by_id(const fs::path& path) {
  std::map<std::string, std::string> out;
  for (const auto& j : read_jsonl(path)) out[j.at("id").get<std::string>()] = j.dump();
  return out;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli::run({"guardkit"}), cli::kExitUsageError);
  EXPECT_EQ(cli::run({"guardkit", "bogus"}), cli::kExitUsageError);
  EXPECT_EQ(cli::run({"guardkit", "distill"}), cli::kExitUsageError);
  EXPECT_EQ(cli::run({"guardkit", "distill", "--config", "/nonexistent/config.json"}), cli::kExitUsageError);
  EXPECT_EQ(cli::run({"guardkit", "--help"}), cli::kExitOk);
}

TEST(Cli, InvalidRegexFailsBeforeReadingData) {
  const auto dir = fixtures::scratch_dir("cli_regex");
  const auto config = fixtures::write_pipeline_workspace(dir, 5);
  edit_config(config, [](nlohmann::json& j) {
    j["filter"]["config"]["leakage_patterns"] = nlohmann::json::array({"(unclosed"});
    j["distill"]["input"] = "data/missing.jsonl";
  });
  EXPECT_EQ(run_cmd(config, "distill"), cli::kExitUsageError);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, ErrorKindsMapToExitCodes) {
  const auto dir = fixtures::scratch_dir("cli_exit");
  const auto config = fixtures::write_pipeline_workspace(dir, 5);
  // A missing input path is a usage problem.
  EXPECT_EQ(run_cmd(config, "filter"), cli::kExitUsageError);
  fs::create_directories(dir / "out");
  std::ofstream(dir / "out/distilled.jsonl") << "{\"id\": \"x\"}\n";
  EXPECT_EQ(run_cmd(config, "filter"), cli::kExitDomainError);
}

TEST(Cli, SmallPipelineEndToEnd) {
  const auto dir = fixtures::scratch_dir("cli_e2e");
  const auto config = fixtures::write_pipeline_workspace(dir, 30);
  for (const auto& args : fixtures::pipeline_commands(config)) {
    ASSERT_EQ(cli::run(args), cli::kExitOk) << args[1];
  }
  const auto out = dir / "out";
  for (const char* f : {"distilled.jsonl", "distilled_rejected.jsonl", "accepted.jsonl", "accepted_rejected.jsonl",
                        "budget_1.jsonl", "budget_2.jsonl", "budget_stats.csv", "difficulty.jsonl",
                        "difficulty_summary.json", "difficulty_difficult_ids.json", "train_examples.jsonl",
                        "eval/index.json", "latency.csv", "summary.txt", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto m = read_json(out / "distilled.jsonl.manifest.json");
  EXPECT_EQ(m["command"], "distill");
  EXPECT_EQ(m["seed"], 1234);
  EXPECT_TRUE(m.contains("config_hash"));
  EXPECT_TRUE(fs::exists(out / "distilled.jsonl.timing.json"));

  // i % 25 == 12 never parses, so sample s012 is rejected at distillation.
  const auto rejected = rows_by_id(out / "distilled_rejected.jsonl");
  EXPECT_EQ(rejected.count("s012"), 1u);
  // Leaked and disagreeing first attempts are retried and recovered.
  const auto accepted = rows_by_id(out / "accepted.jsonl");
  EXPECT_EQ(accepted.count("s003"), 1u);
  EXPECT_EQ(accepted.count("s007"), 1u);
  for (const auto& [id, row] : accepted) {
    EXPECT_EQ(text::to_lower(row).find("ground truth"), std::string::npos) << id;
  }
  // The judge fails s004 once; the regenerated trace passes.
  const auto s004 = nlohmann::json::parse(accepted.at("s004"));
  EXPECT_EQ(s004["attempt"], 2);

  // i % 10 == 5 gets a three-sentence rewrite at budget 2.
  const auto budget2 = read_jsonl(out / "budget_2_rejected.jsonl");
  ASSERT_FALSE(budget2.empty());
  EXPECT_EQ(budget2[0]["budget"]["measured"], 3);

  const auto csv = read_text_file(out / "latency.csv");
  EXPECT_NE(csv.find("reasoning,0.051430,170.68"), std::string::npos) << csv;
  EXPECT_NE(csv.find("reasoning-1-sentence,0.025630,34.89"), std::string::npos) << csv;

  const auto summary = read_text_file(out / "summary.txt");
  EXPECT_NE(summary.find("mock-guard"), std::string::npos);
  EXPECT_NE(summary.find("PolicyA"), std::string::npos);

  for (const auto& j : read_jsonl(out / "train_examples.jsonl")) {
    const auto input = j.at("input").get<std::string>();
    EXPECT_TRUE(input.rfind("[reasoning] ", 0) == 0 || input.rfind("[non-reasoning] ", 0) == 0);
  }
}

TEST(Cli, AssembleIsDeterministic) {
  const auto dir = fixtures::scratch_dir("cli_assemble");
  const auto config = fixtures::write_pipeline_workspace(dir, 20);
  for (const char* cmd : {"distill", "filter", "mine"}) ASSERT_EQ(run_cmd(config, cmd), cli::kExitOk);
  ASSERT_EQ(run_cmd(config, "assemble", {"-o", (dir / "a.jsonl").string()}), cli::kExitOk);
  ASSERT_EQ(run_cmd(config, "assemble", {"-o", (dir / "b.jsonl").string()}), cli::kExitOk);
  EXPECT_EQ(read_text_file(dir / "a.jsonl"), read_text_file(dir / "b.jsonl"));
  ASSERT_EQ(run_cmd(config, "assemble", {"-o", (dir / "c.jsonl").string(), "--seed", "99"}), cli::kExitOk);
  EXPECT_NE(read_text_file(dir / "a.jsonl"), read_text_file(dir / "c.jsonl"));
}

TEST(Cli, SubsetLargerThanCorpusIsDomainError) {
  const auto dir = fixtures::scratch_dir("cli_subset");
  const auto config = fixtures::write_pipeline_workspace(dir, 10);
  for (const char* cmd : {"distill", "filter", "mine"}) ASSERT_EQ(run_cmd(config, cmd), cli::kExitOk);
  edit_config(config, [](nlohmann::json& j) { j["assemble"]["spec"]["subset_size"] = 500; });
  EXPECT_EQ(run_cmd(config, "assemble"), cli::kExitDomainError);
}

TEST(Cli, ResumeFillsInMissingSamples) {
  const auto dir = fixtures::scratch_dir("cli_resume");
  const auto config = fixtures::write_pipeline_workspace(dir, 20);
  ASSERT_EQ(run_cmd(config, "distill"), cli::kExitOk);
  const auto pending = dir / "out/distilled.jsonl";
  const auto full = rows_by_id(pending);
  const auto full_rejected = rows_by_id(dir / "out/distilled_rejected.jsonl");

  const auto rows = read_jsonl(pending);
  write_jsonl_atomic(pending, std::vector<nlohmann::json>(rows.begin(), rows.begin() + 5));
  fs::remove(dir / "out/distilled_rejected.jsonl");
  ASSERT_EQ(run_cmd(config, "distill", {"--resume"}), cli::kExitOk);
  EXPECT_EQ(rows_by_id(pending), full);
  EXPECT_EQ(rows_by_id(dir / "out/distilled_rejected.jsonl"), full_rejected);
  EXPECT_EQ(read_json(dir / "out/distilled.jsonl.manifest.json")["details"]["resumed"], true);
}

TEST(Cli, OverridesReachTheManifest) {
  const auto dir = fixtures::scratch_dir("cli_override");
  const auto config = fixtures::write_pipeline_workspace(dir, 5);
  ASSERT_EQ(run_cmd(config, "distill", {"--seed", "7", "--workers", "1", "-o", (dir / "d.jsonl").string()}),
            cli::kExitOk);
  const auto m = read_json(dir / "d.jsonl.manifest.json");
  EXPECT_EQ(m["seed"], 7);
  EXPECT_TRUE(fs::exists(dir / "d_rejected.jsonl"));
}
