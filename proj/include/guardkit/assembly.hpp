#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/error.hpp"
#include "guardkit/record.hpp"
#include "guardkit/rng.hpp"
#include "guardkit/sample.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"

namespace guardkit {

enum class TrainingMode { Reasoning, NonReasoning };

std::string_view to_string(TrainingMode mode) noexcept;
TrainingMode training_mode_from_string(std::string_view s);

struct TrainingExample {
  TrainingMode mode = TrainingMode::Reasoning;
  std::string input;
  std::string target;
  std::string origin_id;
  std::string origin_source;
  bool oversampled = false;

  friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

nlohmann::json to_json(const TrainingExample& example);
TrainingExample training_example_from_json(const nlohmann::json& j);

struct AssemblySpec {
  std::optional<std::size_t> subset_size;
  std::uint64_t seed = 0;
  bool dual_mode = false;
  double reasoning_fraction = 0.5;
  std::string reasoning_token = "[reasoning]";
  std::string non_reasoning_token = "[non-reasoning]";
  TrainingMode target_mode = TrainingMode::Reasoning;  // used when !dual_mode
  std::vector<std::string> merge_sources;
  int difficult_multiplier = 1;
  std::optional<int> epochs;  // recorded for the trainer, not acted on

  void validate() const;
};

AssemblySpec assembly_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssemblySpec& spec);

/// Uniform k-subset without replacement, returned in input order.
template <typename T>
std::vector<T> sample_subset(const std::vector<T>& items, std::size_t k, std::uint64_t seed) {
  if (k > items.size()) {
    throw ValidationError("subset size " + std::to_string(k) + " exceeds corpus size " +
                          std::to_string(items.size()));
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SeededRng rng(seed);
  rng.shuffle(order);
  order.resize(k);
  std::sort(order.begin(), order.end());
  std::vector<T> out;
  out.reserve(k);
  for (auto i : order) out.push_back(items[i]);
  return out;
}

/// "<think>" + trace + "</think>\n" + answer block, or the answer block alone.
std::string training_target(const DistilledRecord& record, TrainingMode mode,
                            const ReasoningDelimiters& delimiters = {});

/// Which records train in reasoning mode: floor(fraction * n) indices chosen by
/// a seeded shuffle.
std::vector<TrainingMode> dual_mode_partition(std::size_t n, double fraction, std::uint64_t seed);

/// Inputs are inference prompts (no gold labels). Output order follows input.
std::vector<TrainingExample> assemble(const std::vector<DistilledRecord>& records, const Taxonomy& taxonomy,
                                      const PromptTemplate& inference, const AssemblySpec& spec,
                                      const ReasoningDelimiters& delimiters = {});

/// Concatenate and shuffle. Ids seen in both inputs are kept and logged.
std::vector<TrainingExample> merge_topic_following(const std::vector<TrainingExample>& safety,
                                                   const std::vector<TrainingExample>& topic_following,
                                                   std::uint64_t seed);

/// base followed by `multiplier` flagged copies of every base example whose
/// origin id is listed.
std::vector<TrainingExample> augment_with_difficult(const std::vector<TrainingExample>& base,
                                                    const std::set<std::string>& difficult_ids, int multiplier);

/// Topic-following dialogue: a system instruction listing allowed and
/// disallowed topics plus turns; user turns carry "on-topic" / "off-topic".
struct DialogueTurn {
  std::string role;  // "user" or "assistant"
  std::string content;
  std::optional<std::string> label;
};

struct TopicDialogue {
  std::string id;
  std::string instruction;
  std::vector<DialogueTurn> turns;
};

TopicDialogue topic_dialogue_from_json(const nlohmann::json& j);

/// One GuardSample per labeled user turn. The dialogue so far becomes the
/// prompt, the instruction becomes the sample's policy, and off-topic maps to
/// harmful.
std::vector<GuardSample> topic_dialogue_to_samples(const TopicDialogue& dialogue,
                                                   const std::string& source = "topic_following");

/// seed, sizes, mode and source histograms.
nlohmann::json assembly_manifest(const std::vector<TrainingExample>& examples, const AssemblySpec& spec);

}  // namespace guardkit
