#include "guardkit/assembly.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "guardkit/judgment.hpp"
#include "guardkit/text.hpp"

namespace guardkit {

std::string_view to_string(TrainingMode mode) noexcept {
  return mode == TrainingMode::Reasoning ? "reasoning" : "non_reasoning";
}

TrainingMode training_mode_from_string(std::string_view s) {
  if (text::iequals(s, "reasoning")) return TrainingMode::Reasoning;
  if (text::iequals(s, "non_reasoning") || text::iequals(s, "non-reasoning")) return TrainingMode::NonReasoning;
  throw ValidationError("unknown training mode '" + std::string(s) + "'");
}

nlohmann::json to_json(const TrainingExample& e) {
  nlohmann::json j{{"input", e.input},
                   {"target", e.target},
                   {"mode", to_string(e.mode)},
                   {"origin_id", e.origin_id},
                   {"origin_source", e.origin_source}};
  if (e.oversampled) j["oversampled"] = true;
  return j;
}

TrainingExample training_example_from_json(const nlohmann::json& j) {
  try {
    TrainingExample e;
    e.input = j.at("input").get<std::string>();
    e.target = j.at("target").get<std::string>();
    e.mode = training_mode_from_string(j.at("mode").get<std::string>());
    e.origin_id = j.at("origin_id").get<std::string>();
    e.origin_source = j.value("origin_source", std::string());
    e.oversampled = j.value("oversampled", false);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("bad training example: ") + ex.what());
  }
}

void AssemblySpec::validate() const {
  if (dual_mode && !(reasoning_fraction > 0.0 && reasoning_fraction < 1.0)) {
    throw ConfigError("reasoning_fraction must be in (0, 1) in dual mode");
  }
  if (difficult_multiplier < 1) throw ConfigError("difficult_multiplier must be >= 1");
  if (dual_mode && reasoning_token == non_reasoning_token) throw ConfigError("mode tokens must differ");
  if (epochs && *epochs < 1) throw ConfigError("epochs must be positive");
}

AssemblySpec assembly_spec_from_json(const nlohmann::json& j) {
  AssemblySpec s;
  try {
    if (j.contains("subset_size") && !j.at("subset_size").is_null()) {
      s.subset_size = j.at("subset_size").get<std::size_t>();
    }
    s.seed = j.value("seed", s.seed);
    s.dual_mode = j.value("dual_mode", s.dual_mode);
    s.reasoning_fraction = j.value("reasoning_fraction", s.reasoning_fraction);
    if (j.contains("mode_tokens")) {
      const auto& t = j.at("mode_tokens");
      s.reasoning_token = t.at(0).get<std::string>();
      s.non_reasoning_token = t.at(1).get<std::string>();
    }
    if (j.contains("target_mode")) s.target_mode = training_mode_from_string(j.at("target_mode").get<std::string>());
    s.merge_sources = j.value("merge_sources", s.merge_sources);
    s.difficult_multiplier = j.value("difficult_multiplier", s.difficult_multiplier);
    if (j.contains("epochs") && !j.at("epochs").is_null()) s.epochs = j.at("epochs").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad assembly spec: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  s.validate();
  return s;
}

nlohmann::json to_json(const AssemblySpec& s) {
  return {{"subset_size", s.subset_size ? nlohmann::json(*s.subset_size) : nlohmann::json()},
          {"seed", s.seed},
          {"dual_mode", s.dual_mode},
          {"reasoning_fraction", s.reasoning_fraction},
          {"mode_tokens", {s.reasoning_token, s.non_reasoning_token}},
          {"target_mode", to_string(s.target_mode)},
          {"merge_sources", s.merge_sources},
          {"difficult_multiplier", s.difficult_multiplier},
          {"epochs", s.epochs ? nlohmann::json(*s.epochs) : nlohmann::json()}};
}

std::string training_target(const DistilledRecord& record, TrainingMode mode, const ReasoningDelimiters& delimiters) {
  const auto& s = record.sample;
  std::string answer = format_answer_block(s.gold_prompt_harm, s.gold_response_harm, s.gold_response_refusal);
  if (mode == TrainingMode::NonReasoning) return answer;
  return delimiters.open + record.trace + delimiters.close + "\n" + answer;
}

std::vector<TrainingMode> dual_mode_partition(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SeededRng rng(seed);
  rng.shuffle(order);
  const auto reasoning = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<TrainingMode> modes(n, TrainingMode::NonReasoning);
  for (std::size_t i = 0; i < reasoning; ++i) modes[order[i]] = TrainingMode::Reasoning;
  return modes;
}

std::vector<TrainingExample> assemble(const std::vector<DistilledRecord>& records, const Taxonomy& taxonomy,
                                      const PromptTemplate& inference, const AssemblySpec& spec,
                                      const ReasoningDelimiters& delimiters) {
  spec.validate();
  std::vector<TrainingMode> modes =
      spec.dual_mode ? dual_mode_partition(records.size(), spec.reasoning_fraction, spec.seed)
                     : std::vector<TrainingMode>(records.size(), spec.target_mode);
  std::vector<TrainingExample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::string_view token;
    if (spec.dual_mode) token = modes[i] == TrainingMode::Reasoning ? spec.reasoning_token : spec.non_reasoning_token;
    if (modes[i] == TrainingMode::Reasoning && r.trace.empty()) {
      throw ValidationError("record " + r.sample.id + " has no trace for reasoning mode");
    }
    TrainingExample e;
    e.mode = modes[i];
    e.input = build_inference_prompt(r.sample, taxonomy, inference, token);
    e.target = training_target(r, modes[i], delimiters);
    e.origin_id = r.sample.id;
    e.origin_source = r.sample.source;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TrainingExample> merge_topic_following(const std::vector<TrainingExample>& safety,
                                                   const std::vector<TrainingExample>& topic_following,
                                                   std::uint64_t seed) {
  std::unordered_set<std::string> safety_ids;
  for (const auto& e : safety) safety_ids.insert(e.origin_id);
  std::size_t duplicates = 0;
  for (const auto& e : topic_following) {
    if (safety_ids.count(e.origin_id)) {
      ++duplicates;
      spdlog::warn("origin id '{}' appears in both safety and topic-following data; keeping both", e.origin_id);
    }
  }
  if (duplicates > 0) spdlog::warn("{} duplicate origin ids across merged sources", duplicates);
  std::vector<TrainingExample> out = safety;
  out.insert(out.end(), topic_following.begin(), topic_following.end());
  SeededRng rng(seed);
  rng.shuffle(out);
  return out;
}

std::vector<TrainingExample> augment_with_difficult(const std::vector<TrainingExample>& base,
                                                    const std::set<std::string>& difficult_ids, int multiplier) {
  if (multiplier < 1) throw ValidationError("difficult multiplier must be >= 1, got " + std::to_string(multiplier));
  std::set<std::string> missing = difficult_ids;
  for (const auto& e : base) missing.erase(e.origin_id);
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw ValidationError("difficult ids not found in base set: " + list);
  }
  std::vector<TrainingExample> out = base;
  for (const auto& e : base) {
    if (!difficult_ids.count(e.origin_id)) continue;
    for (int k = 0; k < multiplier; ++k) {
      out.push_back(e);
      out.back().oversampled = true;
    }
  }
  return out;
}

TopicDialogue topic_dialogue_from_json(const nlohmann::json& j) {
  try {
    TopicDialogue d;
    d.id = j.at("id").get<std::string>();
    d.instruction = j.at("instruction").get<std::string>();
    for (const auto& t : j.at("turns")) {
      DialogueTurn turn;
      turn.role = t.at("role").get<std::string>();
      turn.content = t.at("content").get<std::string>();
      if (t.contains("label") && !t.at("label").is_null()) turn.label = t.at("label").get<std::string>();
      if (turn.role != "user" && turn.role != "assistant") {
        throw ValidationError("dialogue " + d.id + ": unknown role '" + turn.role + "'");
      }
      d.turns.push_back(std::move(turn));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad topic dialogue: ") + e.what());
  }
}

std::vector<GuardSample> topic_dialogue_to_samples(const TopicDialogue& dialogue, const std::string& source) {
  std::vector<GuardSample> out;
  std::string context;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const auto& turn = dialogue.turns[i];
    const std::string line = (turn.role == "user" ? "User: " : "Assistant: ") + turn.content;
    if (turn.role == "user" && turn.label) {
      HarmLabel harm;
      if (text::iequals(*turn.label, "off-topic")) {
        harm = HarmLabel::Harmful;
      } else if (text::iequals(*turn.label, "on-topic")) {
        harm = HarmLabel::Unharmful;
      } else {
        throw ValidationError("dialogue " + dialogue.id + ": unknown turn label '" + *turn.label + "'");
      }
      GuardSample s;
      s.id = dialogue.id + "#" + std::to_string(i);
      s.prompt = context.empty() ? turn.content : context + "\n" + line;
      s.gold_prompt_harm = harm;
      s.gold_response_harm = HarmLabel::None;
      s.gold_response_refusal = RefusalLabel::None;
      s.source = source;
      s.policy = dialogue.instruction;
      s.validate();
      out.push_back(std::move(s));
    }
    context += (context.empty() ? "" : "\n") + line;
  }
  return out;
}

nlohmann::json assembly_manifest(const std::vector<TrainingExample>& examples, const AssemblySpec& spec) {
  std::map<std::string, std::size_t> modes;
  std::map<std::string, std::size_t> sources;
  std::size_t oversampled = 0;
  for (const auto& e : examples) {
    ++modes[std::string(to_string(e.mode))];
    ++sources[e.origin_source];
    if (e.oversampled) ++oversampled;
  }
  return {{"seed", spec.seed},
          {"examples", examples.size()},
          {"oversampled", oversampled},
          {"mode_histogram", modes},
          {"source_histogram", sources},
          {"spec", to_json(spec)}};
}

}  // namespace guardkit
