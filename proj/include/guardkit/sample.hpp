#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "guardkit/labels.hpp"

namespace guardkit {

/// One labeled interaction from a safety dataset.
///
/// gold_response_refusal is nullopt when the dataset carries no refusal
/// annotation (e.g. Aegis); RefusalLabel::None means the response is absent.
/// `policy`, when set, replaces the taxonomy block for this sample only; it is
/// how topic-following dialogues carry their own allowed/disallowed topics.
struct GuardSample {
  std::string id;
  std::string prompt;
  std::optional<std::string> response;
  HarmLabel gold_prompt_harm = HarmLabel::Unharmful;
  HarmLabel gold_response_harm = HarmLabel::None;
  std::optional<RefusalLabel> gold_response_refusal;
  std::string source;
  std::optional<std::string> policy;

  bool has_response() const noexcept { return response.has_value() && !response->empty(); }

  /// Throws ValidationError if an invariant is broken.
  void validate() const;

  friend bool operator==(const GuardSample&, const GuardSample&) = default;
};

// Canonical JSONL record: id, prompt, response (null allowed), prompt_harm,
// response_harm (null allowed), response_refusal (null allowed), source,
// plus optional policy.
nlohmann::json to_json(const GuardSample& sample);
GuardSample sample_from_json(const nlohmann::json& j);

}  // namespace guardkit
