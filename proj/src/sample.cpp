#include "guardkit/sample.hpp"

#include "guardkit/error.hpp"

namespace guardkit {

void GuardSample::validate() const {
  if (id.empty()) throw ValidationError("sample has an empty id");
  if (prompt.empty()) throw ValidationError("sample " + id + ": prompt is empty");
  if (gold_prompt_harm == HarmLabel::None) {
    throw ValidationError("sample " + id + ": prompt harm label cannot be None");
  }
  if (!has_response()) {
    if (gold_response_harm != HarmLabel::None) {
      throw ValidationError("sample " + id + ": response harm label given without a response");
    }
    if (gold_response_refusal && *gold_response_refusal != RefusalLabel::None) {
      throw ValidationError("sample " + id + ": refusal label given without a response");
    }
  } else if (gold_response_refusal == RefusalLabel::None) {
    throw ValidationError("sample " + id + ": refusal label None requires an absent response");
  }
}

nlohmann::json to_json(const GuardSample& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["prompt"] = s.prompt;
  j["response"] = s.response ? nlohmann::json(*s.response) : nlohmann::json(nullptr);
  j["prompt_harm"] = to_string(s.gold_prompt_harm);
  j["response_harm"] = s.gold_response_harm == HarmLabel::None
                           ? nlohmann::json(nullptr)
                           : nlohmann::json(to_string(s.gold_response_harm));
  j["response_refusal"] = (!s.gold_response_refusal || *s.gold_response_refusal == RefusalLabel::None)
                              ? nlohmann::json(nullptr)
                              : nlohmann::json(to_string(*s.gold_response_refusal));
  j["source"] = s.source;
  if (s.policy) j["policy"] = *s.policy;
  return j;
}

namespace {

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

GuardSample sample_from_json(const nlohmann::json& j) {
  GuardSample s;
  try {
    s.id = j.at("id").get<std::string>();
    s.prompt = j.at("prompt").get<std::string>();
    s.response = optional_string(j, "response");
    s.source = j.value("source", std::string{});
    s.policy = optional_string(j, "policy");

    const auto prompt_harm = j.at("prompt_harm").get<std::string>();
    auto ph = parse_harm_label(prompt_harm);
    if (!ph) throw ValidationError("sample " + s.id + ": bad prompt_harm '" + prompt_harm + "'");
    s.gold_prompt_harm = *ph;

    if (auto rh = optional_string(j, "response_harm")) {
      auto parsed = parse_harm_label(*rh);
      if (!parsed) throw ValidationError("sample " + s.id + ": bad response_harm '" + *rh + "'");
      s.gold_response_harm = *parsed;
    }
    if (auto rr = optional_string(j, "response_refusal")) {
      auto parsed = parse_refusal_label(*rr);
      if (!parsed) throw ValidationError("sample " + s.id + ": bad response_refusal '" + *rr + "'");
      s.gold_response_refusal = *parsed;
    } else if (!s.has_response()) {
      s.gold_response_refusal = RefusalLabel::None;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed sample record: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace guardkit
