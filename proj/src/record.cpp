#include "guardkit/record.hpp"

#include "guardkit/error.hpp"

namespace guardkit {

std::string_view to_string(RecordStatus status) noexcept {
  switch (status) {
    case RecordStatus::Pending: return "pending";
    case RecordStatus::Accepted: return "accepted";
    case RecordStatus::Rejected: break;
  }
  return "rejected";
}

std::string_view to_string(FindingRule rule) noexcept {
  switch (rule) {
    case FindingRule::LabelLeakage: return "LabelLeakage";
    case FindingRule::NGramRepetition: return "NGramRepetition";
    case FindingRule::Overthinking: return "Overthinking";
    case FindingRule::JudgeReject: break;
  }
  return "JudgeReject";
}

namespace {

RecordStatus status_from_string(const std::string& s) {
  if (s == "pending") return RecordStatus::Pending;
  if (s == "accepted") return RecordStatus::Accepted;
  if (s == "rejected") return RecordStatus::Rejected;
  throw ValidationError("unknown record status '" + s + "'");
}

FindingRule rule_from_string(const std::string& s) {
  for (auto r : {FindingRule::LabelLeakage, FindingRule::NGramRepetition, FindingRule::Overthinking,
                 FindingRule::JudgeReject}) {
    if (to_string(r) == s) return r;
  }
  throw ValidationError("unknown filter rule '" + s + "'");
}

nlohmann::json label_json(std::string_view token) {
  return token == "None" ? nlohmann::json(nullptr) : nlohmann::json(token);
}

}  // namespace

nlohmann::json to_json(const DistilledRecord& r) {
  nlohmann::json j = to_json(r.sample);
  j["trace"] = r.trace;
  if (r.verdict) {
    j["verdict"] = {{"prompt_harm", label_json(to_string(r.verdict->prompt_harm))},
                    {"response_harm", label_json(to_string(r.verdict->response_harm))},
                    {"response_refusal", label_json(to_string(r.verdict->response_refusal))}};
  } else {
    j["verdict"] = nullptr;
  }
  j["teacher_model"] = r.teacher_model;
  j["attempt"] = r.attempt;
  j["status"] = to_string(r.status);
  j["reasons"] = r.reasons;
  j["findings"] = nlohmann::json::array();
  for (const auto& f : r.findings) {
    nlohmann::json fj{{"rule", to_string(f.rule)}, {"detail", f.detail}};
    fj["span"] = f.span ? nlohmann::json::array({f.span->first, f.span->second}) : nlohmann::json(nullptr);
    j["findings"].push_back(std::move(fj));
  }
  if (r.budget) j["budget"] = {{"n_sentences", r.budget->n_sentences}, {"measured", r.budget->measured}};
  j["raw_output"] = r.raw_output;
  return j;
}

DistilledRecord record_from_json(const nlohmann::json& j) {
  DistilledRecord r;
  r.sample = sample_from_json(j);
  try {
    r.trace = j.value("trace", std::string{});
    if (auto it = j.find("verdict"); it != j.end() && it->is_object()) {
      ParsedJudgment v;
      auto harm = [&](const char* key) {
        const auto& x = it->at(key);
        return x.is_null() ? HarmLabel::None : parse_harm_label(x.get<std::string>()).value_or(HarmLabel::None);
      };
      v.prompt_harm = harm("prompt_harm");
      v.response_harm = harm("response_harm");
      const auto& rr = it->at("response_refusal");
      v.response_refusal =
          rr.is_null() ? RefusalLabel::None : parse_refusal_label(rr.get<std::string>()).value_or(RefusalLabel::None);
      if (!r.trace.empty()) v.trace = r.trace;
      v.raw = j.value("raw_output", std::string{});
      r.verdict = std::move(v);
    }
    r.teacher_model = j.value("teacher_model", std::string{});
    r.attempt = j.value("attempt", 1);
    r.status = status_from_string(j.value("status", std::string("pending")));
    r.reasons = j.value("reasons", std::vector<std::string>{});
    for (const auto& fj : j.value("findings", nlohmann::json::array())) {
      FilterFinding f{rule_from_string(fj.at("rule").get<std::string>()), fj.value("detail", std::string{}),
                      std::nullopt};
      if (auto sp = fj.find("span"); sp != fj.end() && sp->is_array()) {
        f.span = std::pair{sp->at(0).get<std::size_t>(), sp->at(1).get<std::size_t>()};
      }
      r.findings.push_back(std::move(f));
    }
    if (auto it = j.find("budget"); it != j.end() && it->is_object()) {
      r.budget = BudgetInfo{it->at("n_sentences").get<int>(), it->at("measured").get<int>()};
    }
    r.raw_output = j.value("raw_output", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed distilled record " + r.sample.id + ": " + e.what());
  }
  return r;
}

}  // namespace guardkit
