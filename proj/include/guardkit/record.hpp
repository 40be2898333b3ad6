#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/judgment.hpp"
#include "guardkit/sample.hpp"

namespace guardkit {

enum class RecordStatus { Pending, Accepted, Rejected };

enum class FindingRule { LabelLeakage, NGramRepetition, Overthinking, JudgeReject };

std::string_view to_string(RecordStatus status) noexcept;
std::string_view to_string(FindingRule rule) noexcept;

struct FilterFinding {
  FindingRule rule;
  std::string detail;
  std::optional<std::pair<std::size_t, std::size_t>> span;  // [start, end) in the trace

  friend bool operator==(const FilterFinding&, const FilterFinding&) = default;
};

// Rejection reasons that do not come from filter findings.
namespace reason {
inline constexpr std::string_view kTeacherDisagrees = "TeacherDisagrees";
inline constexpr std::string_view kUnparseable = "Unparseable";
inline constexpr std::string_view kTransportError = "TransportError";
inline constexpr std::string_view kBudgetViolation = "BudgetViolation";
}  // namespace reason

struct BudgetInfo {
  int n_sentences = 0;
  int measured = 0;

  friend bool operator==(const BudgetInfo&, const BudgetInfo&) = default;
};

/// A sample plus its teacher-generated reasoning trace and filter history.
struct DistilledRecord {
  GuardSample sample;
  std::string trace;
  std::optional<ParsedJudgment> verdict;
  std::string teacher_model;
  int attempt = 1;
  RecordStatus status = RecordStatus::Pending;
  std::vector<std::string> reasons;
  std::vector<FilterFinding> findings;
  std::optional<BudgetInfo> budget;
  std::string raw_output;

  void reject(std::string_view why) {
    status = RecordStatus::Rejected;
    reasons.emplace_back(why);
  }
};

/// Flat JSON: the GuardSample keys plus trace, verdict, teacher_model,
/// attempt, status, reasons, findings, budget and raw_output.
nlohmann::json to_json(const DistilledRecord& record);
DistilledRecord record_from_json(const nlohmann::json& j);

}  // namespace guardkit
