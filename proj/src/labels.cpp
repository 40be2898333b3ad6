#include "guardkit/labels.hpp"

#include "guardkit/text.hpp"

namespace guardkit {

std::string_view to_string(HarmLabel label) noexcept {
  switch (label) {
    case HarmLabel::Harmful: return "harmful";
    case HarmLabel::Unharmful: return "unharmful";
    case HarmLabel::None: break;
  }
  return "None";
}

std::string_view to_string(RefusalLabel label) noexcept {
  switch (label) {
    case RefusalLabel::Refusal: return "refusal";
    case RefusalLabel::Compliance: return "compliance";
    case RefusalLabel::None: break;
  }
  return "None";
}

std::optional<HarmLabel> parse_harm_label(std::string_view token) noexcept {
  if (text::iequals(token, "harmful")) return HarmLabel::Harmful;
  if (text::iequals(token, "unharmful")) return HarmLabel::Unharmful;
  if (text::iequals(token, "none")) return HarmLabel::None;
  return std::nullopt;
}

std::optional<RefusalLabel> parse_refusal_label(std::string_view token) noexcept {
  if (text::iequals(token, "refusal")) return RefusalLabel::Refusal;
  if (text::iequals(token, "compliance")) return RefusalLabel::Compliance;
  if (text::iequals(token, "none")) return RefusalLabel::None;
  return std::nullopt;
}

}  // namespace guardkit
