#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace guardkit {

enum class HarmLabel { Harmful, Unharmful, None };
enum class RefusalLabel { Refusal, Compliance, None };

// Lowercase wire tokens: "harmful", "unharmful", "refusal", "compliance".
// None renders as "None", the literal the prompt templates ask for.
std::string_view to_string(HarmLabel label) noexcept;
std::string_view to_string(RefusalLabel label) noexcept;

// Case-insensitive; accepts "none" for the None variants.
std::optional<HarmLabel> parse_harm_label(std::string_view token) noexcept;
std::optional<RefusalLabel> parse_refusal_label(std::string_view token) noexcept;

}  // namespace guardkit
