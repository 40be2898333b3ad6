#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace guardkit::text {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;

/// Whitespace-delimited tokens, the toolkit's stand-in for model tokens.
std::vector<std::string_view> split_whitespace(std::string_view s);
std::size_t word_count(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view data) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace guardkit::text
