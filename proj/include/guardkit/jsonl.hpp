#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace guardkit {

/// Reads one JSON object per non-blank line. Errors name the file and line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

template <typename T, typename FromJson>
std::vector<T> read_jsonl_as(const std::filesystem::path& path, FromJson&& convert) {
  std::vector<T> out;
  for (const auto& j : read_jsonl(path)) out.push_back(convert(j));
  return out;
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

void write_jsonl_atomic(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace guardkit
