#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace guardkit {

struct TaxonomyCategory {
  std::string code;
  std::string title;
  std::optional<std::string> description;
};

/// A named, ordered list of harm categories, optionally preceded by free text.
/// Preamble-only taxonomies are how free-form policies (WildGuard's grouped
/// block, custom-policy suites) are represented.
struct Taxonomy {
  std::string name;
  std::optional<std::string> preamble;
  std::vector<TaxonomyCategory> categories;

  /// Throws ValidationError on duplicate category codes.
  void validate() const;
};

/// Preamble verbatim (if any), then one "code: title[ description]" line per
/// category in declared order. No trailing newline.
std::string render_taxonomy(const Taxonomy& taxonomy);

Taxonomy taxonomy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Taxonomy& taxonomy);
Taxonomy load_taxonomy(const std::filesystem::path& path);

}  // namespace guardkit
