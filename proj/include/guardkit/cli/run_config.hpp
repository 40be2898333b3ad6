#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/assembly.hpp"
#include "guardkit/budget.hpp"
#include "guardkit/eval.hpp"
#include "guardkit/llm_client.hpp"
#include "guardkit/quality_filter.hpp"
#include "guardkit/taxonomy.hpp"
#include "guardkit/templates.hpp"

namespace guardkit::cli {

/// The JSON run configuration. Relative paths resolve against the config
/// file's directory; flags are applied as overrides before validation.
class RunConfig {
 public:
  static RunConfig load(const std::filesystem::path& path, const nlohmann::json& overrides = nlohmann::json::object());
  static RunConfig from_json(nlohmann::json raw, std::filesystem::path base_dir);

  const nlohmann::json& raw() const noexcept { return raw_; }
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

  /// FNV-1a of the canonical (sorted-key) dump of the effective config.
  std::string hash() const;

  std::uint64_t seed() const;
  std::size_t workers() const;
  std::string log_level() const;

  std::filesystem::path resolve(const std::string& path) const;

  /// Section `name` or an empty object.
  const nlohmann::json& section(const std::string& name) const;
  bool has_section(const std::string& name) const;

  /// Required string path in a section, resolved.
  std::filesystem::path path_in(const std::string& section_name, const std::string& key) const;
  std::optional<std::filesystem::path> optional_path_in(const std::string& section_name, const std::string& key) const;

  std::filesystem::path templates_dir() const;
  PromptTemplate load_template(TemplateKind kind) const;
  /// paths.taxonomy, falling back to the bundled Aegis 2.0 taxonomy.
  Taxonomy taxonomy() const;
  Taxonomy taxonomy_at(const std::string& path) const;

  bool has_endpoint(const std::string& name) const;
  /// endpoints.<name>, with mock script paths resolved.
  llm::EndpointConfig endpoint(const std::string& name) const;
  llm::EndpointConfig endpoint_from(const nlohmann::json& j) const;
  llm::SamplingParams sampling(const std::string& section_name) const;

  FilterConfig filter_config() const;
  AssemblySpec assembly_spec() const;
  EvalLayout eval_layout() const;
  ReasoningDelimiters delimiters() const;

  /// Checks every section and asset path; the first problem throws ConfigError.
  void validate() const;

 private:
  nlohmann::json raw_;
  std::filesystem::path base_dir_;
};

/// Sets a dotted key ("distill.input") in a JSON object, creating parents.
void set_dotted(nlohmann::json& target, const std::string& dotted_key, nlohmann::json value);

}  // namespace guardkit::cli
