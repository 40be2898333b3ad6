#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "guardkit/sample.hpp"
#include "guardkit/taxonomy.hpp"

namespace guardkit {

enum class TemplateKind { DistillAegis, DistillWildguard, DistillGeneric, Inference, ShortenBudget, Judge };

std::string_view to_string(TemplateKind kind) noexcept;
std::optional<TemplateKind> template_kind_from_string(std::string_view name) noexcept;
bool is_distill_kind(TemplateKind kind) noexcept;

/// Slots every template of this kind must reference.
std::span<const std::string_view> required_slots(TemplateKind kind) noexcept;

using SlotBindings = std::map<std::string, std::string, std::less<>>;

/// Prompt text with named {slot} markers. Only the known slot names are
/// treated as markers; other braces are literal text.
class PromptTemplate {
 public:
  /// Throws ConfigError if a required slot for `kind` is missing from body.
  PromptTemplate(TemplateKind kind, std::string body);

  TemplateKind kind() const noexcept { return kind_; }
  const std::string& body() const noexcept { return body_; }
  bool references(std::string_view slot) const;

  /// Single pass over the body; bound values are never re-scanned.
  /// Throws UnboundSlot for a referenced slot with no binding.
  std::string render(const SlotBindings& bindings) const;

 private:
  TemplateKind kind_;
  std::string body_;
};

std::filesystem::path default_asset_dir();

/// Asset file name for a kind, e.g. "distill_wildguard.txt".
std::string template_file_name(TemplateKind kind);

PromptTemplate load_template(TemplateKind kind, const std::filesystem::path& path);
PromptTemplate load_builtin_template(TemplateKind kind,
                                     const std::filesystem::path& templates_dir = default_asset_dir() / "templates");

/// Inference prompt with no gold labels. A per-sample policy overrides the
/// taxonomy. A non-empty mode token is prefixed followed by one space.
std::string build_inference_prompt(const GuardSample& sample, const Taxonomy& taxonomy,
                                   const PromptTemplate& inference, std::string_view mode_token = {});

}  // namespace guardkit
