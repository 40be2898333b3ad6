#include "guardkit/templates.hpp"

#include <algorithm>
#include <array>

#include "guardkit/error.hpp"
#include "guardkit/jsonl.hpp"

namespace guardkit {

namespace {

constexpr std::array<std::string_view, 8> kKnownSlots{
    "taxonomy",          "prompt",  "response",       "prompt_harm_label", "response_harm_label",
    "response_refusal_label", "n_sentences", "trace"};

constexpr std::array<std::string_view, 4> kAegisSlots{"prompt", "response", "prompt_harm_label",
                                                      "response_harm_label"};
constexpr std::array<std::string_view, 5> kWildguardSlots{"prompt", "response", "prompt_harm_label",
                                                          "response_harm_label", "response_refusal_label"};
constexpr std::array<std::string_view, 6> kGenericSlots{"taxonomy",          "prompt",
                                                        "response",          "prompt_harm_label",
                                                        "response_harm_label", "response_refusal_label"};
constexpr std::array<std::string_view, 3> kInferenceSlots{"taxonomy", "prompt", "response"};
constexpr std::array<std::string_view, 2> kShortenSlots{"trace", "n_sentences"};
constexpr std::array<std::string_view, 1> kJudgeSlots{"trace"};

bool is_known_slot(std::string_view name) {
  return std::find(kKnownSlots.begin(), kKnownSlots.end(), name) != kKnownSlots.end();
}

// Calls on_slot(name) for each known {slot} marker, on_text for everything else.
template <typename OnText, typename OnSlot>
void scan(std::string_view body, OnText&& on_text, OnSlot&& on_slot) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = body.find('}', open + 1);
    if (close == std::string_view::npos) break;
    const auto name = body.substr(open + 1, close - open - 1);
    if (is_known_slot(name)) {
      on_text(body.substr(pos, open - pos));
      on_slot(name);
      pos = close + 1;
    } else {
      on_text(body.substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  on_text(body.substr(pos));
}

}  // namespace

std::string_view to_string(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::DistillAegis: return "distill_aegis";
    case TemplateKind::DistillWildguard: return "distill_wildguard";
    case TemplateKind::DistillGeneric: return "distill_generic";
    case TemplateKind::Inference: return "inference";
    case TemplateKind::ShortenBudget: return "shorten_budget";
    case TemplateKind::Judge: break;
  }
  return "judge";
}

std::optional<TemplateKind> template_kind_from_string(std::string_view name) noexcept {
  for (auto k : {TemplateKind::DistillAegis, TemplateKind::DistillWildguard, TemplateKind::DistillGeneric,
                 TemplateKind::Inference, TemplateKind::ShortenBudget, TemplateKind::Judge}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_distill_kind(TemplateKind kind) noexcept {
  return kind == TemplateKind::DistillAegis || kind == TemplateKind::DistillWildguard ||
         kind == TemplateKind::DistillGeneric;
}

std::span<const std::string_view> required_slots(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::DistillAegis: return kAegisSlots;
    case TemplateKind::DistillWildguard: return kWildguardSlots;
    case TemplateKind::DistillGeneric: return kGenericSlots;
    case TemplateKind::Inference: return kInferenceSlots;
    case TemplateKind::ShortenBudget: return kShortenSlots;
    case TemplateKind::Judge: break;
  }
  return kJudgeSlots;
}

PromptTemplate::PromptTemplate(TemplateKind kind, std::string body) : kind_(kind), body_(std::move(body)) {
  for (auto slot : required_slots(kind_)) {
    if (!references(slot)) {
      throw ConfigError(std::string(to_string(kind_)) + " template lacks slot {" + std::string(slot) + "}");
    }
  }
}

bool PromptTemplate::references(std::string_view slot) const {
  bool found = false;
  scan(body_, [](std::string_view) {}, [&](std::string_view name) { found = found || name == slot; });
  return found;
}

std::string PromptTemplate::render(const SlotBindings& bindings) const {
  std::string out;
  out.reserve(body_.size() * 2);
  scan(
      body_, [&](std::string_view t) { out.append(t); },
      [&](std::string_view name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw UnboundSlot(std::string(name));
        out.append(it->second);
      });
  return out;
}

std::filesystem::path default_asset_dir() { return GUARDKIT_ASSET_DIR; }

std::string template_file_name(TemplateKind kind) { return std::string(to_string(kind)) + ".txt"; }

PromptTemplate load_template(TemplateKind kind, const std::filesystem::path& path) {
  return PromptTemplate(kind, read_text_file(path));
}

PromptTemplate load_builtin_template(TemplateKind kind, const std::filesystem::path& templates_dir) {
  return load_template(kind, templates_dir / template_file_name(kind));
}

std::string build_inference_prompt(const GuardSample& sample, const Taxonomy& taxonomy,
                                   const PromptTemplate& inference, std::string_view mode_token) {
  const SlotBindings bindings{
      {"taxonomy", sample.policy ? *sample.policy : render_taxonomy(taxonomy)},
      {"prompt", sample.prompt},
      {"response", sample.has_response() ? *sample.response : std::string("None")},
  };
  std::string body = inference.render(bindings);
  if (mode_token.empty()) return body;
  std::string out(mode_token);
  out += ' ';
  out += body;
  return out;
}

}  // namespace guardkit
