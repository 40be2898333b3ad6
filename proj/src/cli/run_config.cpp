#include "guardkit/cli/run_config.hpp"

#include <algorithm>
#include <array>

#include "guardkit/error.hpp"
#include "guardkit/jsonl.hpp"
#include "guardkit/text.hpp"

namespace guardkit::cli {

namespace fs = std::filesystem;

namespace {

void merge_into(nlohmann::json& target, const nlohmann::json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && target.contains(it.key()) && target[it.key()].is_object()) {
      merge_into(target[it.key()], it.value());
    } else {
      target[it.key()] = it.value();
    }
  }
}

void require_exists(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw ConfigError(what + " not found: " + p.string());
}

const nlohmann::json kEmpty = nlohmann::json::object();

}  // namespace

void set_dotted(nlohmann::json& target, const std::string& dotted_key, nlohmann::json value) {
  nlohmann::json* node = &target;
  std::string_view rest = dotted_key;
  for (auto dot = rest.find('.'); dot != std::string_view::npos; dot = rest.find('.')) {
    const std::string key(rest.substr(0, dot));
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = nlohmann::json::object();
    node = &(*node)[key];
    rest.remove_prefix(dot + 1);
  }
  (*node)[std::string(rest)] = std::move(value);
}

RunConfig RunConfig::load(const fs::path& path, const nlohmann::json& overrides) {
  nlohmann::json raw;
  try {
    raw = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!raw.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");
  merge_into(raw, overrides);
  return from_json(std::move(raw), fs::absolute(path).parent_path());
}

RunConfig RunConfig::from_json(nlohmann::json raw, fs::path base_dir) {
  RunConfig c;
  c.raw_ = std::move(raw);
  c.base_dir_ = std::move(base_dir);
  c.validate();
  return c;
}

std::string RunConfig::hash() const { return text::hex64(text::fnv1a64(raw_.dump())); }

std::uint64_t RunConfig::seed() const { return raw_.value("seed", std::uint64_t{0}); }

std::size_t RunConfig::workers() const { return raw_.value("workers", std::size_t{1}); }

std::string RunConfig::log_level() const { return raw_.value("log_level", std::string("info")); }

fs::path RunConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir_ / p;
}

const nlohmann::json& RunConfig::section(const std::string& name) const {
  const auto it = raw_.find(name);
  return it == raw_.end() ? kEmpty : *it;
}

bool RunConfig::has_section(const std::string& name) const { return raw_.contains(name); }

fs::path RunConfig::path_in(const std::string& section_name, const std::string& key) const {
  auto p = optional_path_in(section_name, key);
  if (!p) throw ConfigError("missing " + section_name + "." + key);
  return *p;
}

std::optional<fs::path> RunConfig::optional_path_in(const std::string& section_name, const std::string& key) const {
  const auto& s = section(section_name);
  const auto it = s.find(key);
  if (it == s.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(section_name + "." + key + " must be a path string");
  return resolve(it->get<std::string>());
}

fs::path RunConfig::templates_dir() const {
  if (auto p = optional_path_in("paths", "templates_dir")) return *p;
  return default_asset_dir() / "templates";
}

PromptTemplate RunConfig::load_template(TemplateKind kind) const {
  return load_builtin_template(kind, templates_dir());
}

Taxonomy RunConfig::taxonomy() const {
  if (auto p = optional_path_in("paths", "taxonomy")) return load_taxonomy(*p);
  return load_taxonomy(default_asset_dir() / "taxonomies" / "aegis2.json");
}

Taxonomy RunConfig::taxonomy_at(const std::string& path) const { return load_taxonomy(resolve(path)); }

bool RunConfig::has_endpoint(const std::string& name) const { return section("endpoints").contains(name); }

llm::EndpointConfig RunConfig::endpoint_from(const nlohmann::json& j) const {
  auto e = llm::endpoint_from_json(j);
  if (e.base_url.rfind("mock:", 0) == 0) e.base_url = "mock:" + resolve(e.base_url.substr(5)).string();
  return e;
}

llm::EndpointConfig RunConfig::endpoint(const std::string& name) const {
  const auto& eps = section("endpoints");
  const auto it = eps.find(name);
  if (it == eps.end()) throw ConfigError("endpoint '" + name + "' is not configured");
  return endpoint_from(*it);
}

llm::SamplingParams RunConfig::sampling(const std::string& section_name) const {
  nlohmann::json merged = raw_.value("sampling", nlohmann::json::object());
  const auto& s = section(section_name);
  if (s.contains("sampling")) merge_into(merged, s.at("sampling"));
  return llm::sampling_from_json(merged);
}

FilterConfig RunConfig::filter_config() const {
  return filter_config_from_json(section("filter").value("config", nlohmann::json::object()));
}

AssemblySpec RunConfig::assembly_spec() const {
  nlohmann::json spec = section("assemble").value("spec", nlohmann::json::object());
  if (!spec.contains("seed")) spec["seed"] = seed();
  return assembly_spec_from_json(spec);
}

EvalLayout RunConfig::eval_layout() const {
  return eval_layout_from_json(section("report").value("layout", nlohmann::json::object()));
}

ReasoningDelimiters RunConfig::delimiters() const {
  ReasoningDelimiters d;
  if (raw_.contains("delimiters")) {
    const auto& j = raw_.at("delimiters");
    d.open = j.value("open", d.open);
    d.close = j.value("close", d.close);
  }
  if (d.open.empty() || d.close.empty()) throw ConfigError("reasoning delimiters must be non-empty");
  return d;
}

void RunConfig::validate() const {
  try {
    if (raw_.contains("seed") && !raw_.at("seed").is_number_unsigned()) {
      throw ConfigError("seed must be a non-negative integer");
    }
    if (workers() < 1) throw ConfigError("workers must be >= 1");
    const auto level = log_level();
    constexpr std::array<std::string_view, 6> kLevels{"trace", "debug", "info", "warn", "error", "off"};
    if (std::find(kLevels.begin(), kLevels.end(), level) == kLevels.end()) {
      throw ConfigError("unknown log_level '" + level + "'");
    }
    require_exists(templates_dir(), "template directory");
    if (auto p = optional_path_in("paths", "taxonomy")) require_exists(*p, "taxonomy");
    taxonomy();
    delimiters();
    llm::sampling_from_json(raw_.value("sampling", nlohmann::json::object()));

    for (auto it = section("endpoints").begin(); it != section("endpoints").end(); ++it) {
      auto e = endpoint_from(it.value());
      if (e.base_url.rfind("mock:", 0) == 0) require_exists(e.base_url.substr(5), "mock script");
    }
    if (has_section("distill")) {
      const auto& d = section("distill");
      const auto kind = template_kind_from_string(d.value("template", std::string("distill_aegis")));
      if (!kind || !is_distill_kind(*kind)) throw ConfigError("distill.template must name a distillation template");
      load_template(*kind);
      const auto fmt = d.value("input_format", std::string("samples"));
      if (fmt != "samples" && fmt != "topic_dialogues") throw ConfigError("unknown distill.input_format '" + fmt + "'");
      sampling("distill");
    }
    if (has_section("filter")) {
      filter_config();
      if (section("filter").value("judge", false)) load_template(TemplateKind::Judge);
    }
    if (has_section("shorten")) {
      load_template(TemplateKind::ShortenBudget);
      const auto& s = section("shorten");
      for (int n : s.value("budgets", std::vector<int>{s.value("n_sentences", 1)})) {
        BudgetConfig b{n, s.value("tolerance", 0), s.value("max_attempts", 3)};
        b.validate();
      }
    }
    if (has_section("assemble")) {
      assembly_spec();
      load_template(TemplateKind::Inference);
      for (const auto& src : assembly_spec().merge_sources) require_exists(resolve(src), "merge source");
    }
    if (has_section("mine")) {
      if (section("mine").value("n", 4) < 1) throw ConfigError("mine.n must be positive");
    }
    if (has_section("eval")) {
      if (section("eval").value("n_gens", 4) < 1) throw ConfigError("eval.n_gens must be positive");
      for (const auto& b : section("eval").value("benchmarks", std::vector<std::string>{})) {
        require_exists(resolve(b), "benchmark manifest");
      }
    }
    if (has_section("latency")) {
      for (const auto& ep : section("latency").value("endpoints", nlohmann::json::array())) {
        auto e = endpoint_from(ep.at("endpoint"));
        if (e.base_url.rfind("mock:", 0) == 0) require_exists(e.base_url.substr(5), "mock script");
      }
    }
    if (has_section("report")) eval_layout();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace guardkit::cli
