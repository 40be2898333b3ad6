#include "guardkit/taxonomy.hpp"

#include <unordered_set>

#include "guardkit/error.hpp"
#include "guardkit/jsonl.hpp"

namespace guardkit {

void Taxonomy::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& c : categories) {
    if (c.code.empty()) throw ValidationError("taxonomy " + name + ": empty category code");
    if (!seen.insert(c.code).second) {
      throw ValidationError("taxonomy " + name + ": duplicate category code '" + c.code + "'");
    }
  }
}

std::string render_taxonomy(const Taxonomy& taxonomy) {
  taxonomy.validate();
  std::string out;
  if (taxonomy.preamble) out = *taxonomy.preamble;
  for (const auto& c : taxonomy.categories) {
    if (!out.empty()) out += '\n';
    out += c.code;
    out += ": ";
    out += c.title;
    if (c.description && !c.description->empty()) {
      out += ' ';
      out += *c.description;
    }
  }
  return out;
}

Taxonomy taxonomy_from_json(const nlohmann::json& j) {
  Taxonomy t;
  try {
    t.name = j.at("name").get<std::string>();
    if (auto it = j.find("preamble"); it != j.end() && !it->is_null()) t.preamble = it->get<std::string>();
    for (const auto& c : j.value("categories", nlohmann::json::array())) {
      TaxonomyCategory cat;
      cat.code = c.at("code").get<std::string>();
      cat.title = c.value("title", std::string{});
      if (auto it = c.find("description"); it != c.end() && !it->is_null()) {
        cat.description = it->get<std::string>();
      }
      t.categories.push_back(std::move(cat));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed taxonomy: ") + e.what());
  }
  t.validate();
  return t;
}

nlohmann::json to_json(const Taxonomy& t) {
  nlohmann::json j;
  j["name"] = t.name;
  if (t.preamble) j["preamble"] = *t.preamble;
  j["categories"] = nlohmann::json::array();
  for (const auto& c : t.categories) {
    nlohmann::json cj{{"code", c.code}, {"title", c.title}};
    if (c.description) cj["description"] = *c.description;
    j["categories"].push_back(std::move(cj));
  }
  return j;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("taxonomy " + path.string() + ": " + e.what());
  }
  return taxonomy_from_json(j);
}

}  // namespace guardkit
