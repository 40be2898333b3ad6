#include "guardkit/cli/manifest.hpp"

#include "guardkit/jsonl.hpp"

namespace guardkit::cli {

Manifest::Manifest(std::string command, std::string config_hash, std::uint64_t seed)
    : command_(std::move(command)),
      config_hash_(std::move(config_hash)),
      seed_(seed),
      started_(std::chrono::steady_clock::now()) {}

void Manifest::add_input(const std::string& label, const std::string& path, std::size_t count) {
  inputs_[label] = {{"path", path}, {"count", count}};
}

void Manifest::add_output(const std::string& label, const std::string& path, std::size_t count) {
  outputs_[label] = {{"path", path}, {"count", count}};
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j{{"command", command_},
                   {"config_hash", config_hash_},
                   {"seed", seed_},
                   {"inputs", inputs_},
                   {"outputs", outputs_}};
  if (!extra_.empty()) j["details"] = extra_;
  return j;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

void Manifest::write(const std::filesystem::path& primary_output) const {
  write_file_atomic(manifest_path_for(primary_output), to_json().dump(2) + "\n");
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started_;
  const nlohmann::json timing{{"command", command_}, {"wall_time_s", elapsed.count()}};
  write_file_atomic(std::filesystem::path(primary_output.string() + ".timing.json"), timing.dump(2) + "\n");
}

}  // namespace guardkit::cli
