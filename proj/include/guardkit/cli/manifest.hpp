#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace guardkit::cli {

/// Sidecar written next to a command's primary output. Everything in it is a
/// function of the inputs and config, so reruns reproduce it byte for byte;
/// wall time goes to a separate timing file.
class Manifest {
 public:
  Manifest(std::string command, std::string config_hash, std::uint64_t seed);

  void add_input(const std::string& label, const std::string& path, std::size_t count);
  void add_output(const std::string& label, const std::string& path, std::size_t count);
  nlohmann::json& extra() noexcept { return extra_; }

  nlohmann::json to_json() const;

  /// Writes <primary>.manifest.json and <primary>.timing.json.
  void write(const std::filesystem::path& primary_output) const;

 private:
  std::string command_;
  std::string config_hash_;
  std::uint64_t seed_;
  nlohmann::json inputs_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::object();
  nlohmann::json extra_ = nlohmann::json::object();
  std::chrono::steady_clock::time_point started_;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace guardkit::cli
