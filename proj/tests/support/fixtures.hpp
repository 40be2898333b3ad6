#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/llm_client.hpp"
#include "guardkit/mock_backend.hpp"
#include "guardkit/record.hpp"
#include "guardkit/rng.hpp"
#include "guardkit/sample.hpp"

namespace guardkit::fixtures {

/// "[s007]": every synthetic prompt and trace carries its sample's marker so
/// mock rules can key on it.
std::string marker(const std::string& id);

/// Mixed harmful/unharmful samples; roughly a third have no response.
std::vector<GuardSample> synthetic_samples(std::size_t n, std::uint64_t seed, const std::string& prefix = "s",
                                           const std::string& source = "synthetic");

/// Four short, lexically varied sentences mentioning the sample marker.
std::string clean_trace(const GuardSample& sample, SeededRng& rng);

/// `words` random vocabulary words split into sentences of `per_sentence`.
std::string random_sentences(SeededRng& rng, int sentences, int per_sentence);

std::string teacher_completion(const GuardSample& sample, const std::string& trace);

/// A guard output whose labels match the gold (correct) or flip the prompt label.
std::string guard_completion(const GuardSample& sample, bool correct);

inline const std::string kUnparseable = "I am not able to classify this.";

enum class Plant { None, Leakage, Repetition, Overthinking };

struct PlantedCorpus {
  std::vector<DistilledRecord> records;
  std::map<std::string, Plant> plants;  // id -> planted defect
};

PlantedCorpus planted_corpus(std::size_t clean, std::size_t leaks, std::size_t repetitions, std::size_t overthinking,
                             std::uint64_t seed);

/// Writes data, benchmarks, taxonomies, mock scripts and config.json for the
/// eight-command pipeline under `dir`. Returns the config path.
std::filesystem::path write_pipeline_workspace(const std::filesystem::path& dir, std::size_t n_samples);

/// Argument vectors (program name first) for the eight commands, in order.
std::vector<std::vector<std::string>> pipeline_commands(const std::filesystem::path& config);

/// An in-process mock endpoint with retries disabled.
struct MockRig {
  std::shared_ptr<llm::MockBackend> backend;
  std::unique_ptr<llm::ChatClient> client;
};
MockRig mock_rig(const nlohmann::json& script, const std::string& model = "mock", int max_in_flight = 4);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

/// Relative path -> contents for every regular file under `root`.
std::map<std::string, std::string> snapshot(const std::filesystem::path& root, const std::string& skip_suffix = "");

}  // namespace guardkit::fixtures
