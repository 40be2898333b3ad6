#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/llm_client.hpp"

namespace guardkit::llm {

struct MockResponse {
  std::string text;
  double delay_s = 0.0;
  int error_status = 0;  // nonzero: fail this call with that HTTP status
};

/// A rule matches when every `contains` substring occurs in the user message
/// and, if set, the request fingerprint is equal. Responses cycle round-robin.
struct MockRule {
  std::vector<std::string> contains;
  std::optional<std::string> fingerprint;
  std::vector<MockResponse> responses;
};

struct MockScript {
  std::vector<MockRule> rules;
  std::vector<MockResponse> default_responses;
  // Virtual clock: report each response's delay as its latency without sleeping.
  bool virtual_clock = false;
};

// {"rules":[{"contains":[..],"fingerprint":"..","responses":[..]}],
//  "default": "text" | [responses], "clock": "wall"|"virtual"}
// A response is a string or {"text":..,"delay_ms":..,"error":status}.
MockScript mock_script_from_json(const nlohmann::json& j);
MockScript load_mock_script(const std::filesystem::path& path);

struct CallRecord {
  std::optional<std::string> system;
  std::string user;
  std::string fingerprint;
  int n = 1;
  std::chrono::steady_clock::time_point start;
  std::chrono::steady_clock::time_point end;
};

/// Deterministic scripted backend: the same request sequence yields the same
/// response sequence. Every call is logged for assertions.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script);

  ChatResponse send(const ChatRequest& request, std::chrono::duration<double> timeout) override;

  static std::string fingerprint(const std::optional<std::string>& system, const std::string& user);

  std::vector<CallRecord> call_log() const;
  std::size_t call_count() const;
  int max_concurrent() const noexcept { return max_concurrent_.load(); }

 private:
  MockScript script_;
  std::vector<std::size_t> cursors_;  // one per rule, last slot for the default
  mutable std::mutex mutex_;
  std::vector<CallRecord> log_;
  std::atomic<int> concurrent_{0};
  std::atomic<int> max_concurrent_{0};
};

std::shared_ptr<MockBackend> mock_backend(MockScript script);

}  // namespace guardkit::llm
