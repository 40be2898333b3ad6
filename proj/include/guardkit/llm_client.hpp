#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardkit/error.hpp"

namespace guardkit::llm {

struct EndpointConfig {
  std::string base_url;      // http(s)://host[:port]/prefix, or mock:<script.json>
  std::string model_name;
  std::string api_key_env;   // empty = no credential
  double timeout_s = 120.0;
  int max_retries = 3;
  int max_in_flight = 4;
  bool batch_n = true;       // send n in one request instead of n requests
  double backoff_base_s = 0.5;

  void validate() const;
};

EndpointConfig endpoint_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EndpointConfig& e);

struct SamplingParams {
  double temperature = 0.6;
  double top_p = 0.95;
  int max_tokens = 2048;
  int n = 1;

  void validate() const;
};

SamplingParams sampling_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SamplingParams& p);

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Completion {
  std::string text;
  double latency_s = 0.0;
  std::optional<Usage> usage;
};

struct ChatRequest {
  std::string model;
  std::optional<std::string> system;
  std::string user;
  SamplingParams params;
};

/// Wire body: model, messages[(role, content)], temperature, top_p, n, max_tokens.
nlohmann::json to_wire(const ChatRequest& request);

struct ChatResponse {
  std::vector<std::string> choices;
  std::optional<Usage> usage;
  // Backends with a simulated clock report latency instead of having it measured.
  std::optional<double> reported_latency_s;
};

/// Parses a chat-completion response body; throws MalformedResponse.
ChatResponse parse_wire_response(std::string_view body);

class TransportError : public Error {
 public:
  using Error::Error;
};

/// 429, 5xx, timeouts and connection failures. Retried by ChatClient.
class TransientError : public TransportError {
 public:
  TransientError(int status, const std::string& what) : TransportError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class HttpStatusError : public TransportError {
 public:
  HttpStatusError(int status, const std::string& what) : TransportError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class ExhaustedRetries : public TransportError {
 public:
  ExhaustedRetries(int attempts, const std::string& last)
      : TransportError("gave up after " + std::to_string(attempts) + " attempts: " + last),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class AuthMissing : public TransportError {
 public:
  explicit AuthMissing(const std::string& var)
      : TransportError("API key environment variable " + var + " is not set") {}
};

class MalformedResponse : public TransportError {
 public:
  using TransportError::TransportError;
};

class UnscriptedRequest : public TransportError {
 public:
  using TransportError::TransportError;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatResponse send(const ChatRequest& request, std::chrono::duration<double> timeout) = 0;
};

/// Shareable chat-completion client: retries transient failures with full-jitter
/// exponential backoff and never has more than max_in_flight requests
/// outstanding against its endpoint.
class ChatClient {
 public:
  ChatClient(EndpointConfig endpoint, std::shared_ptr<Backend> backend);
  ChatClient(const ChatClient&) = delete;
  ChatClient& operator=(const ChatClient&) = delete;

  /// Returns exactly params.n completions, in order.
  std::vector<Completion> chat(const std::optional<std::string>& system, const std::string& user,
                               const SamplingParams& params);

  const EndpointConfig& endpoint() const noexcept { return endpoint_; }
  Backend& backend() noexcept { return *backend_; }

  struct Stats {
    std::int64_t requests = 0;
    std::int64_t retries = 0;
  };
  Stats stats() const;

 private:
  ChatResponse send_with_retry(const ChatRequest& request, double& latency_s);
  void acquire();
  void release();

  EndpointConfig endpoint_;
  std::shared_ptr<Backend> backend_;
  mutable std::mutex mutex_;
  std::condition_variable slot_freed_;
  int in_flight_ = 0;
  Stats stats_;
};

/// mock:<path> endpoints load a MockBackend script; everything else goes over HTTP.
std::shared_ptr<Backend> make_backend(const EndpointConfig& endpoint);
std::unique_ptr<ChatClient> make_client(const EndpointConfig& endpoint);

}  // namespace guardkit::llm
