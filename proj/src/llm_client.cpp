#include "guardkit/llm_client.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "guardkit/mock_backend.hpp"

namespace guardkit::llm {

std::shared_ptr<Backend> make_http_backend(const EndpointConfig& endpoint);

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
  if (!(timeout_s > 0)) throw ConfigError("endpoint timeout must be > 0");
  if (max_in_flight < 1) throw ConfigError("endpoint max_in_flight must be >= 1");
  if (max_retries < 0) throw ConfigError("endpoint max_retries must be >= 0");
  if (backoff_base_s < 0) throw ConfigError("endpoint backoff_base_s must be >= 0");
}

EndpointConfig endpoint_from_json(const nlohmann::json& j) {
  EndpointConfig e;
  try {
    e.base_url = j.at("base_url").get<std::string>();
    e.model_name = j.value("model", std::string{});
    e.api_key_env = j.value("api_key_env", std::string{});
    e.timeout_s = j.value("timeout_s", e.timeout_s);
    e.max_retries = j.value("max_retries", e.max_retries);
    e.max_in_flight = j.value("max_in_flight", e.max_in_flight);
    e.batch_n = j.value("batch_n", e.batch_n);
    e.backoff_base_s = j.value("backoff_base_s", e.backoff_base_s);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad endpoint config: ") + ex.what());
  }
  e.validate();
  return e;
}

nlohmann::json to_json(const EndpointConfig& e) {
  return {{"base_url", e.base_url},       {"model", e.model_name},
          {"api_key_env", e.api_key_env}, {"timeout_s", e.timeout_s},
          {"max_retries", e.max_retries}, {"max_in_flight", e.max_in_flight},
          {"batch_n", e.batch_n},         {"backoff_base_s", e.backoff_base_s}};
}

void SamplingParams::validate() const {
  if (!(temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (!(top_p > 0 && top_p <= 1)) throw ConfigError("top_p must be in (0, 1]");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (n < 1) throw ConfigError("n must be >= 1");
}

SamplingParams sampling_from_json(const nlohmann::json& j) {
  SamplingParams p;
  try {
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    p.n = j.value("n", p.n);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad sampling config: ") + ex.what());
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const SamplingParams& p) {
  return {{"temperature", p.temperature}, {"top_p", p.top_p}, {"max_tokens", p.max_tokens}, {"n", p.n}};
}

nlohmann::json to_wire(const ChatRequest& r) {
  nlohmann::json messages = nlohmann::json::array();
  if (r.system) messages.push_back({{"role", "system"}, {"content", *r.system}});
  messages.push_back({{"role", "user"}, {"content", r.user}});
  return {{"model", r.model},
          {"messages", std::move(messages)},
          {"temperature", r.params.temperature},
          {"top_p", r.params.top_p},
          {"n", r.params.n},
          {"max_tokens", r.params.max_tokens}};
}

ChatResponse parse_wire_response(std::string_view body) {
  ChatResponse out;
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& choices = j.at("choices");
    if (!choices.is_array() || choices.empty()) throw MalformedResponse("response has no choices");
    for (const auto& c : choices) {
      const auto& content = c.at("message").at("content");
      out.choices.push_back(content.is_null() ? std::string{} : content.get<std::string>());
    }
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
      out.usage = Usage{it->value("prompt_tokens", std::int64_t{0}),
                        it->value("completion_tokens", std::int64_t{0})};
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponse(std::string("malformed chat response: ") + e.what());
  }
  return out;
}

ChatClient::ChatClient(EndpointConfig endpoint, std::shared_ptr<Backend> backend)
    : endpoint_(std::move(endpoint)), backend_(std::move(backend)) {
  endpoint_.validate();
}

void ChatClient::acquire() {
  std::unique_lock lock(mutex_);
  slot_freed_.wait(lock, [&] { return in_flight_ < endpoint_.max_in_flight; });
  ++in_flight_;
}

void ChatClient::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  slot_freed_.notify_one();
}

ChatClient::Stats ChatClient::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

namespace {

double jittered_backoff(double base_s, int attempt) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const double cap = base_s * std::ldexp(1.0, attempt);
  return std::uniform_real_distribution<double>(0.0, cap)(rng);
}

}  // namespace

ChatResponse ChatClient::send_with_retry(const ChatRequest& request, double& latency_s) {
  for (int attempt = 0;; ++attempt) {
    acquire();
    {
      std::lock_guard lock(mutex_);
      ++stats_.requests;
    }
    try {
      const auto t0 = std::chrono::steady_clock::now();
      auto response = backend_->send(request, std::chrono::duration<double>(endpoint_.timeout_s));
      const auto t1 = std::chrono::steady_clock::now();
      release();
      latency_s = response.reported_latency_s.value_or(std::chrono::duration<double>(t1 - t0).count());
      return response;
    } catch (const TransientError& e) {
      release();
      if (attempt >= endpoint_.max_retries) throw ExhaustedRetries(attempt + 1, e.what());
      {
        std::lock_guard lock(mutex_);
        ++stats_.retries;
      }
      std::this_thread::sleep_for(
          std::chrono::duration<double>(jittered_backoff(endpoint_.backoff_base_s, attempt)));
    } catch (...) {
      release();
      throw;
    }
  }
}

std::vector<Completion> ChatClient::chat(const std::optional<std::string>& system, const std::string& user,
                                         const SamplingParams& params) {
  params.validate();
  if (!endpoint_.api_key_env.empty() && std::getenv(endpoint_.api_key_env.c_str()) == nullptr) {
    throw AuthMissing(endpoint_.api_key_env);
  }

  ChatRequest request{endpoint_.model_name, system, user, params};
  std::vector<Completion> out;
  out.reserve(static_cast<std::size_t>(params.n));

  if (endpoint_.batch_n || params.n == 1) {
    double latency = 0.0;
    auto response = send_with_retry(request, latency);
    if (response.choices.size() != static_cast<std::size_t>(params.n)) {
      throw MalformedResponse("expected " + std::to_string(params.n) + " choices, got " +
                              std::to_string(response.choices.size()));
    }
    const double per_generation = latency / params.n;
    for (auto& text : response.choices) out.push_back({std::move(text), per_generation, response.usage});
    return out;
  }

  request.params.n = 1;
  for (int i = 0; i < params.n; ++i) {
    double latency = 0.0;
    auto response = send_with_retry(request, latency);
    if (response.choices.size() != 1) {
      throw MalformedResponse("expected 1 choice, got " + std::to_string(response.choices.size()));
    }
    out.push_back({std::move(response.choices.front()), latency, response.usage});
  }
  return out;
}

std::shared_ptr<Backend> make_backend(const EndpointConfig& endpoint) {
  constexpr std::string_view kMock = "mock:";
  if (endpoint.base_url.rfind(kMock, 0) == 0) {
    return mock_backend(load_mock_script(endpoint.base_url.substr(kMock.size())));
  }
  return make_http_backend(endpoint);
}

std::unique_ptr<ChatClient> make_client(const EndpointConfig& endpoint) {
  return std::make_unique<ChatClient>(endpoint, make_backend(endpoint));
}

}  // namespace guardkit::llm
