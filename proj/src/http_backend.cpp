#include <httplib.h>

#include <cstdlib>

#include "guardkit/llm_client.hpp"

namespace guardkit::llm {

namespace {

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {
    const auto scheme_end = endpoint_.base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + endpoint_.base_url);
    const auto path_start = endpoint_.base_url.find('/', scheme_end + 3);
    origin_ = endpoint_.base_url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? std::string{} : endpoint_.base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  ChatResponse send(const ChatRequest& request, std::chrono::duration<double> timeout) override {
    httplib::Client client(origin_);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    const auto sec = static_cast<time_t>(usec.count() / 1000000);
    const auto rem = static_cast<time_t>(usec.count() % 1000000);
    client.set_connection_timeout(sec, rem);
    client.set_read_timeout(sec, rem);
    client.set_write_timeout(sec, rem);

    httplib::Headers headers;
    if (!endpoint_.api_key_env.empty()) {
      const char* key = std::getenv(endpoint_.api_key_env.c_str());
      if (key == nullptr) throw AuthMissing(endpoint_.api_key_env);
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const auto res = client.Post(prefix_ + "/chat/completions", headers, to_wire(request).dump(),
                                 "application/json");
    if (!res) {
      throw TransientError(0, "request to " + origin_ + " failed: " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 408 || status == 429 || status >= 500) {
      throw TransientError(status, "HTTP " + std::to_string(status) + " from " + origin_);
    }
    if (status < 200 || status >= 300) {
      throw HttpStatusError(status, "HTTP " + std::to_string(status) + " from " + origin_ + ": " + res->body);
    }
    return parse_wire_response(res->body);
  }

 private:
  EndpointConfig endpoint_;
  std::string origin_;
  std::string prefix_;
};

}  // namespace

std::shared_ptr<Backend> make_http_backend(const EndpointConfig& endpoint) {
  return std::make_shared<HttpBackend>(endpoint);
}

}  // namespace guardkit::llm
