#include "guardkit/mock_backend.hpp"

#include <algorithm>
#include <thread>

#include "guardkit/jsonl.hpp"
#include "guardkit/text.hpp"

namespace guardkit::llm {

namespace {

MockResponse response_from_json(const nlohmann::json& j) {
  if (j.is_string()) return MockResponse{j.get<std::string>()};
  MockResponse r;
  r.text = j.value("text", std::string{});
  r.delay_s = j.value("delay_ms", 0.0) / 1000.0;
  r.error_status = j.value("error", 0);
  return r;
}

std::vector<MockResponse> responses_from_json(const nlohmann::json& j) {
  std::vector<MockResponse> out;
  if (j.is_array()) {
    for (const auto& r : j) out.push_back(response_from_json(r));
  } else {
    out.push_back(response_from_json(j));
  }
  return out;
}

bool is_transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

MockScript mock_script_from_json(const nlohmann::json& j) {
  MockScript s;
  try {
    for (const auto& rj : j.value("rules", nlohmann::json::array())) {
      MockRule rule;
      if (auto it = rj.find("contains"); it != rj.end()) {
        if (it->is_string()) {
          rule.contains.push_back(it->get<std::string>());
        } else {
          rule.contains = it->get<std::vector<std::string>>();
        }
      }
      if (auto it = rj.find("fingerprint"); it != rj.end()) rule.fingerprint = it->get<std::string>();
      rule.responses = responses_from_json(rj.at("responses"));
      s.rules.push_back(std::move(rule));
    }
    if (auto it = j.find("default"); it != j.end() && !it->is_null()) {
      s.default_responses = responses_from_json(*it);
    }
    s.virtual_clock = j.value("clock", std::string("wall")) == "virtual";
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad mock script: ") + e.what());
  }
  return s;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  try {
    return mock_script_from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {
  const bool empty_rules = std::all_of(script_.rules.begin(), script_.rules.end(),
                                       [](const MockRule& r) { return r.responses.empty(); });
  if (empty_rules && script_.default_responses.empty()) throw ConfigError("mock script is empty");
  for (const auto& r : script_.rules) {
    if (r.responses.empty()) throw ConfigError("mock rule without responses");
  }
  cursors_.assign(script_.rules.size() + 1, 0);
}

std::string MockBackend::fingerprint(const std::optional<std::string>& system, const std::string& user) {
  std::string key = system.value_or("");
  key += '\x1f';
  key += user;
  return text::hex64(text::fnv1a64(key));
}

ChatResponse MockBackend::send(const ChatRequest& request, std::chrono::duration<double>) {
  const auto start = std::chrono::steady_clock::now();
  const int now_in_flight = ++concurrent_;
  for (int seen = max_concurrent_.load(); now_in_flight > seen;) {
    if (max_concurrent_.compare_exchange_weak(seen, now_in_flight)) break;
  }

  const std::string fp = fingerprint(request.system, request.user);
  std::vector<MockResponse> picked;
  {
    std::lock_guard lock(mutex_);
    std::size_t slot = script_.rules.size();
    const std::vector<MockResponse>* pool = nullptr;
    for (std::size_t i = 0; i < script_.rules.size(); ++i) {
      const auto& rule = script_.rules[i];
      if (rule.fingerprint && *rule.fingerprint != fp) continue;
      const bool all = std::all_of(rule.contains.begin(), rule.contains.end(), [&](const std::string& s) {
        return request.user.find(s) != std::string::npos;
      });
      if (!all) continue;
      slot = i;
      pool = &rule.responses;
      break;
    }
    if (pool == nullptr && !script_.default_responses.empty()) pool = &script_.default_responses;
    if (pool == nullptr) {
      --concurrent_;
      throw UnscriptedRequest("no mock rule matches request " + fp);
    }
    for (int k = 0; k < request.params.n; ++k) {
      const MockResponse& r = (*pool)[cursors_[slot]++ % pool->size()];
      picked.push_back(r);
      if (r.error_status != 0) break;  // a failing call consumes one entry
    }
  }

  double delay = 0.0;
  for (const auto& r : picked) delay = std::max(delay, r.delay_s);
  if (!script_.virtual_clock && delay > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }
  const auto end = std::chrono::steady_clock::now();
  {
    std::lock_guard lock(mutex_);
    log_.push_back({request.system, request.user, fp, request.params.n, start, end});
  }
  --concurrent_;

  if (const int status = picked.back().error_status; status != 0) {
    const std::string msg = "mock HTTP " + std::to_string(status);
    if (is_transient_status(status)) throw TransientError(status, msg);
    throw HttpStatusError(status, msg);
  }

  ChatResponse out;
  for (auto& r : picked) out.choices.push_back(std::move(r.text));
  if (script_.virtual_clock) out.reported_latency_s = delay;
  return out;
}

std::vector<CallRecord> MockBackend::call_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::shared_ptr<MockBackend> mock_backend(MockScript script) {
  return std::make_shared<MockBackend>(std::move(script));
}

}  // namespace guardkit::llm
