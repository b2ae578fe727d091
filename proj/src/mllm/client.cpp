#include "evsg/mllm/client.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "evsg/core/errors.hpp"

namespace evsg::mllm {

namespace {

using nlohmann::json;

const char* role_name(Role role) {
  return role == Role::System ? "system" : "user";
}

// FNV-1a 64-bit over the canonical byte stream, run twice with different
// offset bases for a 128-bit hex digest. Not cryptographic; collision risk
// over fixture corpora is negligible and spot-checked in tests.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

void validate_request(const ChatRequest& request) {
  bool has_user = false;
  for (const auto& m : request.messages) {
    if (m.role == Role::User) has_user = true;
  }
  if (!has_user) {
    throw DataError("chat request must contain at least one user message");
  }
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw DataError("chat request temperature must lie in [0, 2]");
  }
  if (request.max_tokens <= 0) {
    throw DataError("chat request max_tokens must be positive");
  }
}

std::string fingerprint(const ChatRequest& request) {
  validate_request(request);
  std::string canon;
  for (const auto& m : request.messages) {
    canon += role_name(m.role);
    canon += '\x1f';
    canon += m.content;
    canon += '\x1e';
  }
  canon += request.model_id;
  std::uint64_t a = fnv1a(canon, 0xcbf29ce484222325ULL);
  std::uint64_t b = fnv1a(canon, 0x9ae16a3b2f90404fULL);
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return buf;
}

std::string HttpCompletionClient::request_body(const ChatRequest& request) {
  json body;
  body["model"] = request.model_id;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  json messages = json::array();
  bool video_attached = !request.video_ref.has_value();
  for (const auto& m : request.messages) {
    json msg;
    msg["role"] = role_name(m.role);
    if (!video_attached && m.role == Role::User) {
      msg["content"] = json::array({
          json{{"type", "video_url"}, {"video_url", {{"url", *request.video_ref}}}},
          json{{"type", "text"}, {"text", m.content}},
      });
      video_attached = true;
    } else {
      msg["content"] = m.content;
    }
    messages.push_back(std::move(msg));
  }
  body["messages"] = std::move(messages);
  return body.dump();
}

struct HttpCompletionClient::Impl {
  EndpointConfig config;
  TransportFn transport;
  SleepFn sleep;

  // Bounded in-flight requests; condition-variable gate keeps the
  // implementation portable to pre-semaphore standard libraries.
  std::mutex mu;
  std::condition_variable cv;
  int in_flight = 0;

  std::string auth_header() {
    if (config.auth_token_env.empty()) return {};
    const char* token = std::getenv(config.auth_token_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw ConfigError("auth token env var \"" + config.auth_token_env +
                        "\" is not set");
    }
    return std::string("Bearer ") + token;
  }

  TransportResult send(const std::string& path, const std::string& body,
                       const std::vector<std::pair<std::string, std::string>>& headers) {
    if (transport) return transport(path, body, headers);

    httplib::Client client(config.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(config.timeout_ms));
    httplib::Headers hs;
    for (const auto& [k, v] : headers) hs.emplace(k, v);
    auto res = client.Post(path, hs, body, "application/json");
    if (!res) {
      TransportResult out;
      out.transport_error = true;
      out.error = httplib::to_string(res.error());
      return out;
    }
    return TransportResult{false, res->status, res->body, {}};
  }
};

HttpCompletionClient::HttpCompletionClient(EndpointConfig config, TransportFn transport,
                                           SleepFn sleep)
    : impl_(std::make_unique<Impl>()) {
  if (config.timeout_ms <= 0) throw ConfigError("endpoint timeout must be positive");
  if (config.max_retries < 0) throw ConfigError("endpoint max_retries must be >= 0");
  if (config.max_in_flight < 1) throw ConfigError("endpoint max_in_flight must be >= 1");
  impl_->config = std::move(config);
  impl_->transport = std::move(transport);
  impl_->sleep = sleep ? std::move(sleep) : [](std::int64_t ms) {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  };
}

HttpCompletionClient::~HttpCompletionClient() = default;

ChatResponse HttpCompletionClient::complete(const ChatRequest& request) {
  validate_request(request);

  std::vector<std::pair<std::string, std::string>> headers;
  std::string auth = impl_->auth_header();
  if (!auth.empty()) headers.emplace_back("Authorization", auth);

  std::string body = request_body(request);

  std::unique_lock<std::mutex> gate(impl_->mu);
  impl_->cv.wait(gate, [&] { return impl_->in_flight < impl_->config.max_in_flight; });
  ++impl_->in_flight;
  gate.unlock();
  struct Release {
    Impl* impl;
    ~Release() {
      std::lock_guard<std::mutex> lock(impl->mu);
      --impl->in_flight;
      impl->cv.notify_one();
    }
  } release{impl_.get()};

  auto started = std::chrono::steady_clock::now();
  TransportResult last;
  int attempts = 0;
  std::int64_t backoff = impl_->config.backoff_ms;
  while (true) {
    ++attempts;
    last = impl_->send("/v1/chat/completions", body, headers);
    bool transient = last.transport_error || retryable_status(last.status);
    if (!transient) break;
    if (attempts > impl_->config.max_retries) break;
    impl_->sleep(backoff);
    backoff *= 2;
  }

  if (last.transport_error) {
    std::ostringstream os;
    os << "transport failure after " << attempts << " attempt(s): " << last.error;
    throw EndpointError(os.str());
  }
  if (last.status < 200 || last.status >= 300) {
    std::ostringstream os;
    os << "endpoint returned status " << last.status << " after " << attempts
       << " attempt(s): " << last.body;
    throw EndpointError(os.str(), last.status);
  }

  ChatResponse response;
  try {
    json doc = json::parse(last.body);
    response.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage")) {
      response.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
      response.completion_tokens = doc["usage"].value("completion_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw EndpointError(std::string("unparseable endpoint response: ") + e.what() +
                        "; body: " + last.body, last.status);
  }
  response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  if (response.text.empty()) {
    throw EndpointError("endpoint returned an empty completion", last.status);
  }
  return response;
}

}  // namespace evsg::mllm
