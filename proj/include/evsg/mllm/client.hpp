#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evsg::mllm {

enum class Role { System, User };

struct Message {
  Role role = Role::User;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct ChatRequest {
  std::vector<Message> messages;
  std::optional<std::string> video_ref;  // URI; the video itself is never read
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string model_id;
};

// Throws DataError when the request violates its invariants (no user
// message, temperature outside [0, 2], non-positive max_tokens).
void validate_request(const ChatRequest& request);

struct ChatResponse {
  std::string text;
  std::int64_t latency_ms = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct EndpointConfig {
  std::string base_url;
  std::string auth_token_env;  // name of the env var holding the bearer token
  std::string model_id = "default";
  std::int64_t timeout_ms = 120000;
  int max_retries = 3;
  std::int64_t backoff_ms = 1000;  // doubles after each retry
  int max_in_flight = 4;
};

// Stable digest over canonicalized messages + model_id. Sampling parameters
// (temperature, max_tokens) and the video reference are excluded so recorded
// fixtures survive tuning. 32 hex chars.
std::string fingerprint(const ChatRequest& request);

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Raw transport seam so retry behavior is testable without a live server.
struct TransportResult {
  bool transport_error = false;  // no HTTP response at all (timeout, refused)
  int status = 0;
  std::string body;
  std::string error;
};

using TransportFn = std::function<TransportResult(
    const std::string& path, const std::string& body,
    const std::vector<std::pair<std::string, std::string>>& headers)>;
using SleepFn = std::function<void(std::int64_t ms)>;

// Chat-completions-style HTTP client. POSTs {model, messages, temperature,
// max_tokens} to <base_url>/v1/chat/completions; a video reference is
// attached to the first user message as a video_url content part. Transient
// failures (transport errors, 429, 5xx) are retried with doubling backoff up
// to max_retries; total attempts never exceed 1 + max_retries. Concurrent
// callers are capped at max_in_flight requests.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(EndpointConfig config, TransportFn transport = {},
                                SleepFn sleep = {});
  ~HttpCompletionClient() override;

  ChatResponse complete(const ChatRequest& request) override;

  // Request body as sent on the wire (exposed for tests and debugging).
  static std::string request_body(const ChatRequest& request);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evsg::mllm
