#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "evsg/mllm/client.hpp"

namespace evsg::mllm {

// Deterministic test double: canned responses keyed by request fingerprint.
// A fixture directory holds one file per fingerprint (filename = digest,
// content = response text). An unknown fingerprint raises an explicit miss
// error naming the digest; there is no fallback. Read-only after load.
class ScriptedMockClient : public CompletionClient {
 public:
  ScriptedMockClient() = default;
  explicit ScriptedMockClient(const std::filesystem::path& fixture_dir);

  void add_fixture(const ChatRequest& request, std::string response_text);
  void add_fixture(std::string digest, std::string response_text);

  // Writes the fixture file a directory-loaded mock would pick up.
  static std::string write_fixture(const std::filesystem::path& dir,
                                   const ChatRequest& request,
                                   const std::string& response_text);

  ChatResponse complete(const ChatRequest& request) override;

  std::size_t size() const { return fixtures_.size(); }

 private:
  std::map<std::string, std::string> fixtures_;
};

}  // namespace evsg::mllm
