#include "evsg/mllm/mock.hpp"

#include <fstream>
#include <sstream>

#include "evsg/core/errors.hpp"

namespace evsg::mllm {

namespace fs = std::filesystem;

ScriptedMockClient::ScriptedMockClient(const fs::path& fixture_dir) {
  if (!fs::is_directory(fixture_dir)) {
    throw ConfigError("mock fixture directory not found: " + fixture_dir.string());
  }
  for (const auto& entry : fs::directory_iterator(fixture_dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream content;
    content << in.rdbuf();
    fixtures_[entry.path().filename().string()] = content.str();
  }
}

void ScriptedMockClient::add_fixture(const ChatRequest& request, std::string response_text) {
  fixtures_[fingerprint(request)] = std::move(response_text);
}

void ScriptedMockClient::add_fixture(std::string digest, std::string response_text) {
  fixtures_[std::move(digest)] = std::move(response_text);
}

std::string ScriptedMockClient::write_fixture(const fs::path& dir, const ChatRequest& request,
                                              const std::string& response_text) {
  fs::create_directories(dir);
  std::string digest = fingerprint(request);
  std::ofstream out(dir / digest, std::ios::binary);
  out << response_text;
  return digest;
}

ChatResponse ScriptedMockClient::complete(const ChatRequest& request) {
  validate_request(request);
  std::string digest = fingerprint(request);
  auto it = fixtures_.find(digest);
  if (it == fixtures_.end()) {
    throw DataError("mock fixture miss for fingerprint " + digest);
  }
  if (it->second.empty()) {
    throw EndpointError("mock fixture " + digest + " holds an empty completion");
  }
  ChatResponse response;
  response.text = it->second;
  return response;
}

}  // namespace evsg::mllm
