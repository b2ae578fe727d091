#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "evsg/grpo/toy.hpp"
#include "evsg/mllm/client.hpp"
#include "evsg/pipeline/captions.hpp"
#include "evsg/reward/reward.hpp"

namespace evsg::cli {

// One config file drives every subcommand; secrets stay in environment
// variables named by the endpoint config.
struct RunConfig {
  mllm::EndpointConfig endpoint;        // live endpoint when base_url is set
  std::filesystem::path mock_fixtures;  // scripted mock when set; excludes live
  pipeline::PipelineConfig pipeline;
  std::filesystem::path lexicon_path = "data/lexicon.txt";
  reward::RewardWeights weights;
  grpo::TrainToyConfig train;
  int parallelism = 0;  // 0 = hardware concurrency

  void check() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
};

// Mock client when mock_fixtures is set, HTTP client when base_url is set,
// ConfigError when neither.
std::unique_ptr<mllm::CompletionClient> make_client(const RunConfig& cfg);

// Scores one reward-batch record (JSON object with raw_text, gt_start,
// gt_end, gt_answer, optional id and attention) into a single-line
// breakdown JSON. Throws DataError on malformed records.
std::string score_record_json(const std::string& record_json,
                              const reward::RewardWeights& weights);

// Long-running scoring endpoint: POST /score takes one batch record and
// returns its breakdown; GET /healthz reports readiness; POST /shutdown
// stops the server.
class RewardService {
 public:
  explicit RewardService(reward::RewardWeights weights = {});
  ~RewardService();

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. Throws EndpointError when binding fails.
  int start(const std::string& host, int port);
  void wait();  // blocks until the server stops
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Entry point behind the binary; exposed so tests can drive subcommands
// in-process. Returns the process exit code (0 ok, 1 internal, 2 config,
// 3 data, 4 endpoint).
int run(int argc, const char* const* argv);

}  // namespace evsg::cli
