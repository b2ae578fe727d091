#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "evsg/core/graph.hpp"
#include "evsg/grpo/grpo.hpp"

namespace evsg::grpo {

// Desk-scale grounded-VQA surrogate: a video of duration_buckets fixed-size
// buckets, a scene graph over those buckets, and a multiple-choice answer.
struct ToyEnvConfig {
  int duration_buckets = 12;   // D; video duration = D * bucket_seconds
  double bucket_seconds = 5.0;
  int answer_count = 8;        // K answer choices, lettered A..
  int min_events = 3;
  int max_events = 8;

  void check() const;      // throws ConfigError
  int feature_dim() const; // relation bag + start/end encodings + answer one-hot + bias
};

// Relation vocabulary shared by the generator and the bag features.
const std::vector<std::string>& toy_relations();

struct SyntheticInstance {
  EventGraph graph;
  int question_template = 0;
  TimeSpan gt_span;
  int gt_answer_id = 0;
  std::vector<double> features;
};

// Deterministic in seed; the graph always passes validation with no errors.
SyntheticInstance gen_instance(std::uint64_t seed, const ToyEnvConfig& cfg);

// Linear policy with three categorical heads over a shared feature vector:
// start bucket, end bucket, answer id. Matrices are row-major
// head_dim x feature_dim.
struct ToyPolicy {
  int feature_dim = 0;
  int start_dim = 0;
  int end_dim = 0;
  int answer_dim = 0;
  std::vector<double> w_start, w_end, w_answer;

  static ToyPolicy zero(const ToyEnvConfig& cfg);

  std::vector<double> start_logits(const std::vector<double>& x) const;
  std::vector<double> end_logits(const std::vector<double>& x) const;
  std::vector<double> answer_logits(const std::vector<double>& x) const;
  bool finite() const;

  bool operator==(const ToyPolicy&) const = default;
};

// Sum of the three per-head KLs at one feature vector.
double policy_kl(const ToyPolicy& p, const ToyPolicy& q, const std::vector<double>& x);

struct ToyAction {
  int start_bucket = 0;
  int end_bucket = 0;
  int answer_id = 0;
};

std::string answer_letter(int answer_id);

// Canonical completion text for an action, in the grammar the reward
// parser expects.
std::string render_completion(const ToyAction& a, const ToyEnvConfig& cfg);

using ToyRewardFn = std::function<double(const SyntheticInstance&, const std::string& raw_text)>;

// Default scorer: parse the completion, run the composite reward against
// the instance ground truth with a fixed half/half attention dump.
ToyRewardFn default_toy_reward();

// A frozen sample of one group: everything except the policy parameters is
// data, so the surrogate below is an ordinary differentiable function
// (suitable for finite-difference checking).
struct SurrogatePoint {
  std::vector<double> features;
  std::vector<ToyAction> actions;
  std::vector<double> logp_old;    // log-prob of each action under the sampling policy
  std::vector<double> advantages;
};

// sum_k ratio_k * advantage_k - beta * KL(policy || reference) at the point,
// with ratio_k = exp(logp_new_k - logp_old_k).
double surrogate_value(const ToyPolicy& policy, const ToyPolicy& reference,
                       const SurrogatePoint& pt, const GrpoConfig& cfg);

struct PolicyGrad {
  std::vector<double> w_start, w_end, w_answer;  // same layout as ToyPolicy
};

// Exact gradient of surrogate_value with respect to every parameter.
PolicyGrad surrogate_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                              const SurrogatePoint& pt, const GrpoConfig& cfg);

struct StepStats {
  double mean_reward = 0.0;  // over all rollouts in the batch
  double mean_kl = 0.0;      // to reference, before the update
};

// One update: G rollouts per instance sampled from `policy`, group-relative
// advantages, single gradient-ascent step on the batch-mean surrogate.
// Throws Error when the gradient turns non-finite.
std::pair<ToyPolicy, StepStats> grpo_step(const ToyPolicy& policy, const ToyPolicy& reference,
                                          const std::vector<SyntheticInstance>& batch,
                                          const GrpoConfig& cfg, const ToyRewardFn& reward_fn,
                                          std::uint64_t step_key);

struct TrainToyConfig {
  GrpoConfig grpo;
  ToyEnvConfig env;
  int batch_size = 16;
  int eval_instances = 64;

  void check() const;
};

struct TrainReport {
  TrainToyConfig config;
  std::vector<double> mean_reward;  // one entry per iteration
  std::vector<double> mean_kl;
  double initial_eval = 0.0;
  double final_eval = 0.0;
};

// Mean reward of the policy's greedy (per-head argmax) outputs over a fixed
// seeded evaluation set. Sampling is a training-time concern; evaluation
// scores the single output the policy actually prefers.
double eval_policy(const ToyPolicy& policy, const TrainToyConfig& cfg,
                   const ToyRewardFn& reward_fn);

// Full seeded training run; byte-identical reports for identical configs.
TrainReport train_toy(const TrainToyConfig& cfg);

std::string train_config_to_json(const TrainToyConfig& cfg);
TrainToyConfig train_config_from_json(const std::string& text);
std::string report_to_json(const TrainReport& report);

}  // namespace evsg::grpo
