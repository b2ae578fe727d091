#pragma once

#include <cstdint>
#include <vector>

namespace evsg::grpo {

struct GrpoConfig {
  int group_size = 8;
  double beta = 0.04;          // KL penalty weight
  double learning_rate = 0.05;
  int iterations = 500;
  std::uint64_t seed = 7;  // the calibrated default run; see the trainer tests
  double std_epsilon = 1e-8;   // groups with std below this get zero advantages
  bool clip_ratios = false;    // optional PPO-style ratio clipping, off by default
  double clip_epsilon = 0.2;

  // Throws ConfigError on G < 2, beta < 0, learning_rate <= 0,
  // iterations < 0, or a non-positive std_epsilon.
  void check() const;
};

// Group-relative advantages: (r - mean) / population std. A group whose
// std falls below std_epsilon is treated as constant and gets all zeros.
// Throws DataError when the group has fewer than two rewards.
std::vector<double> normalize_group(const std::vector<double>& rewards,
                                    double std_epsilon = 1e-8);

// Weighted group sum: sum_k ratios[k] * advantages[k].
// Throws DataError on empty or mismatched inputs.
double group_objective(const std::vector<double>& ratios, const std::vector<double>& advantages);

// Numerically stable log-softmax / softmax over raw logits.
std::vector<double> log_softmax(const std::vector<double>& logits);
std::vector<double> softmax(const std::vector<double>& logits);

// Exact KL(softmax(p_logits) || softmax(q_logits)) for one categorical.
// Throws DataError on empty input or dimension mismatch.
double kl_categorical(const std::vector<double>& p_logits, const std::vector<double>& q_logits);

}  // namespace evsg::grpo
