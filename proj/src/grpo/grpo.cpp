#include "evsg/grpo/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evsg/core/errors.hpp"

namespace evsg::grpo {

void GrpoConfig::check() const {
  if (group_size < 2) throw ConfigError("group_size must be at least 2");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be non-negative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (iterations < 0) throw ConfigError("iterations must be non-negative");
  if (!(std_epsilon > 0.0)) throw ConfigError("std_epsilon must be positive");
  if (clip_ratios && !(clip_epsilon > 0.0)) {
    throw ConfigError("clip_epsilon must be positive when clipping is on");
  }
}

std::vector<double> normalize_group(const std::vector<double>& rewards, double std_epsilon) {
  if (rewards.size() < 2) {
    throw DataError("reward group needs at least 2 entries, got " +
                    std::to_string(rewards.size()));
  }
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rewards.size());
  double sd = std::sqrt(var);

  std::vector<double> adv(rewards.size(), 0.0);
  if (sd < std_epsilon) return adv;
  for (size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

double group_objective(const std::vector<double>& ratios, const std::vector<double>& advantages) {
  if (ratios.empty() || ratios.size() != advantages.size()) {
    throw DataError("ratio/advantage lists must be non-empty and equal length");
  }
  double total = 0.0;
  for (size_t i = 0; i < ratios.size(); ++i) total += ratios[i] * advantages[i];
  return total;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw DataError("log_softmax of empty logits");
  double hi = *std::max_element(logits.begin(), logits.end());
  double lse = 0.0;
  for (double z : logits) lse += std::exp(z - hi);
  lse = hi + std::log(lse);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

double kl_categorical(const std::vector<double>& p_logits, const std::vector<double>& q_logits) {
  if (p_logits.empty() || p_logits.size() != q_logits.size()) {
    throw DataError("kl_categorical needs equal non-empty logit vectors");
  }
  std::vector<double> lp = log_softmax(p_logits);
  std::vector<double> lq = log_softmax(q_logits);
  double kl = 0.0;
  for (size_t i = 0; i < lp.size(); ++i) kl += std::exp(lp[i]) * (lp[i] - lq[i]);
  return std::max(kl, 0.0);
}

}  // namespace evsg::grpo
