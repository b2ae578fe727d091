#include "evsg/grpo/toy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "evsg/core/errors.hpp"
#include "evsg/grpo/rng.hpp"
#include "evsg/reward/reward.hpp"
#include "json.hpp"

namespace evsg::grpo {

namespace {

// Stream tags for the counter RNG so every consumer draws from its own key.
constexpr std::uint64_t kTagInstance = 0xA1;
constexpr std::uint64_t kTagTrainInstance = 0xA2;
constexpr std::uint64_t kTagEvalInstance = 0xA3;
constexpr std::uint64_t kTagStep = 0xA4;

constexpr double kBagScale = 0.1;       // keeps |features| moderate
constexpr double kGtRelevance = 2.0;    // positional weight of the asked-about event
constexpr double kOffRelevance = 0.1;   // positional weight of the other events

const std::vector<std::string>& toy_subjects() {
  static const std::vector<std::string> v = {"man", "woman", "child", "dog", "cat", "worker"};
  return v;
}

const std::vector<std::string>& toy_objects() {
  static const std::vector<std::string> v = {"cup",  "bench", "door", "bike",
                                             "ball", "book",  "bag",  "table"};
  return v;
}

std::vector<double> matvec(const std::vector<double>& w, int rows,
                           const std::vector<double>& x) {
  if (w.size() != static_cast<size_t>(rows) * x.size()) {
    throw DataError("policy weight / feature dimension mismatch");
  }
  std::vector<double> out(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    const double* row = w.data() + static_cast<size_t>(r) * x.size();
    double acc = 0.0;
    for (size_t c = 0; c < x.size(); ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
  return out;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", s);
  return buf;
}

// g_z for one head at a surrogate point: the ratio-weighted log-prob part
// minus beta times the KL part.
void add_head_gradient(const std::vector<double>& p, const std::vector<double>& lp,
                       const std::vector<double>& lq, const std::vector<double>& coeffs,
                       const std::vector<int>& picks, double beta, std::vector<double>& gz) {
  for (size_t k = 0; k < picks.size(); ++k) {
    double c = coeffs[k];
    if (c == 0.0) continue;
    for (size_t i = 0; i < p.size(); ++i) gz[i] -= c * p[i];
    gz[static_cast<size_t>(picks[k])] += c;
  }
  if (beta != 0.0) {
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); ++i) kl += p[i] * (lp[i] - lq[i]);
    for (size_t i = 0; i < p.size(); ++i) gz[i] -= beta * p[i] * (lp[i] - lq[i] - kl);
  }
}

void add_outer(std::vector<double>& w, const std::vector<double>& gz,
               const std::vector<double>& x, double scale) {
  for (size_t r = 0; r < gz.size(); ++r) {
    double g = gz[r] * scale;
    if (g == 0.0) continue;
    double* row = w.data() + r * x.size();
    for (size_t c = 0; c < x.size(); ++c) row[c] += g * x[c];
  }
}

}  // namespace

void ToyEnvConfig::check() const {
  if (duration_buckets < 2) throw ConfigError("duration_buckets must be at least 2");
  if (!(bucket_seconds > 0.0) || !std::isfinite(bucket_seconds)) {
    throw ConfigError("bucket_seconds must be positive");
  }
  if (answer_count < 2 || answer_count > 26) {
    throw ConfigError("answer_count must be in [2, 26]");
  }
  if (min_events < 1 || min_events > max_events || max_events > duration_buckets) {
    throw ConfigError("event count range must satisfy 1 <= min <= max <= duration_buckets");
  }
}

int ToyEnvConfig::feature_dim() const {
  return static_cast<int>(toy_relations().size()) + 2 * duration_buckets + answer_count + 1;
}

const std::vector<std::string>& toy_relations() {
  static const std::vector<std::string> v = {"holds",    "sits_on",   "stands_near", "walks_to",
                                             "looks_at", "picks_up",  "puts_down",   "opens",
                                             "rides",    "closes"};
  return v;
}

SyntheticInstance gen_instance(std::uint64_t seed, const ToyEnvConfig& cfg) {
  cfg.check();
  CounterRng rng(rng_key({seed, kTagInstance}));
  const int d = cfg.duration_buckets;
  const auto& rels = toy_relations();
  const auto& subs = toy_subjects();
  const auto& objs = toy_objects();

  int n = rng.uniform_int(cfg.min_events, cfg.max_events);

  // n distinct start buckets, ascending, so events never overlap and the
  // positional features stay separable.
  std::vector<int> buckets(d);
  std::iota(buckets.begin(), buckets.end(), 0);
  for (int i = 0; i < n; ++i) {
    std::swap(buckets[i], buckets[rng.uniform_int(i, d - 1)]);
  }
  std::vector<int> starts(buckets.begin(), buckets.begin() + n);
  std::sort(starts.begin(), starts.end());

  // Single-bucket events keep the span task crisp: a predicted bucket either
  // matches the asked-about event exactly or overlaps it not at all, so the
  // group-relative advantages separate hits from near-misses.
  std::vector<EventSubgraph> events;
  for (int j = 0; j < n; ++j) {
    EventSubgraph ev;
    ev.span = TimeSpan::of_seconds(starts[j] * cfg.bucket_seconds,
                                   (starts[j] + 1) * cfg.bucket_seconds);
    int triplet_count = rng.uniform_int(1, 3);
    for (int t = 0; t < triplet_count; ++t) {
      ev.triplets.push_back(Triplet::make(subs[rng.uniform_int(0, (int)subs.size() - 1)],
                                          rels[rng.uniform_int(0, (int)rels.size() - 1)],
                                          objs[rng.uniform_int(0, (int)objs.size() - 1)]));
    }
    events.push_back(std::move(ev));
  }

  int gt_event = rng.uniform_int(0, n - 1);
  int answer_id = rng.uniform_int(0, cfg.answer_count - 1);
  int question_template = rng.uniform_int(0, 2);

  SyntheticInstance inst;
  inst.graph = build_graph("toy-" + std::to_string(seed), d * cfg.bucket_seconds,
                           std::move(events));
  inst.question_template = question_template;
  inst.gt_span = inst.graph.events[static_cast<size_t>(gt_event)].span;
  inst.gt_answer_id = answer_id;

  // Features: relation bag, relevance-weighted start/end bucket encodings
  // (the asked-about event carries kGtRelevance, the rest kOffRelevance),
  // the question's answer one-hot, and a bias term. The answer one-hot is
  // the question encoding: at desk scale the question text is replaced by a
  // vector that identifies the correct choice, so a linear policy can
  // actually ground it.
  const int r_dim = static_cast<int>(rels.size());
  std::vector<double> x(cfg.feature_dim(), 0.0);
  for (int j = 0; j < n; ++j) {
    const auto& ev = inst.graph.events[static_cast<size_t>(j)];
    for (const auto& tr : ev.triplets) {
      auto it = std::find(rels.begin(), rels.end(), tr.relation);
      if (it != rels.end()) x[it - rels.begin()] += kBagScale;
    }
    double w = (j == gt_event) ? kGtRelevance : kOffRelevance;
    x[r_dim + starts[j]] += w;
    x[r_dim + d + starts[j]] += w;
  }
  x[r_dim + 2 * d + answer_id] = 1.0;
  x[cfg.feature_dim() - 1] = 1.0;
  inst.features = std::move(x);
  return inst;
}

ToyPolicy ToyPolicy::zero(const ToyEnvConfig& cfg) {
  cfg.check();
  ToyPolicy p;
  p.feature_dim = cfg.feature_dim();
  p.start_dim = cfg.duration_buckets;
  p.end_dim = cfg.duration_buckets;
  p.answer_dim = cfg.answer_count;
  p.w_start.assign(static_cast<size_t>(p.start_dim) * p.feature_dim, 0.0);
  p.w_end.assign(static_cast<size_t>(p.end_dim) * p.feature_dim, 0.0);
  p.w_answer.assign(static_cast<size_t>(p.answer_dim) * p.feature_dim, 0.0);
  return p;
}

std::vector<double> ToyPolicy::start_logits(const std::vector<double>& x) const {
  return matvec(w_start, start_dim, x);
}
std::vector<double> ToyPolicy::end_logits(const std::vector<double>& x) const {
  return matvec(w_end, end_dim, x);
}
std::vector<double> ToyPolicy::answer_logits(const std::vector<double>& x) const {
  return matvec(w_answer, answer_dim, x);
}

bool ToyPolicy::finite() const {
  return all_finite(w_start) && all_finite(w_end) && all_finite(w_answer);
}

double policy_kl(const ToyPolicy& p, const ToyPolicy& q, const std::vector<double>& x) {
  return kl_categorical(p.start_logits(x), q.start_logits(x)) +
         kl_categorical(p.end_logits(x), q.end_logits(x)) +
         kl_categorical(p.answer_logits(x), q.answer_logits(x));
}

std::string answer_letter(int answer_id) {
  if (answer_id < 0 || answer_id >= 26) throw DataError("answer id out of letter range");
  return std::string(1, static_cast<char>('A' + answer_id));
}

std::string render_completion(const ToyAction& a, const ToyEnvConfig& cfg) {
  double start = a.start_bucket * cfg.bucket_seconds;
  double end = (a.end_bucket + 1) * cfg.bucket_seconds;
  return "<think>locating the event that answers the question</think><answer>from " +
         format_seconds(start) + " to " + format_seconds(end) +
         " seconds. Answer: " + answer_letter(a.answer_id) + "</answer>";
}

ToyRewardFn default_toy_reward() {
  reward::RewardWeights weights;
  auto dump = reward::AttentionDump::from_sums(1.0, 1.0);
  return [weights, dump](const SyntheticInstance& inst, const std::string& raw) {
    reward::GroundTruth gt{inst.gt_span, answer_letter(inst.gt_answer_id)};
    return reward::composite(reward::parse_response(raw), gt, dump, weights).total;
  };
}

double surrogate_value(const ToyPolicy& policy, const ToyPolicy& reference,
                       const SurrogatePoint& pt, const GrpoConfig& cfg) {
  if (pt.actions.size() != pt.logp_old.size() || pt.actions.size() != pt.advantages.size() ||
      pt.actions.empty()) {
    throw DataError("surrogate point lists must be non-empty and equal length");
  }
  auto lps = log_softmax(policy.start_logits(pt.features));
  auto lpe = log_softmax(policy.end_logits(pt.features));
  auto lpa = log_softmax(policy.answer_logits(pt.features));
  double value = 0.0;
  for (size_t k = 0; k < pt.actions.size(); ++k) {
    const auto& a = pt.actions[k];
    double lp_new = lps[a.start_bucket] + lpe[a.end_bucket] + lpa[a.answer_id];
    double ratio = std::exp(lp_new - pt.logp_old[k]);
    double term = ratio * pt.advantages[k];
    if (cfg.clip_ratios) {
      double clipped =
          std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * pt.advantages[k];
      term = std::min(term, clipped);
    }
    value += term;
  }
  if (cfg.beta != 0.0) value -= cfg.beta * policy_kl(policy, reference, pt.features);
  return value;
}

PolicyGrad surrogate_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                              const SurrogatePoint& pt, const GrpoConfig& cfg) {
  if (pt.actions.size() != pt.logp_old.size() || pt.actions.size() != pt.advantages.size() ||
      pt.actions.empty()) {
    throw DataError("surrogate point lists must be non-empty and equal length");
  }
  auto lps = log_softmax(policy.start_logits(pt.features));
  auto lpe = log_softmax(policy.end_logits(pt.features));
  auto lpa = log_softmax(policy.answer_logits(pt.features));
  auto ps = lps, pe = lpe, pa = lpa;
  for (double& v : ps) v = std::exp(v);
  for (double& v : pe) v = std::exp(v);
  for (double& v : pa) v = std::exp(v);
  auto lqs = log_softmax(reference.start_logits(pt.features));
  auto lqe = log_softmax(reference.end_logits(pt.features));
  auto lqa = log_softmax(reference.answer_logits(pt.features));

  const size_t g = pt.actions.size();
  std::vector<double> coeffs(g, 0.0);
  std::vector<int> pick_s(g), pick_e(g), pick_a(g);
  for (size_t k = 0; k < g; ++k) {
    const auto& a = pt.actions[k];
    pick_s[k] = a.start_bucket;
    pick_e[k] = a.end_bucket;
    pick_a[k] = a.answer_id;
    double lp_new = lps[a.start_bucket] + lpe[a.end_bucket] + lpa[a.answer_id];
    double ratio = std::exp(lp_new - pt.logp_old[k]);
    double coeff = ratio * pt.advantages[k];
    if (cfg.clip_ratios) {
      double clipped =
          std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * pt.advantages[k];
      if (coeff > clipped) coeff = 0.0;  // min() picked the saturated branch
    }
    coeffs[k] = coeff;
  }

  std::vector<double> gz_s(ps.size(), 0.0), gz_e(pe.size(), 0.0), gz_a(pa.size(), 0.0);
  add_head_gradient(ps, lps, lqs, coeffs, pick_s, cfg.beta, gz_s);
  add_head_gradient(pe, lpe, lqe, coeffs, pick_e, cfg.beta, gz_e);
  add_head_gradient(pa, lpa, lqa, coeffs, pick_a, cfg.beta, gz_a);

  PolicyGrad grad;
  grad.w_start.assign(policy.w_start.size(), 0.0);
  grad.w_end.assign(policy.w_end.size(), 0.0);
  grad.w_answer.assign(policy.w_answer.size(), 0.0);
  add_outer(grad.w_start, gz_s, pt.features, 1.0);
  add_outer(grad.w_end, gz_e, pt.features, 1.0);
  add_outer(grad.w_answer, gz_a, pt.features, 1.0);
  return grad;
}

std::pair<ToyPolicy, StepStats> grpo_step(const ToyPolicy& policy, const ToyPolicy& reference,
                                          const std::vector<SyntheticInstance>& batch,
                                          const GrpoConfig& cfg, const ToyRewardFn& reward_fn,
                                          std::uint64_t step_key) {
  if (batch.empty()) throw DataError("grpo_step needs a non-empty batch");
  if (cfg.group_size < 2) throw ConfigError("group_size must be at least 2");
  if (!policy.finite()) throw Error("policy parameters are not finite");
  const int g = cfg.group_size;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  // The generated completions use one bucket grid; recover its cell width
  // from the instance duration so rendering matches the generator.
  PolicyGrad acc;
  acc.w_start.assign(policy.w_start.size(), 0.0);
  acc.w_end.assign(policy.w_end.size(), 0.0);
  acc.w_answer.assign(policy.w_answer.size(), 0.0);
  double reward_sum = 0.0;
  double kl_sum = 0.0;

  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& inst = batch[i];
    ToyEnvConfig render_cfg;
    render_cfg.duration_buckets = policy.start_dim;
    render_cfg.bucket_seconds = inst.graph.duration_seconds() / policy.start_dim;
    render_cfg.answer_count = policy.answer_dim;

    auto lps = log_softmax(policy.start_logits(inst.features));
    auto lpe = log_softmax(policy.end_logits(inst.features));
    auto lpa = log_softmax(policy.answer_logits(inst.features));
    auto ps = lps, pe = lpe, pa = lpa;
    for (double& v : ps) v = std::exp(v);
    for (double& v : pe) v = std::exp(v);
    for (double& v : pa) v = std::exp(v);

    CounterRng rng(rng_key({step_key, static_cast<std::uint64_t>(i)}));
    SurrogatePoint pt;
    pt.features = inst.features;
    std::vector<double> rewards(static_cast<size_t>(g), 0.0);
    for (int k = 0; k < g; ++k) {
      ToyAction a{rng.categorical(ps), rng.categorical(pe), rng.categorical(pa)};
      pt.actions.push_back(a);
      pt.logp_old.push_back(lps[a.start_bucket] + lpe[a.end_bucket] + lpa[a.answer_id]);
      rewards[static_cast<size_t>(k)] = reward_fn(inst, render_completion(a, render_cfg));
      reward_sum += rewards[static_cast<size_t>(k)];
    }
    pt.advantages = normalize_group(rewards, cfg.std_epsilon);
    kl_sum += policy_kl(policy, reference, inst.features);

    PolicyGrad grad = surrogate_gradient(policy, reference, pt, cfg);
    for (size_t j = 0; j < acc.w_start.size(); ++j) acc.w_start[j] += grad.w_start[j] * inv_batch;
    for (size_t j = 0; j < acc.w_end.size(); ++j) acc.w_end[j] += grad.w_end[j] * inv_batch;
    for (size_t j = 0; j < acc.w_answer.size(); ++j) {
      acc.w_answer[j] += grad.w_answer[j] * inv_batch;
    }
  }

  if (!(all_finite(acc.w_start) && all_finite(acc.w_end) && all_finite(acc.w_answer))) {
    throw Error("non-finite gradient in grpo_step (beta=" + std::to_string(cfg.beta) +
                ", lr=" + std::to_string(cfg.learning_rate) + ")");
  }

  ToyPolicy next = policy;
  for (size_t j = 0; j < next.w_start.size(); ++j) {
    next.w_start[j] += cfg.learning_rate * acc.w_start[j];
  }
  for (size_t j = 0; j < next.w_end.size(); ++j) {
    next.w_end[j] += cfg.learning_rate * acc.w_end[j];
  }
  for (size_t j = 0; j < next.w_answer.size(); ++j) {
    next.w_answer[j] += cfg.learning_rate * acc.w_answer[j];
  }
  if (!next.finite()) {
    throw Error("policy left the finite range after an update (lr=" +
                std::to_string(cfg.learning_rate) + ")");
  }

  StepStats stats;
  stats.mean_reward = reward_sum / static_cast<double>(batch.size() * static_cast<size_t>(g));
  stats.mean_kl = kl_sum * inv_batch;
  return {std::move(next), stats};
}

void TrainToyConfig::check() const {
  grpo.check();
  env.check();
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (eval_instances < 1) throw ConfigError("eval_instances must be positive");
}

namespace {

int argmax_index(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

double eval_policy(const ToyPolicy& policy, const TrainToyConfig& cfg,
                   const ToyRewardFn& reward_fn) {
  double total = 0.0;
  for (int i = 0; i < cfg.eval_instances; ++i) {
    SyntheticInstance inst = gen_instance(
        rng_key({cfg.grpo.seed, kTagEvalInstance, static_cast<std::uint64_t>(i)}), cfg.env);
    ToyAction a{argmax_index(policy.start_logits(inst.features)),
                argmax_index(policy.end_logits(inst.features)),
                argmax_index(policy.answer_logits(inst.features))};
    total += reward_fn(inst, render_completion(a, cfg.env));
  }
  return total / static_cast<double>(cfg.eval_instances);
}

TrainReport train_toy(const TrainToyConfig& cfg) {
  cfg.check();
  ToyRewardFn reward_fn = default_toy_reward();
  ToyPolicy policy = ToyPolicy::zero(cfg.env);
  ToyPolicy reference = policy;

  TrainReport report;
  report.config = cfg;
  report.initial_eval = eval_policy(policy, cfg, reward_fn);

  for (int t = 0; t < cfg.grpo.iterations; ++t) {
    std::vector<SyntheticInstance> batch;
    batch.reserve(static_cast<size_t>(cfg.batch_size));
    for (int b = 0; b < cfg.batch_size; ++b) {
      batch.push_back(gen_instance(rng_key({cfg.grpo.seed, kTagTrainInstance,
                                            static_cast<std::uint64_t>(t),
                                            static_cast<std::uint64_t>(b)}),
                                   cfg.env));
    }
    try {
      auto [next, stats] = grpo_step(policy, reference, batch, cfg.grpo, reward_fn,
                                     rng_key({cfg.grpo.seed, kTagStep,
                                              static_cast<std::uint64_t>(t)}));
      policy = std::move(next);
      report.mean_reward.push_back(stats.mean_reward);
      report.mean_kl.push_back(stats.mean_kl);
    } catch (const ConfigError&) {
      throw;
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(t) + ": " + e.what());
    }
  }

  report.final_eval = cfg.grpo.iterations == 0 ? report.initial_eval
                                               : eval_policy(policy, cfg, reward_fn);
  return report;
}

namespace {

nlohmann::json grpo_to_json(const GrpoConfig& c) {
  return {{"group_size", c.group_size},   {"beta", c.beta},
          {"learning_rate", c.learning_rate}, {"iterations", c.iterations},
          {"seed", c.seed},               {"std_epsilon", c.std_epsilon},
          {"clip_ratios", c.clip_ratios}, {"clip_epsilon", c.clip_epsilon}};
}

nlohmann::json env_to_json(const ToyEnvConfig& c) {
  return {{"duration_buckets", c.duration_buckets},
          {"bucket_seconds", c.bucket_seconds},
          {"answer_count", c.answer_count},
          {"min_events", c.min_events},
          {"max_events", c.max_events}};
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
  for (auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&key](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError(std::string("unknown key in ") + where + ": " + key);
    }
  }
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for ") + key);
  }
}

}  // namespace

std::string train_config_to_json(const TrainToyConfig& cfg) {
  nlohmann::json j{{"grpo", grpo_to_json(cfg.grpo)},
                   {"env", env_to_json(cfg.env)},
                   {"batch_size", cfg.batch_size},
                   {"eval_instances", cfg.eval_instances}};
  return j.dump() + "\n";
}

TrainToyConfig train_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("train config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  reject_unknown(j, {"grpo", "env", "batch_size", "eval_instances"}, "train config");

  TrainToyConfig cfg;
  if (j.contains("grpo")) {
    const auto& g = j.at("grpo");
    reject_unknown(g,
                   {"group_size", "beta", "learning_rate", "iterations", "seed", "std_epsilon",
                    "clip_ratios", "clip_epsilon"},
                   "grpo config");
    read_field(g, "group_size", cfg.grpo.group_size);
    read_field(g, "beta", cfg.grpo.beta);
    read_field(g, "learning_rate", cfg.grpo.learning_rate);
    read_field(g, "iterations", cfg.grpo.iterations);
    read_field(g, "seed", cfg.grpo.seed);
    read_field(g, "std_epsilon", cfg.grpo.std_epsilon);
    read_field(g, "clip_ratios", cfg.grpo.clip_ratios);
    read_field(g, "clip_epsilon", cfg.grpo.clip_epsilon);
  }
  if (j.contains("env")) {
    const auto& e = j.at("env");
    reject_unknown(
        e, {"duration_buckets", "bucket_seconds", "answer_count", "min_events", "max_events"},
        "env config");
    read_field(e, "duration_buckets", cfg.env.duration_buckets);
    read_field(e, "bucket_seconds", cfg.env.bucket_seconds);
    read_field(e, "answer_count", cfg.env.answer_count);
    read_field(e, "min_events", cfg.env.min_events);
    read_field(e, "max_events", cfg.env.max_events);
  }
  read_field(j, "batch_size", cfg.batch_size);
  read_field(j, "eval_instances", cfg.eval_instances);
  cfg.check();
  return cfg;
}

std::string report_to_json(const TrainReport& report) {
  nlohmann::json j{{"config",
                    {{"grpo", grpo_to_json(report.config.grpo)},
                     {"env", env_to_json(report.config.env)},
                     {"batch_size", report.config.batch_size},
                     {"eval_instances", report.config.eval_instances}}},
                   {"initial_eval", report.initial_eval},
                   {"final_eval", report.final_eval},
                   {"mean_reward", report.mean_reward},
                   {"mean_kl", report.mean_kl}};
  return j.dump() + "\n";
}

}  // namespace evsg::grpo
