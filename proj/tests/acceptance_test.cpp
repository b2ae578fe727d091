// Acceptance gate: ten independent checks, one line of output each, nonzero
// exit if any fails. Every check carries its own time budget; the numeric
// tolerances are stated inline next to the asserts they guard.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evsg/core/errors.hpp"
#include "evsg/core/graph.hpp"
#include "evsg/core/serialize.hpp"
#include "evsg/core/time_span.hpp"
#include "evsg/core/triplet.hpp"
#include "evsg/eval/metrics.hpp"
#include "evsg/grpo/grpo.hpp"
#include "evsg/grpo/rng.hpp"
#include "evsg/grpo/toy.hpp"
#include "evsg/mllm/mock.hpp"
#include "evsg/pipeline/captions.hpp"
#include "evsg/pipeline/constraints.hpp"
#include "evsg/pipeline/graph_gen.hpp"
#include "evsg/pipeline/lexicon.hpp"
#include "evsg/reward/reward.hpp"
#include "support/scenario.hpp"

namespace fs = std::filesystem;
using namespace evsg;

namespace {

// Default-run eval rewards, calibrated once and frozen. The trainer is
// bit-deterministic, so any drift here is a behavior change, not noise.
constexpr double kFrozenInitialEval = 0.3582812500000004;
constexpr double kFrozenFinalEval = 1.2770312499999987;

void need(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

fs::path work_dir(const std::string& leaf) {
  fs::path dir = fs::path(EVSG_BINARY_DIR) / "acceptance" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---- 1: composite reward constants and attention gating ----

void check_reward_constants() {
  reward::RewardWeights weights;
  reward::GroundTruth gt{TimeSpan::of_seconds(2.0, 8.0), "bench"};
  reward::ModelOutput perfect = reward::parse_response(
      "<think>the span and answer are both certain</think>"
      "<answer>from 2.0 to 8.0 seconds. Answer: bench</answer>");
  reward::RewardBreakdown b = reward::composite(
      perfect, gt, reward::AttentionDump::from_sums(0.5, 0.5), weights);
  need(b.r_sim == 1.0 && b.r_tiou == 1.0 && b.r_form == 1.0,
       "perfect output must score 1 on every component");
  need(b.r_attn_raw == 0.5 && b.r_attn_gated == 0.5,
       "balanced attention must score exactly 0.5");
  need(std::abs(b.total - 1.3) < 1e-12,
       "perfect total " + fmt(b.total) + " not within 1e-12 of 1.3");

  // sim passes its gate, tiou misses its own: the attention term must
  // contribute exactly nothing.
  reward::GroundTruth gate_gt{TimeSpan::of_seconds(0.0, 10.0), "bench park"};
  reward::ModelOutput partial = reward::parse_response(
      "<think>rough guess</think>"
      "<answer>from 0.0 to 2.0 seconds. Answer: bench red</answer>");
  reward::RewardBreakdown g = reward::composite(
      partial, gate_gt, reward::AttentionDump::from_sums(1.0, 0.0), weights);
  need(g.r_sim == 0.5, "gating fixture sim expected 0.5, got " + fmt(g.r_sim));
  need(g.r_tiou == 0.2, "gating fixture tiou expected 0.2, got " + fmt(g.r_tiou));
  need(g.r_attn_raw == 1.0 && g.r_attn_gated == 0.0,
       "attention must gate to zero when tiou misses the threshold");
  need(g.total == weights.lambda_acc * g.r_acc + weights.lambda_form * g.r_form,
       "gated total must carry no attention contribution at all");
  need(std::abs(g.total - 0.503) < 1e-12,
       "gating fixture total " + fmt(g.total) + " not within 1e-12 of 0.503");
}

// ---- 2: temporal IoU against a grid-counting oracle ----

void check_tiou_oracle() {
  grpo::CounterRng rng(grpo::rng_key({2026, 2}));
  const double step = 1e-4;
  double max_err = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::int64_t a0 = rng.uniform_int(0, 58);
    std::int64_t a1 = a0 + rng.uniform_int(1, 59 - static_cast<int>(a0));
    std::int64_t b0 = rng.uniform_int(0, 58);
    std::int64_t b1 = b0 + rng.uniform_int(1, 59 - static_cast<int>(b0));
    TimeSpan a = TimeSpan::of_tenths(a0, a1);
    TimeSpan b = TimeSpan::of_tenths(b0, b1);

    double w0 = std::min(a.start_seconds(), b.start_seconds());
    double w1 = std::max(a.end_seconds(), b.end_seconds());
    long n = std::lround((w1 - w0) / step);
    long inter = 0, uni = 0;
    for (long k = 0; k < n; ++k) {
      double x = w0 + (static_cast<double>(k) + 0.5) * step;
      bool in_a = x >= a.start_seconds() && x < a.end_seconds();
      bool in_b = x >= b.start_seconds() && x < b.end_seconds();
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
    double oracle = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    max_err = std::max(max_err, std::abs(reward::t_iou(a, b) - oracle));
  }
  need(max_err < 1e-3, "max |t_iou - grid oracle| = " + fmt(max_err) + " >= 1e-3");
}

// ---- 3: group advantage normalization properties ----

void check_advantage_normalization() {
  grpo::CounterRng rng(grpo::rng_key({2026, 3}));
  for (int trial = 0; trial < 1000; ++trial) {
    int g = rng.uniform_int(2, 64);
    std::vector<double> rewards(static_cast<size_t>(g));
    bool constant = trial % 5 == 0;
    double base = rng.uniform() * 1.3;
    for (double& r : rewards) r = constant ? base : rng.uniform() * 1.3;

    std::vector<double> adv = grpo::normalize_group(rewards);
    if (constant) {
      for (double a : adv) need(a == 0.0, "constant group must yield all-zero advantages");
      continue;
    }
    double mean = 0.0, sq = 0.0;
    for (double a : adv) mean += a;
    mean /= g;
    for (double a : adv) sq += (a - mean) * (a - mean);
    double stdev = std::sqrt(sq / g);
    need(std::abs(mean) < 1e-9, "advantage mean " + fmt(mean) + " out of tolerance");
    need(std::abs(stdev - 1.0) < 1e-9, "advantage std " + fmt(stdev) + " not 1 within 1e-9");
  }
}

// ---- 4: policy gradient against finite differences ----

void fill_policy(grpo::ToyPolicy& p, std::uint64_t seed) {
  grpo::CounterRng rng(grpo::rng_key({seed, 0x77u}));
  for (auto* w : {&p.w_start, &p.w_end, &p.w_answer}) {
    for (double& v : *w) v = rng.uniform() * 0.8 - 0.4;
  }
}

grpo::SurrogatePoint sampled_point(const grpo::ToyPolicy& sampler,
                                   const grpo::SyntheticInstance& inst, int g,
                                   std::uint64_t key) {
  grpo::SurrogatePoint pt;
  pt.features = inst.features;
  auto lps = grpo::log_softmax(sampler.start_logits(inst.features));
  auto lpe = grpo::log_softmax(sampler.end_logits(inst.features));
  auto lpa = grpo::log_softmax(sampler.answer_logits(inst.features));
  auto ps = lps, pe = lpe, pa = lpa;
  for (double& v : ps) v = std::exp(v);
  for (double& v : pe) v = std::exp(v);
  for (double& v : pa) v = std::exp(v);
  grpo::CounterRng rng(grpo::rng_key({key, 0x78u}));
  std::vector<double> rewards;
  for (int k = 0; k < g; ++k) {
    grpo::ToyAction a{rng.categorical(ps), rng.categorical(pe), rng.categorical(pa)};
    pt.actions.push_back(a);
    pt.logp_old.push_back(lps[a.start_bucket] + lpe[a.end_bucket] + lpa[a.answer_id]);
    rewards.push_back(rng.uniform() * 1.3);
  }
  pt.advantages = grpo::normalize_group(rewards);
  return pt;
}

void check_gradient() {
  grpo::ToyEnvConfig env;
  grpo::CounterRng rng(grpo::rng_key({2026, 4}));
  const double h = 1e-6;
  double max_diff = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uint64_t block = static_cast<std::uint64_t>(trial / 10);
    grpo::SyntheticInstance inst = grpo::gen_instance(4000 + block, env);
    grpo::ToyPolicy sampler = grpo::ToyPolicy::zero(env);
    fill_policy(sampler, 100 + block);
    grpo::ToyPolicy policy = sampler;
    fill_policy(policy, 200 + block);  // off-policy point, ratios != 1
    grpo::ToyPolicy reference = grpo::ToyPolicy::zero(env);
    grpo::SurrogatePoint pt = sampled_point(sampler, inst, 8, 300 + block);

    grpo::GrpoConfig cfg;
    cfg.clip_ratios = trial % 2 == 1;
    grpo::PolicyGrad grad = grpo::surrogate_gradient(policy, reference, pt, cfg);

    int head = rng.uniform_int(0, 2);
    std::vector<double>* w =
        head == 0 ? &policy.w_start : (head == 1 ? &policy.w_end : &policy.w_answer);
    const std::vector<double>& g =
        head == 0 ? grad.w_start : (head == 1 ? grad.w_end : grad.w_answer);
    int j = rng.uniform_int(0, static_cast<int>(w->size()) - 1);
    double saved = (*w)[j];
    (*w)[j] = saved + h;
    double up = grpo::surrogate_value(policy, reference, pt, cfg);
    (*w)[j] = saved - h;
    double down = grpo::surrogate_value(policy, reference, pt, cfg);
    (*w)[j] = saved;
    max_diff = std::max(max_diff, std::abs((up - down) / (2 * h) - g[j]));
  }
  need(max_diff < 1e-5, "max |analytic - FD| = " + fmt(max_diff) + " >= 1e-5");
}

// ---- 5: toy trainer convergence and KL pinning ----

void check_convergence() {
  grpo::TrainToyConfig cfg;  // the default seeded run
  grpo::TrainReport report = grpo::train_toy(cfg);
  need(report.initial_eval > 0.0, "initial eval must be positive");
  double ratio = report.final_eval / report.initial_eval;
  need(ratio >= 3.0, "final/initial eval ratio " + fmt(ratio) + " below 3");
  need(report.initial_eval == kFrozenInitialEval,
       "initial eval drifted from the frozen baseline: " + fmt(report.initial_eval));
  need(report.final_eval == kFrozenFinalEval,
       "final eval drifted from the frozen baseline: " + fmt(report.final_eval));

  // A huge KL weight must hold the policy at its reference. The learning
  // rate shrinks with beta so the pinned objective stays in SGD's stable
  // region (at lr 0.05 a 1e4-weighted penalty oscillates instead).
  grpo::TrainToyConfig pin;
  pin.grpo.beta = 1e4;
  pin.grpo.learning_rate = 5e-5;
  grpo::ToyPolicy policy = grpo::ToyPolicy::zero(pin.env);
  grpo::ToyPolicy reference = policy;
  grpo::ToyRewardFn fn = grpo::default_toy_reward();
  for (int t = 0; t < 100; ++t) {
    std::vector<grpo::SyntheticInstance> batch;
    for (int b = 0; b < pin.batch_size; ++b) {
      batch.push_back(grpo::gen_instance(
          grpo::rng_key({5, 0xB1u, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(b)}),
          pin.env));
    }
    auto [next, stats] = grpo::grpo_step(policy, reference, batch, pin.grpo, fn,
                                         grpo::rng_key({5, 0xB2u, static_cast<std::uint64_t>(t)}));
    policy = std::move(next);
  }
  double kl = 0.0;
  for (int i = 0; i < 32; ++i) {
    kl += grpo::policy_kl(policy, reference, grpo::gen_instance(5000 + i, pin.env).features);
  }
  kl /= 32;
  need(kl < 0.01, "KL to reference after 100 pinned steps is " + fmt(kl));
}

// ---- 6: event graph edges, acyclicity, round-trip ----

EventGraph random_graph(grpo::CounterRng& rng, int id) {
  static const std::vector<std::string> subs = {"man", "woman", "dog", "child"};
  static const std::vector<std::string> rels = {"holds", "sits_on", "walks_to",
                                                "looks_at", "opens", "rides"};
  static const std::vector<std::string> objs = {"cup", "bench", "door", "book", "bike"};
  int n = rng.uniform_int(1, 10);
  std::vector<EventSubgraph> events;
  for (int i = 0; i < n; ++i) {
    std::int64_t s = rng.uniform_int(0, 580);
    std::int64_t e = s + rng.uniform_int(1, static_cast<int>(std::min<std::int64_t>(60, 600 - s)));
    EventSubgraph ev;
    ev.span = TimeSpan::of_tenths(s, e);
    int t_count = rng.uniform_int(0, 3);
    for (int t = 0; t < t_count; ++t) {
      ev.triplets.push_back(Triplet::make(subs[rng.uniform_int(0, (int)subs.size() - 1)],
                                          rels[rng.uniform_int(0, (int)rels.size() - 1)],
                                          objs[rng.uniform_int(0, (int)objs.size() - 1)]));
    }
    events.push_back(std::move(ev));
  }
  return build_graph("g" + std::to_string(id), 60.0, std::move(events));
}

void check_graph_structure() {
  grpo::CounterRng rng(grpo::rng_key({2026, 6}));
  for (int trial = 0; trial < 1000; ++trial) {
    EventGraph g = random_graph(rng, trial);

    EdgeSet expected;
    for (const auto& a : g.events) {
      for (const auto& b : g.events) {
        if (a.index != b.index && a.span.end_tenths() <= b.span.start_tenths()) {
          expected.insert({a.index, b.index});
        }
      }
    }
    need(g.edges == expected, "edge set differs from the all-pairs predicate");
    for (const auto& [i, j] : g.edges) {
      need(i < j, "edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " breaks the forward ordering (cycle risk)");
    }

    std::string text = serialize(g);
    EventGraph back = parse_graph(text);
    need(back == g, "parse(serialize(g)) != g");
    need(serialize(back) == text, "serialization round-trip is not byte-identical");
  }
}

// ---- 7: mock pipeline determinism against goldens ----

std::array<std::string, 4> run_mock_pipeline(const fs::path& mock_dir,
                                             const pipeline::CaptionLimits& limits) {
  mllm::ScriptedMockClient client(mock_dir);
  pipeline::PipelineConfig cfg = scenario::config(limits);
  pipeline::VideoRef video = scenario::video();
  pipeline::MultiGrainedCaptions caps = pipeline::generate_captions(client, video, cfg);
  auto [g_init, warnings] = pipeline::generate_initial_graph(client, video, caps.middle, cfg);
  auto lexicon = pipeline::ConstraintLexicon::load(fs::path(EVSG_SOURCE_DIR) / "data/lexicon.txt");
  auto [g_refined, log] =
      pipeline::refine_graph(client, video, g_init, caps.coarse, caps.fine, lexicon, cfg);
  return {pipeline::captions_to_json(caps), serialize(g_init), serialize(g_refined),
          log.to_json()};
}

void check_pipeline_determinism() {
  fs::path mock_dir = work_dir("determinism");
  scenario::populate_mock(mock_dir, scenario::config());
  std::array<std::string, 4> first = run_mock_pipeline(mock_dir, {});
  std::array<std::string, 4> second = run_mock_pipeline(mock_dir, {});
  static const std::array<const char*, 4> golden_names = {"captions.json", "graph_init.json",
                                                          "graph_refined.json", "refine_log.json"};
  fs::path golden_dir = fs::path(EVSG_SOURCE_DIR) / "tests/fixtures/golden/demo";
  for (size_t i = 0; i < first.size(); ++i) {
    need(first[i] == second[i],
         std::string(golden_names[i]) + " differs between two identical runs");
    need(first[i] == scenario::read_file(golden_dir / golden_names[i]),
         std::string(golden_names[i]) + " differs from the checked-in golden");
  }
}

// ---- 8: metrics fixture and brute-force equivalence ----

eval::MetricsReport brute_force_metrics(const std::vector<eval::PredictionRecord>& records) {
  eval::MetricsReport rep;
  rep.n_samples = static_cast<int>(records.size());
  std::vector<double> ious;
  for (const auto& rec : records) {
    if (!rec.pred_span.has_value()) {
      ious.push_back(0.0);
      continue;
    }
    std::int64_t inter = std::max<std::int64_t>(
        0, std::min(rec.pred_span->end_tenths(), rec.gt_span.end_tenths()) -
               std::max(rec.pred_span->start_tenths(), rec.gt_span.start_tenths()));
    std::int64_t uni = (rec.pred_span->end_tenths() - rec.pred_span->start_tenths()) +
                       (rec.gt_span.end_tenths() - rec.gt_span.start_tenths()) - inter;
    ious.push_back(static_cast<double>(inter) / static_cast<double>(uni));
  }
  double sum = 0.0;
  for (double v : ious) sum += v;
  rep.miou = sum / rep.n_samples;
  int h3 = 0, h5 = 0, c = 0, j = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    if (ious[i] >= 0.3) ++h3;
    if (ious[i] >= 0.5) ++h5;
    if (records[i].answer_correct) ++c;
    if (records[i].answer_correct && ious[i] >= 0.5) ++j;
  }
  rep.r1_at_03 = static_cast<double>(h3) / rep.n_samples;
  rep.r1_at_05 = static_cast<double>(h5) / rep.n_samples;
  rep.accuracy = static_cast<double>(c) / rep.n_samples;
  rep.acc_at_iou05 = static_cast<double>(j) / rep.n_samples;
  return rep;
}

void check_metrics() {
  auto records =
      eval::load_predictions(fs::path(EVSG_SOURCE_DIR) / "tests/fixtures/eval/predictions.jsonl");
  eval::MetricsReport rep = eval::compute_metrics(records);
  need(rep.n_samples == 4, "fixture must carry exactly 4 records");
  need(rep.miou == 0.5, "fixture mIoU expected 0.5, got " + fmt(rep.miou));
  need(rep.r1_at_03 == 0.75, "fixture R1@0.3 expected 0.75, got " + fmt(rep.r1_at_03));
  need(rep.r1_at_05 == 0.5, "fixture R1@0.5 expected 0.5, got " + fmt(rep.r1_at_05));
  need(rep.accuracy == 0.75, "fixture accuracy expected 0.75, got " + fmt(rep.accuracy));
  need(rep.acc_at_iou05 == 0.5, "fixture Acc@0.5 expected 0.5, got " + fmt(rep.acc_at_iou05));

  grpo::CounterRng rng(grpo::rng_key({2026, 8}));
  for (int trial = 0; trial < 100; ++trial) {
    int n = rng.uniform_int(1, 40);
    std::vector<eval::PredictionRecord> recs;
    for (int i = 0; i < n; ++i) {
      eval::PredictionRecord r;
      r.id = "r" + std::to_string(i);
      std::int64_t gs = rng.uniform_int(0, 400);
      r.gt_span = TimeSpan::of_tenths(gs, gs + rng.uniform_int(1, 100));
      if (rng.uniform() < 0.8) {
        std::int64_t ps = rng.uniform_int(0, 400);
        r.pred_span = TimeSpan::of_tenths(ps, ps + rng.uniform_int(1, 100));
      }
      r.answer_correct = rng.uniform() < 0.5;
      recs.push_back(std::move(r));
    }
    eval::MetricsReport got = eval::compute_metrics(recs);
    eval::MetricsReport want = brute_force_metrics(recs);
    need(got.miou == want.miou && got.r1_at_03 == want.r1_at_03 &&
             got.r1_at_05 == want.r1_at_05 && got.accuracy == want.accuracy &&
             got.acc_at_iou05 == want.acc_at_iou05 && got.n_samples == want.n_samples,
         "metrics disagree with the brute-force oracle on a random set");
  }
}

// ---- 9: constraint rules and idempotence ----

EventSubgraph make_event(double start, double end, std::vector<Triplet> triplets) {
  EventSubgraph ev;
  ev.span = TimeSpan::of_seconds(start, end);
  ev.triplets = std::move(triplets);
  return ev;
}

void check_constraints() {
  auto lexicon = pipeline::ConstraintLexicon::load(fs::path(EVSG_SOURCE_DIR) / "data/lexicon.txt");

  // Mutual exclusion within one event keeps the earlier-listed triplet.
  EventGraph excl = build_graph(
      "excl", 15.0,
      {make_event(0, 5, {Triplet::make("man", "sits_on", "bench"),
                         Triplet::make("man", "stands_on", "bench")}),
       make_event(5, 10, {Triplet::make("dog", "runs_to", "door")}),
       make_event(10, 15, {Triplet::make("man", "walks_to", "door")})});
  auto [excl_out, excl_rep] = pipeline::apply_constraints(excl, lexicon, false);
  need(excl_out.events[0].triplets ==
           std::vector<Triplet>{Triplet::make("man", "sits_on", "bench")},
       "exclusion pass must keep only the earlier-listed relation");
  need(excl_rep.removed.size() == 1 && excl_rep.removed[0].note == "mutual-exclusion",
       "exclusion pass must log one mutual-exclusion removal");
  need(excl_rep.violations.size() == 1 && excl_rep.violations[0].rule == "mutual-exclusion",
       "exclusion pass must report one mutual-exclusion violation");
  need(excl_out.edges == excl.edges && excl_out.events[1] == excl.events[1],
       "exclusion pass must not touch spans, edges, or other events");

  // A prerequisite showing up after its consequent is reported, not edited.
  EventGraph causal = build_graph(
      "causal", 15.0,
      {make_event(0, 5, {Triplet::make("man", "puts_down", "book")}),
       make_event(5, 10, {Triplet::make("dog", "runs_to", "door")}),
       make_event(10, 15, {Triplet::make("man", "picks_up", "book")})});
  auto [causal_out, causal_rep] = pipeline::apply_constraints(causal, lexicon, false);
  need(causal_out == causal, "causal-order pass must never mutate the graph");
  need(causal_rep.violations.size() == 1 && causal_rep.violations[0].rule == "causal-order",
       "causal-order pass must report exactly one violation");

  // A state flows into the next event until something terminates it.
  EventGraph prop = build_graph(
      "prop", 15.0,
      {make_event(0, 5, {Triplet::make("man", "sits_on", "bench")}),
       make_event(5, 10, {Triplet::make("man", "opens", "door")}),
       make_event(10, 15, {Triplet::make("man", "walks_away_from", "bench")})});
  auto [prop_out, prop_rep] = pipeline::apply_constraints(prop, lexicon, true);
  auto has = [](const EventSubgraph& ev, const Triplet& t) {
    return std::find(ev.triplets.begin(), ev.triplets.end(), t) != ev.triplets.end();
  };
  Triplet sits = Triplet::make("man", "sits_on", "bench");
  need(has(prop_out.events[1], sits), "state must propagate into the following event");
  need(!has(prop_out.events[2], sits), "a terminating relation must stop the propagation");
  need(prop_rep.added.size() == 1 && prop_rep.added[0].note == "propagation",
       "propagation must log exactly one addition");

  // Idempotence on 500 random graphs: the second pass changes nothing.
  grpo::CounterRng rng(grpo::rng_key({2026, 9}));
  static const std::vector<std::string> rels = {
      "sits_on", "stands_on", "holds",    "puts_down",       "picks_up", "walks_to",
      "opens",   "closes",    "looks_at", "walks_away_from", "rides",    "mounts"};
  static const std::vector<std::string> subs = {"man", "woman", "dog", "child"};
  static const std::vector<std::string> objs = {"bench", "book", "cup", "door", "bike"};
  for (int trial = 0; trial < 500; ++trial) {
    int n = rng.uniform_int(1, 6);
    std::vector<EventSubgraph> events;
    for (int i = 0; i < n; ++i) {
      std::int64_t s = 20 * i;
      EventSubgraph ev;
      ev.span = TimeSpan::of_tenths(s, s + rng.uniform_int(5, 15));
      int t_count = rng.uniform_int(1, 4);
      for (int t = 0; t < t_count; ++t) {
        ev.triplets.push_back(Triplet::make(subs[rng.uniform_int(0, (int)subs.size() - 1)],
                                            rels[rng.uniform_int(0, (int)rels.size() - 1)],
                                            objs[rng.uniform_int(0, (int)objs.size() - 1)]));
      }
      events.push_back(std::move(ev));
    }
    EventGraph g = build_graph("rand" + std::to_string(trial), 12.0 + 2.0 * n,
                               std::move(events));
    auto [once, rep1] = pipeline::apply_constraints(g, lexicon);
    auto [twice, rep2] = pipeline::apply_constraints(once, lexicon);
    need(twice == once, "second constraint pass changed a graph");
    need(rep2.removed.empty() && rep2.added.empty(),
         "second constraint pass logged removals or additions");
  }
}

// ---- 10: caption segment caps across limit configs ----

void check_caption_limits() {
  static const std::array<pipeline::CaptionLimits, 3> configs = {
      pipeline::CaptionLimits{3, 5, 7}, pipeline::CaptionLimits{5, 10, 15},
      pipeline::CaptionLimits{10, 15, 20}};
  for (const auto& limits : configs) {
    fs::path mock_dir = work_dir("limits_" + std::to_string(limits.coarse));
    scenario::populate_mock(mock_dir, scenario::config(limits));
    mllm::ScriptedMockClient client(mock_dir);
    pipeline::PipelineConfig cfg = scenario::config(limits);
    pipeline::MultiGrainedCaptions caps =
        pipeline::generate_captions(client, scenario::video(), cfg);
    std::string tag = std::to_string(limits.coarse) + "/" + std::to_string(limits.middle) +
                      "/" + std::to_string(limits.fine);
    need(static_cast<int>(caps.coarse.segments.size()) <= limits.coarse,
         "coarse segment count over the cap under limits " + tag);
    need(static_cast<int>(caps.middle.segments.size()) <= limits.middle,
         "middle segment count over the cap under limits " + tag);
    need(static_cast<int>(caps.fine.segments.size()) <= limits.fine,
         "fine segment count over the cap under limits " + tag);
    need(caps.coarse.limit == limits.coarse && caps.middle.limit == limits.middle &&
             caps.fine.limit == limits.fine,
         "parsed caption sets must carry their configured limits");
  }
}

struct Criterion {
  const char* label;
  double budget_seconds;
  void (*body)();
};

}  // namespace

int main() {
  const std::array<Criterion, 10> criteria = {{
      {"composite reward constants and attention gating", 1.0, check_reward_constants},
      {"temporal IoU against a grid-counting oracle", 10.0, check_tiou_oracle},
      {"group advantage normalization properties", 5.0, check_advantage_normalization},
      {"policy gradient against finite differences", 30.0, check_gradient},
      {"toy trainer convergence and KL pinning", 120.0, check_convergence},
      {"event graph edges, acyclicity, round-trip", 10.0, check_graph_structure},
      {"mock pipeline determinism against goldens", 5.0, check_pipeline_determinism},
      {"metrics fixture and brute-force equivalence", 5.0, check_metrics},
      {"constraint rules and idempotence", 5.0, check_constraints},
      {"caption segment caps across limit configs", 5.0, check_caption_limits},
  }};

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (error.empty() && elapsed >= c.budget_seconds) {
      std::ostringstream msg;
      msg << "exceeded the " << c.budget_seconds << " s budget";
      error = msg.str();
    }
    if (error.empty()) {
      std::printf("PASS %2zu  %s (%.2f s)\n", i + 1, c.label, elapsed);
    } else {
      std::printf("FAIL %2zu  %s (%.2f s)\n         %s\n", i + 1, c.label, elapsed,
                  error.c_str());
      ++failures;
    }
  }
  std::printf("acceptance: %d/10 passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
