#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evsg/core/time_span.hpp"

namespace evsg::reward {

// Parsed model completion: the raw text plus whatever could be extracted
// from it. pred_span / pred_answer stay absent when the answer block does
// not contain them (or the span is degenerate); missing fields simply score
// zero downstream.
struct ModelOutput {
  std::string raw_text;
  std::string think_text;
  std::optional<TimeSpan> pred_span;
  std::optional<std::string> pred_answer;
};

struct GroundTruth {
  TimeSpan gt_span;
  std::string gt_answer;
};

// Attention mass grouped over video tokens vs graph-text tokens. Either the
// two group sums directly, or a full row-major matrix (rows = response
// tokens, columns = context tokens) with 0-based index lists selecting the
// response rows and the video/graph column groups.
class AttentionDump {
 public:
  static AttentionDump from_sums(double sum_vid, double sum_graph);
  static AttentionDump from_matrix(int rows, int cols, std::vector<double> values,
                                   std::vector<int> t_res, std::vector<int> t_vid,
                                   std::vector<int> t_graph);

  // (video mass, graph mass), restricted to the response rows for matrices.
  std::pair<double, double> group_sums() const;

  bool has_matrix() const { return !values_.empty(); }

  // Multiplies every matrix entry (or both sums) by c > 0.
  AttentionDump scaled(double c) const;

  // Dump file payload: either {"sum_graph", "sum_vid"} or
  // {"cols", "rows", "t_graph", "t_res", "t_vid", "values"}.
  static AttentionDump from_json(const std::string& text);
  std::string to_json() const;

 private:
  AttentionDump() = default;

  double sum_vid_ = 0.0;
  double sum_graph_ = 0.0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
  std::vector<int> t_res_, t_vid_, t_graph_;
};

struct RewardWeights {
  double alpha = 0.3;        // r_acc mix: alpha*sim + (1-alpha)*tiou
  double lambda_acc = 0.7;
  double lambda_form = 0.3;
  double lambda_attn = 0.6;
  double gate_sim = 0.4;     // attention credit needs sim >= gate_sim
  double gate_tiou = 0.3;    // ... and tiou >= gate_tiou (both inclusive)

  // Throws ConfigError when out of range (alpha and gates in [0,1],
  // lambdas non-negative).
  void check() const;
};

struct RewardBreakdown {
  double r_sim = 0.0;
  double r_tiou = 0.0;
  double r_acc = 0.0;
  double r_form = 0.0;
  double r_attn_raw = 0.0;
  double r_attn_gated = 0.0;
  double total = 0.0;
};

// Interval intersection-over-union; absent prediction scores 0.
double t_iou(const TimeSpan& pred, const TimeSpan& gt);
double t_iou(const std::optional<TimeSpan>& pred, const TimeSpan& gt);

// Pluggable answer-similarity scorer contract: [0,1], higher is closer.
using SimilarityScorer = std::function<double(const std::string& pred, const std::string& gt)>;

// Default scorer: bag-of-token F1 over lowercase alphanumeric tokens.
double token_f1(const std::string& pred, const std::string& gt);

// Similarity with absent-prediction handling; empty scorer means token_f1.
double sim(const std::optional<std::string>& pred_answer, const std::string& gt_answer,
           const SimilarityScorer& scorer = {});

double r_acc(const ModelOutput& output, const GroundTruth& gt, const RewardWeights& weights,
             const SimilarityScorer& scorer = {});

// 1 iff the text is exactly <think>...</think><answer>...</answer> with
// nothing but whitespace around or between the two blocks.
int r_form(const std::string& raw_text);

// Video share of response attention: vid / (vid + graph). Both masses
// zero is defined as 0 (no grounding signal at all).
double r_attn(const AttentionDump& dump);

double gated_attn(double r_attn_raw, double r_sim, double r_tiou, const RewardWeights& weights);

RewardBreakdown composite(const ModelOutput& output, const GroundTruth& gt,
                          const AttentionDump& dump, const RewardWeights& weights,
                          const SimilarityScorer& scorer = {});

// Pulls the think/answer blocks out of a completion, then parses
// "from <x> to <y> seconds" and "Answer: <text>" inside the answer block.
// Total function: whatever does not match is left absent.
ModelOutput parse_response(const std::string& raw_text);

}  // namespace evsg::reward
