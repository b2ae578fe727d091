#include "evsg/reward/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <set>

#include "evsg/core/errors.hpp"
#include "json.hpp"

namespace evsg::reward {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void check_index_list(const std::vector<int>& idx, int bound, const char* name) {
  std::set<int> seen;
  for (int i : idx) {
    if (i < 0 || i >= bound) {
      throw DataError(std::string("attention index out of range in ") + name + ": " +
                      std::to_string(i));
    }
    if (!seen.insert(i).second) {
      throw DataError(std::string("duplicate attention index in ") + name + ": " +
                      std::to_string(i));
    }
  }
}

}  // namespace

AttentionDump AttentionDump::from_sums(double sum_vid, double sum_graph) {
  if (!finite_nonneg(sum_vid) || !finite_nonneg(sum_graph)) {
    throw DataError("attention sums must be finite and non-negative");
  }
  AttentionDump d;
  d.sum_vid_ = sum_vid;
  d.sum_graph_ = sum_graph;
  return d;
}

AttentionDump AttentionDump::from_matrix(int rows, int cols, std::vector<double> values,
                                         std::vector<int> t_res, std::vector<int> t_vid,
                                         std::vector<int> t_graph) {
  if (rows <= 0 || cols <= 0) throw DataError("attention matrix dims must be positive");
  if (values.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    throw DataError("attention matrix has " + std::to_string(values.size()) +
                    " values, expected " + std::to_string(rows * cols));
  }
  for (double v : values) {
    if (!finite_nonneg(v)) throw DataError("attention entries must be finite and non-negative");
  }
  check_index_list(t_res, rows, "t_res");
  check_index_list(t_vid, cols, "t_vid");
  check_index_list(t_graph, cols, "t_graph");
  std::set<int> vid(t_vid.begin(), t_vid.end());
  for (int c : t_graph) {
    if (vid.count(c)) {
      throw DataError("t_vid and t_graph overlap at column " + std::to_string(c));
    }
  }
  AttentionDump d;
  d.rows_ = rows;
  d.cols_ = cols;
  d.values_ = std::move(values);
  d.t_res_ = std::move(t_res);
  d.t_vid_ = std::move(t_vid);
  d.t_graph_ = std::move(t_graph);
  return d;
}

std::pair<double, double> AttentionDump::group_sums() const {
  if (!has_matrix()) return {sum_vid_, sum_graph_};
  double vid = 0.0, graph = 0.0;
  for (int r : t_res_) {
    const double* row = values_.data() + static_cast<size_t>(r) * cols_;
    for (int c : t_vid_) vid += row[c];
    for (int c : t_graph_) graph += row[c];
  }
  return {vid, graph};
}

AttentionDump AttentionDump::scaled(double c) const {
  if (!(std::isfinite(c) && c > 0.0)) throw DataError("attention scale must be positive");
  AttentionDump d = *this;
  d.sum_vid_ *= c;
  d.sum_graph_ *= c;
  for (double& v : d.values_) v *= c;
  return d;
}

AttentionDump AttentionDump::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("attention dump is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("attention dump must be a JSON object");
  if (j.contains("sum_vid") || j.contains("sum_graph")) {
    for (auto& [key, _] : j.items()) {
      if (key != "sum_vid" && key != "sum_graph") {
        throw DataError("unexpected key in attention sums: " + key);
      }
    }
    if (!j.contains("sum_vid") || !j.contains("sum_graph")) {
      throw DataError("attention sums need both sum_vid and sum_graph");
    }
    return from_sums(j["sum_vid"].get<double>(), j["sum_graph"].get<double>());
  }
  for (const char* key : {"rows", "cols", "values", "t_res", "t_vid", "t_graph"}) {
    if (!j.contains(key)) throw DataError(std::string("attention matrix missing key: ") + key);
  }
  for (auto& [key, _] : j.items()) {
    if (key != "rows" && key != "cols" && key != "values" && key != "t_res" &&
        key != "t_vid" && key != "t_graph") {
      throw DataError("unexpected key in attention matrix: " + key);
    }
  }
  try {
    return from_matrix(j["rows"].get<int>(), j["cols"].get<int>(),
                       j["values"].get<std::vector<double>>(),
                       j["t_res"].get<std::vector<int>>(), j["t_vid"].get<std::vector<int>>(),
                       j["t_graph"].get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("attention matrix field has wrong type: ") + e.what());
  }
}

std::string AttentionDump::to_json() const {
  nlohmann::json j;
  if (has_matrix()) {
    j["rows"] = rows_;
    j["cols"] = cols_;
    j["values"] = values_;
    j["t_res"] = t_res_;
    j["t_vid"] = t_vid_;
    j["t_graph"] = t_graph_;
  } else {
    j["sum_vid"] = sum_vid_;
    j["sum_graph"] = sum_graph_;
  }
  return j.dump();
}

void RewardWeights::check() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0,1]");
  if (!(lambda_acc >= 0.0 && lambda_form >= 0.0 && lambda_attn >= 0.0)) {
    throw ConfigError("reward lambdas must be non-negative");
  }
  if (!(gate_sim >= 0.0 && gate_sim <= 1.0 && gate_tiou >= 0.0 && gate_tiou <= 1.0)) {
    throw ConfigError("attention gates must be in [0,1]");
  }
}

double t_iou(const TimeSpan& pred, const TimeSpan& gt) {
  std::int64_t inter = pred.overlap_tenths(gt);
  std::int64_t len_p = pred.end_tenths() - pred.start_tenths();
  std::int64_t len_g = gt.end_tenths() - gt.start_tenths();
  std::int64_t uni = len_p + len_g - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double t_iou(const std::optional<TimeSpan>& pred, const TimeSpan& gt) {
  return pred ? t_iou(*pred, gt) : 0.0;
}

namespace {

std::map<std::string, int> token_bag(const std::string& text) {
  std::map<std::string, int> bag;
  std::string cur;
  for (char ch : text) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      ++bag[cur];
      cur.clear();
    }
  }
  if (!cur.empty()) ++bag[cur];
  return bag;
}

}  // namespace

double token_f1(const std::string& pred, const std::string& gt) {
  auto pb = token_bag(pred);
  auto gb = token_bag(gt);
  long long pred_n = 0, gt_n = 0, inter = 0;
  for (auto& [_, n] : pb) pred_n += n;
  for (auto& [_, n] : gb) gt_n += n;
  for (auto& [tok, n] : pb) {
    auto it = gb.find(tok);
    if (it != gb.end()) inter += std::min(n, it->second);
  }
  if (inter == 0 || pred_n == 0 || gt_n == 0) return 0.0;
  double p = static_cast<double>(inter) / pred_n;
  double r = static_cast<double>(inter) / gt_n;
  return 2.0 * p * r / (p + r);
}

double sim(const std::optional<std::string>& pred_answer, const std::string& gt_answer,
           const SimilarityScorer& scorer) {
  if (gt_answer.empty()) throw DataError("ground-truth answer is empty");
  if (!pred_answer) return 0.0;
  double v = scorer ? scorer(*pred_answer, gt_answer) : token_f1(*pred_answer, gt_answer);
  return std::clamp(v, 0.0, 1.0);
}

double r_acc(const ModelOutput& output, const GroundTruth& gt, const RewardWeights& weights,
             const SimilarityScorer& scorer) {
  weights.check();
  double s = sim(output.pred_answer, gt.gt_answer, scorer);
  double t = t_iou(output.pred_span, gt.gt_span);
  return weights.alpha * s + (1.0 - weights.alpha) * t;
}

int r_form(const std::string& raw_text) {
  // [\s\S] stands in for dot-matches-newline, which std::regex lacks.
  static const std::regex form(
      R"(^\s*<think>[\s\S]*?</think>\s*<answer>[\s\S]*?</answer>\s*$)");
  return std::regex_match(raw_text, form) ? 1 : 0;
}

double r_attn(const AttentionDump& dump) {
  auto [vid, graph] = dump.group_sums();
  double denom = vid + graph;
  if (denom <= 0.0) return 0.0;
  return vid / denom;
}

double gated_attn(double r_attn_raw, double r_sim, double r_tiou, const RewardWeights& weights) {
  return (r_sim >= weights.gate_sim && r_tiou >= weights.gate_tiou) ? r_attn_raw : 0.0;
}

RewardBreakdown composite(const ModelOutput& output, const GroundTruth& gt,
                          const AttentionDump& dump, const RewardWeights& weights,
                          const SimilarityScorer& scorer) {
  weights.check();
  RewardBreakdown b;
  b.r_sim = sim(output.pred_answer, gt.gt_answer, scorer);
  b.r_tiou = t_iou(output.pred_span, gt.gt_span);
  b.r_acc = weights.alpha * b.r_sim + (1.0 - weights.alpha) * b.r_tiou;
  b.r_form = static_cast<double>(r_form(output.raw_text));
  b.r_attn_raw = r_attn(dump);
  b.r_attn_gated = gated_attn(b.r_attn_raw, b.r_sim, b.r_tiou, weights);
  b.total = weights.lambda_acc * b.r_acc + weights.lambda_form * b.r_form +
            weights.lambda_attn * b.r_attn_gated;
  return b;
}

ModelOutput parse_response(const std::string& raw_text) {
  ModelOutput out;
  out.raw_text = raw_text;

  static const std::regex think_re(R"(<think>([\s\S]*?)</think>)");
  static const std::regex answer_re(R"(<answer>([\s\S]*?)</answer>)");
  std::smatch m;
  if (std::regex_search(raw_text, m, think_re)) out.think_text = m[1].str();

  if (!std::regex_search(raw_text, m, answer_re)) return out;
  const std::string answer_block = m[1].str();

  static const std::regex span_re(
      R"(from\s+([0-9]+(?:\.[0-9]+)?)\s+to\s+([0-9]+(?:\.[0-9]+)?)\s+seconds)",
      std::regex::icase);
  if (std::regex_search(answer_block, m, span_re)) {
    out.pred_span = TimeSpan::try_of_seconds(std::stod(m[1].str()), std::stod(m[2].str()));
  }

  static const std::regex ans_re(R"(answer\s*:\s*([\s\S]*))", std::regex::icase);
  if (std::regex_search(answer_block, m, ans_re)) {
    std::string text = trim(m[1].str());
    if (!text.empty()) out.pred_answer = text;
  }
  return out;
}

}  // namespace evsg::reward
