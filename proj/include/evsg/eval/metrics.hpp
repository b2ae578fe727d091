#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evsg/core/time_span.hpp"

namespace evsg::eval {

struct PredictionRecord {
  std::string id;
  std::optional<TimeSpan> pred_span;  // absent prediction scores IoU 0
  std::string pred_answer;
  TimeSpan gt_span;
  std::string gt_answer;
  bool answer_correct = false;
};

// How answer_correct is derived when a record does not carry it explicitly.
enum class AnswerMatcher {
  Exact,       // normalized-token equality
  Letter,      // first alphanumeric character, case-insensitive
  Similarity,  // token F1 at or above the threshold
};

struct EvalOptions {
  AnswerMatcher matcher = AnswerMatcher::Exact;
  double similarity_threshold = 0.7;
};

bool match_answer(const std::string& pred, const std::string& gt, const EvalOptions& opts);

// Line-delimited JSON records with fields id, pred_start/pred_end (both or
// neither), pred_answer, gt_start, gt_end, gt_answer, and optionally an
// explicit answer_correct. Throws DataError with the line number on
// malformed lines and on duplicate ids.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               const EvalOptions& opts = {});
std::vector<PredictionRecord> parse_predictions(const std::string& text,
                                                const EvalOptions& opts = {});

struct MetricsReport {
  int n_samples = 0;
  double miou = 0.0;
  double r1_at_03 = 0.0;
  double r1_at_05 = 0.0;
  double accuracy = 0.0;
  double acc_at_iou05 = 0.0;  // answer correct AND IoU >= 0.5

  std::string to_json() const;  // single line, sorted keys, newline-terminated
  std::string to_text() const;  // human-readable block
};

// mIoU, recall at inclusive IoU thresholds 0.3/0.5, answer accuracy, and
// their conjunction. Throws DataError on an empty record list.
MetricsReport compute_metrics(const std::vector<PredictionRecord>& records);

}  // namespace evsg::eval
