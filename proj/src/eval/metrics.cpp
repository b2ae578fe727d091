#include "evsg/eval/metrics.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "evsg/core/errors.hpp"
#include "evsg/reward/reward.hpp"
#include "json.hpp"

namespace evsg::eval {

namespace {

std::string normalized_tokens(const std::string& s) {
  std::string out;
  bool in_token = false;
  for (char ch : s) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) {
      out.push_back(static_cast<char>(std::tolower(u)));
      in_token = true;
    } else if (in_token) {
      out.push_back(' ');
      in_token = false;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

char first_letter(const std::string& s) {
  for (char ch : s) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) return static_cast<char>(std::tolower(u));
  }
  return '\0';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

bool match_answer(const std::string& pred, const std::string& gt, const EvalOptions& opts) {
  switch (opts.matcher) {
    case AnswerMatcher::Exact:
      return !gt.empty() && normalized_tokens(pred) == normalized_tokens(gt);
    case AnswerMatcher::Letter: {
      char p = first_letter(pred), g = first_letter(gt);
      return g != '\0' && p == g;
    }
    case AnswerMatcher::Similarity:
      return reward::token_f1(pred, gt) >= opts.similarity_threshold;
  }
  return false;
}

std::vector<PredictionRecord> parse_predictions(const std::string& text,
                                                const EvalOptions& opts) {
  std::vector<PredictionRecord> records;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("prediction line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!j.is_object()) throw DataError("record must be a JSON object");
      for (const char* key : {"id", "gt_start", "gt_end", "gt_answer"}) {
        if (!j.contains(key)) throw DataError(std::string("missing field ") + key);
      }
      PredictionRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.gt_span = TimeSpan::of_seconds(j.at("gt_start").get<double>(),
                                         j.at("gt_end").get<double>());
      rec.gt_answer = j.at("gt_answer").get<std::string>();
      if (j.contains("pred_answer")) rec.pred_answer = j.at("pred_answer").get<std::string>();
      if (j.contains("pred_start") != j.contains("pred_end")) {
        throw DataError("pred_start and pred_end must appear together");
      }
      if (j.contains("pred_start")) {
        rec.pred_span = TimeSpan::try_of_seconds(j.at("pred_start").get<double>(),
                                                 j.at("pred_end").get<double>());
      }
      rec.answer_correct = j.contains("answer_correct")
                               ? j.at("answer_correct").get<bool>()
                               : match_answer(rec.pred_answer, rec.gt_answer, opts);
      if (!ids.insert(rec.id).second) {
        throw DataError("duplicate id '" + rec.id + "'");
      }
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("prediction line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("prediction line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path,
                                               const EvalOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("prediction file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_predictions(buf.str(), opts);
}

MetricsReport compute_metrics(const std::vector<PredictionRecord>& records) {
  if (records.empty()) throw DataError("cannot compute metrics over an empty record set");
  MetricsReport rep;
  rep.n_samples = static_cast<int>(records.size());
  double iou_sum = 0.0;
  int hit03 = 0, hit05 = 0, correct = 0, joint = 0;
  for (const auto& rec : records) {
    double iou = reward::t_iou(rec.pred_span, rec.gt_span);
    iou_sum += iou;
    if (iou >= 0.3) ++hit03;
    if (iou >= 0.5) ++hit05;
    if (rec.answer_correct) ++correct;
    if (rec.answer_correct && iou >= 0.5) ++joint;
  }
  double n = static_cast<double>(records.size());
  rep.miou = iou_sum / n;
  rep.r1_at_03 = hit03 / n;
  rep.r1_at_05 = hit05 / n;
  rep.accuracy = correct / n;
  rep.acc_at_iou05 = joint / n;
  return rep;
}

std::string MetricsReport::to_json() const {
  std::ostringstream out;
  out << "{\"acc_at_iou05\":" << fmt(acc_at_iou05) << ",\"accuracy\":" << fmt(accuracy)
      << ",\"miou\":" << fmt(miou) << ",\"n_samples\":" << n_samples
      << ",\"r1_at_03\":" << fmt(r1_at_03) << ",\"r1_at_05\":" << fmt(r1_at_05) << "}\n";
  return out.str();
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << "samples:   " << n_samples << "\n"
      << "mIoU:      " << fmt(miou) << "\n"
      << "R1@0.3:    " << fmt(r1_at_03) << "\n"
      << "R1@0.5:    " << fmt(r1_at_05) << "\n"
      << "Accuracy:  " << fmt(accuracy) << "\n"
      << "Acc@0.5:   " << fmt(acc_at_iou05) << "\n";
  return out.str();
}

}  // namespace evsg::eval
