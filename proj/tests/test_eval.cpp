#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "evsg/core/errors.hpp"
#include "evsg/eval/metrics.hpp"
#include "evsg/grpo/rng.hpp"

using namespace evsg;
using namespace evsg::eval;

namespace {

const char* kFixturePath = EVSG_SOURCE_DIR "/tests/fixtures/eval/predictions.jsonl";

PredictionRecord make_record(std::string id, std::optional<TimeSpan> pred, TimeSpan gt,
                             bool correct) {
  PredictionRecord r;
  r.id = std::move(id);
  r.pred_span = pred;
  r.gt_span = gt;
  r.answer_correct = correct;
  return r;
}

// Naive re-aggregation, kept deliberately separate from compute_metrics.
MetricsReport naive_metrics(const std::vector<PredictionRecord>& records) {
  MetricsReport rep;
  rep.n_samples = static_cast<int>(records.size());
  std::vector<double> ious;
  for (const auto& rec : records) {
    if (!rec.pred_span.has_value()) {
      ious.push_back(0.0);
      continue;
    }
    auto inter = std::max<std::int64_t>(
        0, std::min(rec.pred_span->end_tenths(), rec.gt_span.end_tenths()) -
               std::max(rec.pred_span->start_tenths(), rec.gt_span.start_tenths()));
    auto uni = (rec.pred_span->end_tenths() - rec.pred_span->start_tenths()) +
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

std::vector<PredictionRecord> random_records(grpo::CounterRng& rng, int max_n) {
  int n = rng.uniform_int(1, max_n);
  std::vector<PredictionRecord> recs;
  for (int i = 0; i < n; ++i) {
    std::int64_t gs = rng.uniform_int(0, 400);
    std::int64_t ge = gs + rng.uniform_int(1, 100);
    std::optional<TimeSpan> pred;
    if (rng.uniform() < 0.8) {
      std::int64_t ps = rng.uniform_int(0, 400);
      pred = TimeSpan::of_tenths(ps, ps + rng.uniform_int(1, 100));
    }
    recs.push_back(make_record("r" + std::to_string(i), pred, TimeSpan::of_tenths(gs, ge),
                               rng.uniform() < 0.5));
  }
  return recs;
}

}  // namespace

TEST_CASE("the four-record fixture hits its metrics exactly") {
  std::vector<PredictionRecord> recs = load_predictions(kFixturePath);
  REQUIRE(recs.size() == 4);
  CHECK(!recs[0].pred_span.has_value() == false);
  CHECK(!recs[3].pred_span.has_value());
  CHECK(recs[0].answer_correct);
  CHECK(recs[1].answer_correct);  // "Bench." normalizes to "bench"
  CHECK(!recs[2].answer_correct);
  CHECK(recs[3].answer_correct);

  MetricsReport rep = compute_metrics(recs);
  CHECK(rep.n_samples == 4);
  CHECK(rep.miou == 0.5);
  CHECK(rep.r1_at_03 == 0.75);
  CHECK(rep.r1_at_05 == 0.5);
  CHECK(rep.accuracy == 0.75);
  CHECK(rep.acc_at_iou05 == 0.5);

  CHECK(rep.to_json() ==
        "{\"acc_at_iou05\":0.500000,\"accuracy\":0.750000,\"miou\":0.500000,"
        "\"n_samples\":4,\"r1_at_03\":0.750000,\"r1_at_05\":0.500000}\n");
  CHECK(rep.to_text() ==
        "samples:   4\n"
        "mIoU:      0.500000\n"
        "R1@0.3:    0.750000\n"
        "R1@0.5:    0.500000\n"
        "Accuracy:  0.750000\n"
        "Acc@0.5:   0.500000\n");
}

TEST_CASE("degenerate metric sets") {
  TimeSpan gt = TimeSpan::of_seconds(2, 8);
  SUBCASE("all predictions equal ground truth") {
    std::vector<PredictionRecord> recs;
    for (int i = 0; i < 5; ++i)
      recs.push_back(make_record("p" + std::to_string(i), gt, gt, true));
    MetricsReport rep = compute_metrics(recs);
    CHECK(rep.miou == 1.0);
    CHECK(rep.r1_at_03 == 1.0);
    CHECK(rep.r1_at_05 == 1.0);
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.acc_at_iou05 == 1.0);
  }
  SUBCASE("absent spans and wrong answers zero everything") {
    std::vector<PredictionRecord> recs;
    for (int i = 0; i < 3; ++i)
      recs.push_back(make_record("p" + std::to_string(i), std::nullopt, gt, false));
    MetricsReport rep = compute_metrics(recs);
    CHECK(rep.miou == 0.0);
    CHECK(rep.r1_at_03 == 0.0);
    CHECK(rep.r1_at_05 == 0.0);
    CHECK(rep.accuracy == 0.0);
    CHECK(rep.acc_at_iou05 == 0.0);
  }
  SUBCASE("empty input is an error") {
    CHECK_THROWS_AS(compute_metrics({}), DataError);
  }
}

TEST_CASE("answer matchers") {
  EvalOptions exact;
  CHECK(match_answer("The Bench!", "the   bench", exact));
  CHECK(match_answer("bench", "Bench.", exact));
  CHECK(!match_answer("a bench", "bench", exact));
  CHECK(!match_answer("", "bench", exact));
  CHECK(!match_answer("", "", exact));  // empty ground truth never matches

  EvalOptions letter;
  letter.matcher = AnswerMatcher::Letter;
  CHECK(match_answer("B) the bench", "b", letter));
  CHECK(match_answer("(c)", "C. a tree", letter));
  CHECK(!match_answer("B", "c", letter));
  CHECK(!match_answer("", "b", letter));
  CHECK(!match_answer("...", "b", letter));
  CHECK(!match_answer("b", "", letter));

  EvalOptions sim;
  sim.matcher = AnswerMatcher::Similarity;
  CHECK(!match_answer("a b c", "a b d", sim));  // F1 = 2/3 under the 0.7 default
  sim.similarity_threshold = 0.6;
  CHECK(match_answer("a b c", "a b d", sim));
  CHECK(match_answer("same words", "same words", sim));
}

TEST_CASE("prediction parsing faults carry line numbers") {
  std::string good =
      R"({"id":"a","pred_start":1,"pred_end":2,"pred_answer":"x","gt_start":0,"gt_end":4,"gt_answer":"x"})";

  CHECK(parse_predictions("").empty());
  CHECK(parse_predictions(good + "\n").size() == 1);
  CHECK(parse_predictions(good).size() == 1);  // trailing newline optional

  SUBCASE("bad json names the line, counting blanks") {
    try {
      parse_predictions(good + "\n\n{nope\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("non-object line") {
    CHECK_THROWS_WITH_AS(parse_predictions("[1,2]\n"),
                         "prediction line 1: record must be a JSON object", DataError);
  }
  SUBCASE("missing required field") {
    try {
      parse_predictions(R"({"id":"a","gt_start":0,"gt_end":4})" "\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("gt_answer") != std::string::npos);
    }
  }
  SUBCASE("wrong field type") {
    CHECK_THROWS_AS(
        parse_predictions(R"({"id":"a","gt_start":"zero","gt_end":4,"gt_answer":"x"})" "\n"),
        DataError);
  }
  SUBCASE("half a prediction span") {
    try {
      parse_predictions(R"({"id":"a","pred_start":1,"gt_start":0,"gt_end":4,"gt_answer":"x"})"
                        "\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("together") != std::string::npos);
    }
  }
  SUBCASE("duplicate ids") {
    try {
      parse_predictions(good + "\n" + good + "\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("duplicate id 'a'") != std::string::npos);
    }
  }
  SUBCASE("invalid ground truth span is an error") {
    CHECK_THROWS_AS(
        parse_predictions(R"({"id":"a","gt_start":4,"gt_end":4,"gt_answer":"x"})" "\n"),
        DataError);
  }
}

TEST_CASE("degenerate predicted spans are tolerated as misses") {
  std::string text =
      R"({"id":"a","pred_start":5,"pred_end":5,"pred_answer":"x","gt_start":0,"gt_end":4,"gt_answer":"x"})"
      "\n"
      R"({"id":"b","pred_start":9,"pred_end":3,"pred_answer":"x","gt_start":0,"gt_end":4,"gt_answer":"x"})"
      "\n";
  std::vector<PredictionRecord> recs = parse_predictions(text);
  REQUIRE(recs.size() == 2);
  CHECK(!recs[0].pred_span.has_value());
  CHECK(!recs[1].pred_span.has_value());
  MetricsReport rep = compute_metrics(recs);
  CHECK(rep.miou == 0.0);
  CHECK(rep.accuracy == 1.0);
}

TEST_CASE("an explicit answer_correct flag wins over the matcher") {
  std::string text =
      R"({"id":"a","pred_answer":"bench","gt_start":0,"gt_end":4,"gt_answer":"bench","answer_correct":false})"
      "\n"
      R"({"id":"b","pred_answer":"tree","gt_start":0,"gt_end":4,"gt_answer":"bench","answer_correct":true})"
      "\n";
  std::vector<PredictionRecord> recs = parse_predictions(text);
  CHECK(!recs[0].answer_correct);
  CHECK(recs[1].answer_correct);
}

TEST_CASE("matcher choice feeds parsed correctness") {
  std::string text =
      R"({"id":"a","pred_answer":"B) bench","gt_start":0,"gt_end":4,"gt_answer":"b"})" "\n";
  EvalOptions exact;
  CHECK(!parse_predictions(text, exact)[0].answer_correct);
  EvalOptions letter;
  letter.matcher = AnswerMatcher::Letter;
  CHECK(parse_predictions(text, letter)[0].answer_correct);
}

TEST_CASE("missing prediction file is a configuration fault") {
  CHECK_THROWS_AS(load_predictions("/nonexistent/preds.jsonl"), ConfigError);
}

TEST_CASE("metric bounds and brute-force agreement on random sets") {
  grpo::CounterRng rng(grpo::rng_key({2024, 0x31u}));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PredictionRecord> recs = random_records(rng, 100);
    MetricsReport a = compute_metrics(recs);
    MetricsReport b = naive_metrics(recs);
    CAPTURE(trial);
    CHECK(a.miou == b.miou);
    CHECK(a.r1_at_03 == b.r1_at_03);
    CHECK(a.r1_at_05 == b.r1_at_05);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.acc_at_iou05 == b.acc_at_iou05);

    CHECK(a.r1_at_05 <= a.r1_at_03);
    CHECK(a.acc_at_iou05 <= std::min(a.accuracy, a.r1_at_05));
    CHECK(a.miou >= 0.0);
    CHECK(a.miou <= 1.0);

    std::vector<PredictionRecord> shuffled = recs;
    for (size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[static_cast<size_t>(rng.uniform_int(
                                     0, static_cast<int>(i) - 1))]);
    }
    MetricsReport c = compute_metrics(shuffled);
    CHECK(std::abs(c.miou - a.miou) < 1e-12);
    CHECK(c.r1_at_03 == a.r1_at_03);
    CHECK(c.r1_at_05 == a.r1_at_05);
    CHECK(c.accuracy == a.accuracy);
    CHECK(c.acc_at_iou05 == a.acc_at_iou05);
  }
}
