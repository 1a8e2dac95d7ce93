#include "cellfield/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace cellfield;

namespace {

Segmentation seg_of(const LabelImage& labels) { return Segmentation::from_labels(labels); }

// Random image permutation of ids, keeping the labeling compact.
LabelImage permute_ids(const LabelImage& labels, std::mt19937& rng) {
  std::vector<Label> ids(static_cast<std::size_t>(max_label(labels)));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<Label>(i + 1);
  std::shuffle(ids.begin(), ids.end(), rng);
  LabelImage out = labels;
  for (int i = 0; i < out.size(); ++i)
    if (out.data()[i]) out.data()[i] = ids[static_cast<std::size_t>(out.data()[i] - 1)];
  return out;
}

}  // namespace

TEST_CASE("evaluate: IoU 2/6 does not match") {
  LabelImage gt(6, 1, 0), pred(6, 1, 0);
  for (int x = 0; x < 4; ++x) gt(x, 0) = 1;
  for (int x = 2; x < 6; ++x) pred(x, 0) = 1;
  const MetricsReport r = evaluate(gt, seg_of(pred));
  CHECK(r.table.matches.empty());
  CHECK(r.table.false_negatives == std::vector<Label>{1});
  CHECK(r.table.false_positives == std::vector<Label>{1});
  CHECK(r.pq == 0.0);
  CHECK(r.mean_iou == 0.0);
  CHECK(r.foreground_dice == doctest::Approx(0.5));
}

TEST_CASE("evaluate: one match at IoU 0.8 and one missed cell") {
  LabelImage gt(10, 1, 0), pred(10, 1, 0);
  for (int x = 0; x < 4; ++x) gt(x, 0) = 1;
  for (int x = 7; x < 9; ++x) gt(x, 0) = 2;
  for (int x = 0; x < 5; ++x) pred(x, 0) = 1;
  const MetricsReport r = evaluate(gt, seg_of(pred));
  REQUIRE(r.table.matches.size() == 1);
  CHECK(r.table.matches[0].iou == 0.8);
  CHECK(r.sq == 0.8);
  CHECK(r.rq == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(r.pq - 0.8 * 2.0 / 3.0) <= 1e-15);
  CHECK(std::abs(r.dice - 1.6 / 1.8) <= 1e-15);
  CHECK(r.n_gt == 2);
  CHECK(r.n_pred == 1);
}

TEST_CASE("evaluate: empty images and identity") {
  const MetricsReport empty = evaluate(LabelImage(4, 4, 0), seg_of(LabelImage(4, 4, 0)));
  CHECK(empty.pq == 0.0);
  CHECK(empty.rq == 0.0);
  CHECK(empty.foreground_dice == 0.0);

  LabelImage gt(4, 4, 0);
  gt(1, 1) = 1;
  gt(3, 3) = 2;
  const MetricsReport same = evaluate(gt, seg_of(gt));
  CHECK(same.pq == 1.0);
  CHECK(same.dice == 1.0);
  CHECK(same.foreground_dice == 1.0);

  CHECK_THROWS_WITH_AS(evaluate(gt, seg_of(LabelImage(3, 4, 0))), doctest::Contains("dimension mismatch"), Error);
}

TEST_CASE("metrics agree with set arithmetic on random cases") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = 1 + rng() % 32, h = 1 + rng() % 32;
    const LabelImage gt = oracle::random_labels(rng, w, h, 6);
    const LabelImage pred = oracle::random_labels(rng, w, h, 6);
    const MetricsReport r = evaluate(gt, seg_of(pred));
    const oracle::SetMetrics o = oracle::brute_force_metrics(gt, pred);
    CHECK(int(r.table.matches.size()) == o.tp);
    CHECK(int(r.table.false_positives.size()) == o.fp);
    CHECK(int(r.table.false_negatives.size()) == o.fn);
    CHECK(std::abs(r.mean_iou - o.mean_iou) <= 1e-12);
    CHECK(std::abs(r.dice - o.dice) <= 1e-12);
    CHECK(std::abs(r.pq - o.pq) <= 1e-12);
    CHECK(std::abs(r.sq - o.sq) <= 1e-12);
    CHECK(std::abs(r.rq - o.rq) <= 1e-12);
    CHECK(std::abs(r.pq - r.sq * r.rq) <= 1e-12);
    for (const auto& m : r.table.matches) CHECK(m.iou > 0.5);
  }
}

TEST_CASE("metrics are invariant to id permutations and swap roles symmetrically") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 2 + rng() % 20, h = 2 + rng() % 20;
    const LabelImage gt = oracle::random_labels(rng, w, h, 6);
    const LabelImage pred = oracle::random_labels(rng, w, h, 6);
    const MetricsReport a = evaluate(gt, seg_of(pred));
    const MetricsReport b = evaluate(permute_ids(gt, rng), seg_of(permute_ids(pred, rng)));
    CHECK(a.pq == doctest::Approx(b.pq).epsilon(1e-14));
    CHECK(a.mean_iou == doctest::Approx(b.mean_iou).epsilon(1e-14));
    const MetricsReport swapped = evaluate(pred, seg_of(gt));
    CHECK(a.pq == doctest::Approx(swapped.pq).epsilon(1e-14));
    CHECK(a.table.false_positives.size() == swapped.table.false_negatives.size());
  }
}

TEST_CASE("write_metrics_csv") {
  MetricsReport a;
  a.name = "0000.png";
  a.n_gt = 3;
  a.n_pred = 2;
  a.mean_iou = 1.0;
  a.pq = 0.5;
  MetricsReport b = a;
  b.name = "0001.png";
  b.pq = 0.25;
  std::ostringstream out;
  write_metrics_csv(out, {a, b});
  const std::string text = out.str();
  CHECK(text.rfind("path,n_gt,n_pred,iou,dice,pq,sq,rq,foreground_dice\n", 0) == 0);
  CHECK(text.find("0000.png,3,2,1.000000,0.000000,0.500000,") != std::string::npos);
  CHECK(text.find("\nmean,6,4,1.000000,0.000000,0.375000,") != std::string::npos);
  std::istringstream lines(text);
  int count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == 4);
}
