#pragma once

#include "cellfield/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cellfield {

struct MatchedPair {
  Label gt_id = 0;
  Label pred_id = 0;
  double iou = 0.0;
};

/// Instance correspondence at IoU > 0.5, which makes matches unique.
struct MatchTable {
  std::vector<MatchedPair> matches;     // sorted by gt_id
  std::vector<Label> false_negatives;   // unmatched ground-truth ids
  std::vector<Label> false_positives;   // unmatched predicted ids
};

struct PanopticScores {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
};

struct OverlapScores {
  double mean_iou = 0.0;
  double dice = 0.0;
};

struct MetricsReport {
  std::string name;
  int n_gt = 0;
  int n_pred = 0;
  double mean_iou = 0.0;
  double dice = 0.0;
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  double foreground_dice = 0.0;  // whole-mask Dice, supplementary
  MatchTable table;
};

MatchTable match_instances(const LabelImage& gt, const Segmentation& pred);

PanopticScores panoptic_quality(const MatchTable& table);

OverlapScores overlap_scores(const MatchTable& table);
OverlapScores overlap_scores(const LabelImage& gt, const Segmentation& pred);

inline double dice_from_iou(double iou) { return 2.0 * iou / (1.0 + iou); }

/// Dice of the union of all instances against the union of all predictions.
double foreground_dice(const LabelImage& gt, const Segmentation& pred);

MetricsReport evaluate(const LabelImage& gt, const Segmentation& pred, std::string name = {});

/// Unweighted mean of per-image scores with summed instance counts; name is "mean".
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

/// Header plus one row per report and a final mean row.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

}  // namespace cellfield
