#include "cellfield/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <utility>

namespace cellfield {

namespace {

void require_same_shape(const LabelImage& gt, const Segmentation& pred) {
  if (!gt.same_shape(pred.instances)) {
    throw Error("dimension mismatch: ground truth " + std::to_string(gt.width()) + "x" +
                std::to_string(gt.height()) + ", prediction " + std::to_string(pred.width()) +
                "x" + std::to_string(pred.height()));
  }
}

std::vector<long> areas(const LabelImage& labels) {
  std::vector<long> out(static_cast<std::size_t>(std::max(max_label(labels), 0)) + 1, 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const Label k = labels.data()[i];
    if (k < 0) throw Error("negative instance id");
    ++out[static_cast<std::size_t>(k)];
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

MatchTable match_instances(const LabelImage& gt, const Segmentation& pred) {
  require_same_shape(gt, pred);
  const std::vector<long> gt_area = areas(gt);
  const std::vector<long> pred_area = areas(pred.instances);

  std::map<std::pair<Label, Label>, long> overlap;
  for (Eigen::Index i = 0; i < gt.size(); ++i) {
    const Label g = gt.data()[i];
    const Label p = pred.instances.data()[i];
    if (g != 0 && p != 0) ++overlap[{g, p}];
  }

  MatchTable table;
  std::vector<char> gt_matched(gt_area.size(), 0);
  std::vector<char> pred_matched(pred_area.size(), 0);
  for (const auto& [ids, inter] : overlap) {
    const auto [g, p] = ids;
    const long uni = gt_area[g] + pred_area[p] - inter;
    const double iou = static_cast<double>(inter) / static_cast<double>(uni);
    if (iou > 0.5) {
      table.matches.push_back({g, p, iou});
      gt_matched[g] = 1;
      pred_matched[p] = 1;
    }
  }
  for (std::size_t g = 1; g < gt_area.size(); ++g) {
    if (gt_area[g] > 0 && !gt_matched[g]) table.false_negatives.push_back(static_cast<Label>(g));
  }
  for (std::size_t p = 1; p < pred_area.size(); ++p) {
    if (pred_area[p] > 0 && !pred_matched[p]) table.false_positives.push_back(static_cast<Label>(p));
  }
  return table;
}

PanopticScores panoptic_quality(const MatchTable& table) {
  PanopticScores s;
  const auto tp = static_cast<double>(table.matches.size());
  if (tp > 0) {
    double sum = 0.0;
    for (const MatchedPair& m : table.matches) sum += m.iou;
    s.sq = sum / tp;
  }
  const double denom = tp + 0.5 * static_cast<double>(table.false_positives.size()) +
                       0.5 * static_cast<double>(table.false_negatives.size());
  if (denom > 0) s.rq = tp / denom;
  s.pq = s.sq * s.rq;
  return s;
}

OverlapScores overlap_scores(const MatchTable& table) {
  OverlapScores s;
  if (table.matches.empty()) return s;
  for (const MatchedPair& m : table.matches) {
    s.mean_iou += m.iou;
    s.dice += dice_from_iou(m.iou);
  }
  const auto n = static_cast<double>(table.matches.size());
  s.mean_iou /= n;
  s.dice /= n;
  return s;
}

OverlapScores overlap_scores(const LabelImage& gt, const Segmentation& pred) {
  return overlap_scores(match_instances(gt, pred));
}

double foreground_dice(const LabelImage& gt, const Segmentation& pred) {
  require_same_shape(gt, pred);
  const auto a = gt.array() != 0;
  const auto b = pred.instances.array() != 0;
  const double inter = static_cast<double>((a && b).count());
  const double total = static_cast<double>(a.count() + b.count());
  return total > 0 ? 2.0 * inter / total : 0.0;
}

MetricsReport evaluate(const LabelImage& gt, const Segmentation& pred, std::string name) {
  MetricsReport r;
  r.name = std::move(name);
  r.table = match_instances(gt, pred);
  r.n_gt = static_cast<int>(r.table.matches.size() + r.table.false_negatives.size());
  r.n_pred = static_cast<int>(r.table.matches.size() + r.table.false_positives.size());
  const PanopticScores pq = panoptic_quality(r.table);
  const OverlapScores ov = overlap_scores(r.table);
  r.pq = pq.pq;
  r.sq = pq.sq;
  r.rq = pq.rq;
  r.mean_iou = ov.mean_iou;
  r.dice = ov.dice;
  r.foreground_dice = foreground_dice(gt, pred);
  return r;
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  MetricsReport m;
  m.name = "mean";
  if (reports.empty()) return m;
  for (const MetricsReport& r : reports) {
    m.n_gt += r.n_gt;
    m.n_pred += r.n_pred;
    m.mean_iou += r.mean_iou;
    m.dice += r.dice;
    m.pq += r.pq;
    m.sq += r.sq;
    m.rq += r.rq;
    m.foreground_dice += r.foreground_dice;
  }
  const auto n = static_cast<double>(reports.size());
  m.mean_iou /= n;
  m.dice /= n;
  m.pq /= n;
  m.sq /= n;
  m.rq /= n;
  m.foreground_dice /= n;
  return m;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  out << "path,n_gt,n_pred,iou,dice,pq,sq,rq,foreground_dice\n";
  auto row = [&](const MetricsReport& r) {
    out << r.name << ',' << r.n_gt << ',' << r.n_pred << ',' << fixed(r.mean_iou) << ','
        << fixed(r.dice) << ',' << fixed(r.pq) << ',' << fixed(r.sq) << ',' << fixed(r.rq) << ','
        << fixed(r.foreground_dice) << '\n';
  };
  for (const MetricsReport& r : reports) row(r);
  row(mean_report(reports));
}

}  // namespace cellfield
