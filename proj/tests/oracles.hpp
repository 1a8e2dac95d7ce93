// Independent reference computations for tests. Nothing here calls into the
// solver, transform or matching code it is used to check.
#pragma once

#include "cellfield/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using cellfield::Label;
using cellfield::LabelImage;
using cellfield::Pixel;

inline std::vector<Pixel> pixels_of(const LabelImage& labels, Label id) {
  std::vector<Pixel> out;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x)
      if (labels(x, y) == id) out.push_back({x, y});
  return out;
}

/// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Raw Poisson potential of one cell from a dense five-point system built by
/// pairwise adjacency. Returned in raster order of the cell's pixels.
inline std::vector<double> dense_poisson(const LabelImage& labels, Label id) {
  const auto px = pixels_of(labels, id);
  const std::size_t n = px.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = -4.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(px[i].x - px[j].x) + std::abs(px[i].y - px[j].y) == 1) a[i][j] = 1.0;
    }
  }
  return dense_solve(a, std::vector<double>(n, -1.0));
}

/// Exhaustive nearest-outside-pixel distance; pixels beyond the border are outside.
inline cellfield::FieldMap brute_force_distance(const LabelImage& labels) {
  cellfield::FieldMap out(labels.width(), labels.height(), 0.0);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const Label k = labels(x, y);
      if (k == 0) continue;
      long best = std::numeric_limits<long>::max();
      for (int qy = -1; qy <= labels.height(); ++qy) {
        for (int qx = -1; qx <= labels.width(); ++qx) {
          const bool outside = !labels.contains(qx, qy) || labels(qx, qy) != k;
          if (!outside) continue;
          const long d2 = long(qx - x) * (qx - x) + long(qy - y) * (qy - y);
          best = std::min(best, d2);
        }
      }
      out(x, y) = std::sqrt(static_cast<double>(best));
    }
  }
  return out;
}

struct SetMetrics {
  int tp = 0, fp = 0, fn = 0;
  std::vector<double> matched_iou;
  double mean_iou = 0, dice = 0, pq = 0, sq = 0, rq = 0;
};

/// Metrics from explicit pixel sets and an all-pairs IoU scan.
inline SetMetrics brute_force_metrics(const LabelImage& gt, const LabelImage& pred) {
  std::map<Label, std::set<std::pair<int, int>>> g, p;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (gt(x, y)) g[gt(x, y)].insert({x, y});
      if (pred(x, y)) p[pred(x, y)].insert({x, y});
    }
  }
  SetMetrics m;
  std::set<Label> g_hit, p_hit;
  for (const auto& [gi, gs] : g) {
    for (const auto& [pi, ps] : p) {
      std::vector<std::pair<int, int>> inter, uni;
      std::set_intersection(gs.begin(), gs.end(), ps.begin(), ps.end(), std::back_inserter(inter));
      std::set_union(gs.begin(), gs.end(), ps.begin(), ps.end(), std::back_inserter(uni));
      const double iou = double(inter.size()) / double(uni.size());
      if (iou > 0.5) {
        m.matched_iou.push_back(iou);
        g_hit.insert(gi);
        p_hit.insert(pi);
      }
    }
  }
  m.tp = static_cast<int>(m.matched_iou.size());
  m.fn = static_cast<int>(g.size() - g_hit.size());
  m.fp = static_cast<int>(p.size() - p_hit.size());
  if (m.tp > 0) {
    double s = 0, d = 0;
    for (double v : m.matched_iou) {
      s += v;
      d += 2.0 * v / (1.0 + v);
    }
    m.mean_iou = s / m.tp;
    m.sq = m.mean_iou;
    m.dice = d / m.tp;
  }
  const double denom = m.tp + 0.5 * m.fp + 0.5 * m.fn;
  m.rq = denom > 0 ? m.tp / denom : 0.0;
  m.pq = m.sq * m.rq;
  return m;
}

/// Random label image of axis-aligned rectangles and disks painted over one
/// another, then renumbered so ids are compact. Later shapes may overwrite
/// or split earlier ones.
inline LabelImage random_labels(std::mt19937& rng, int width, int height, int max_instances) {
  LabelImage raw(width, height, 0);
  std::uniform_int_distribution<int> count(0, max_instances);
  const int n = count(rng);
  for (int k = 1; k <= n; ++k) {
    std::uniform_int_distribution<int> xs(0, width - 1), ys(0, height - 1);
    const int cx = xs(rng), cy = ys(rng);
    const int r = std::uniform_int_distribution<int>(0, std::max(1, std::min(width, height) / 3))(rng);
    const bool disk = rng() % 2;
    for (int y = std::max(0, cy - r); y <= std::min(height - 1, cy + r); ++y)
      for (int x = std::max(0, cx - r); x <= std::min(width - 1, cx + r); ++x)
        if (!disk || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) raw(x, y) = k;
  }
  std::map<Label, Label> remap;
  LabelImage out(width, height, 0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (raw(x, y)) {
        auto [it, fresh] = remap.try_emplace(raw(x, y), static_cast<Label>(remap.size() + 1));
        out(x, y) = it->second;
      }
  return out;
}

inline LabelImage disk_labels(int width, int height, std::vector<std::pair<Pixel, double>> disks) {
  LabelImage out(width, height, 0);
  Label k = 0;
  for (const auto& [c, r] : disks) {
    ++k;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) <= r * r) out(x, y) = k;
  }
  return out;
}

}  // namespace oracle
