#pragma once

#include "cellfield/grid.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <tuple>
#include <vector>

namespace cellfield {

struct WatershedParams {
  double background_epsilon = 0.05;
  double h = 0.30;
  Connectivity connectivity = Connectivity::eight;

  void validate() const;
};

struct MarkerSet {
  LabelImage markers;  // 0 = unmarked
  int count = 0;
};

namespace detail {

// Min-queue entry; the sequence number makes ties first-in first-out.
template <typename Scalar>
struct QueueEntry {
  Scalar level;
  std::uint64_t seq;
  Pixel pixel;

  friend bool operator>(const QueueEntry& a, const QueueEntry& b) {
    return std::tie(a.level, a.seq) > std::tie(b.level, b.seq);
  }
};

template <typename Scalar>
using MinQueue =
    std::priority_queue<QueueEntry<Scalar>, std::vector<QueueEntry<Scalar>>, std::greater<>>;

inline Pixel offset(Pixel p, Pixel d) { return {p.x + d.x, p.y + d.y}; }

}  // namespace detail

/// True where the field is below `eps`.
template <typename Scalar>
Mask background_mask(const Field<Scalar>& field, double eps) {
  return Mask(Mask::Storage(field.array() < static_cast<Scalar>(eps)));
}

/// 1 - field on the foreground; background pixels are set to 1 and must be
/// ignored by callers.
template <typename Scalar>
Field<Scalar> invert_foreground(const Field<Scalar>& field, const Mask& background) {
  return Field<Scalar>(
      background.array().select(Scalar(1), Scalar(1) - field.array()).eval());
}

/// Grayscale reconstruction by erosion of `marker` (>= `mask`) over `mask`,
/// restricted to `domain`. Equivalent to iterating max(erode(r), mask) to
/// stability; computed as a minimax path flood.
template <typename Scalar>
Field<Scalar> reconstruct_by_erosion(const Field<Scalar>& marker, const Field<Scalar>& mask,
                                     const Mask& domain, Connectivity connectivity) {
  Field<Scalar> r = marker;
  detail::MinQueue<Scalar> queue;
  std::uint64_t seq = 0;
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      if (domain(x, y)) queue.push({r(x, y), seq++, {x, y}});
    }
  }
  const auto offsets = neighbor_offsets(connectivity);
  while (!queue.empty()) {
    const auto [level, s, p] = queue.top();
    queue.pop();
    if (level > r[p]) continue;
    for (Pixel d : offsets) {
      const Pixel q = detail::offset(p, d);
      if (!domain.contains(q) || !domain[q]) continue;
      const Scalar candidate = std::max(r[p], mask[q]);
      if (candidate < r[q]) {
        r[q] = candidate;
        queue.push({candidate, seq++, q});
      }
    }
  }
  return r;
}

/// Plateaus of `f` inside `domain` with no lower neighbor in `domain`.
template <typename Scalar>
Mask regional_minima(const Field<Scalar>& f, const Mask& domain, Connectivity connectivity) {
  Mask minima(f.width(), f.height(), false);
  Mask visited(f.width(), f.height(), false);
  const auto offsets = neighbor_offsets(connectivity);
  std::vector<Pixel> plateau;
  std::deque<Pixel> queue;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      if (!domain(x, y) || visited(x, y)) continue;
      const Scalar level = f(x, y);
      bool is_minimum = true;
      plateau.clear();
      visited(x, y) = true;
      queue.push_back({x, y});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        plateau.push_back(p);
        for (Pixel d : offsets) {
          const Pixel q = detail::offset(p, d);
          if (!domain.contains(q) || !domain[q]) continue;
          if (f[q] < level) is_minimum = false;
          if (f[q] == level && !visited[q]) {
            visited[q] = true;
            queue.push_back(q);
          }
        }
      }
      if (is_minimum) {
        for (Pixel p : plateau) minima[p] = true;
      }
    }
  }
  return minima;
}

/// Markers from the h-minima transform of the inverted foreground field.
template <typename Scalar>
MarkerSet hminima_markers(const Field<Scalar>& field, const Mask& background, double h,
                          Connectivity connectivity) {
  if (!(h > 0.0 && h <= 1.0)) throw Error("h must lie in (0, 1]");
  if (!field.same_shape(background)) throw Error("hminima_markers: mask size mismatch");
  const Mask foreground(Mask::Storage(!background.array()));
  const Field<Scalar> inverted = invert_foreground(field, background);
  Field<Scalar> raised(typename Field<Scalar>::Storage(inverted.array() + static_cast<Scalar>(h)));
  const Field<Scalar> suppressed =
      reconstruct_by_erosion(raised, inverted, foreground, connectivity);
  MarkerSet out;
  out.markers = relabel_connected(regional_minima(suppressed, foreground, connectivity), connectivity);
  out.count = max_label(out.markers);
  return out;
}

/// Priority flood of the inverted field from the markers, confined to the
/// foreground. Ties are resolved first-in first-out; pixels no marker can
/// reach stay background.
template <typename Scalar>
Segmentation flood(const Field<Scalar>& field, const MarkerSet& markers, const Mask& background,
                   Connectivity connectivity) {
  if (!field.same_shape(markers.markers) || !field.same_shape(background)) {
    throw Error("flood: input size mismatch");
  }
  const Field<Scalar> inverted = invert_foreground(field, background);
  LabelImage labels(field.width(), field.height(), 0);
  detail::MinQueue<Scalar> queue;
  std::uint64_t seq = 0;
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (markers.markers(x, y) == 0 || background(x, y)) continue;
      labels(x, y) = markers.markers(x, y);
      queue.push({inverted(x, y), seq++, {x, y}});
    }
  }
  const auto offsets = neighbor_offsets(connectivity);
  while (!queue.empty()) {
    const auto [level, s, p] = queue.top();
    queue.pop();
    for (Pixel d : offsets) {
      const Pixel q = detail::offset(p, d);
      if (!labels.contains(q) || background[q] || labels[q] != 0) continue;
      labels[q] = labels[p];
      queue.push({std::max(level, inverted[q]), seq++, q});
    }
  }
  return Segmentation::from_labels(std::move(labels));
}

/// Background threshold, h-minima markers, then flooding.
template <typename Scalar>
Segmentation segment(const Field<Scalar>& field, const WatershedParams& params) {
  params.validate();
  const Mask background = background_mask(field, params.background_epsilon);
  const MarkerSet markers = hminima_markers(field, background, params.h, params.connectivity);
  return flood(field, markers, background, params.connectivity);
}

}  // namespace cellfield
