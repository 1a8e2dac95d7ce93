#include "cellfield/grid.hpp"

#include "cellfield/edt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

namespace cellfield {

namespace {

constexpr std::array<Pixel, 4> kNeighbors4{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
constexpr std::array<Pixel, 8> kNeighbors8{
    {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

Pixel operator+(Pixel a, Pixel b) { return {a.x + b.x, a.y + b.y}; }

bool is_4_connected(const Region& region) {
  if (region.pixels.empty()) return true;
  Mask inside = local_mask(region, 0);
  Mask seen(inside.width(), inside.height(), false);
  std::deque<Pixel> queue{Pixel{region.pixels.front().x - region.box.x0,
                                region.pixels.front().y - region.box.y0}};
  seen[queue.front()] = true;
  std::size_t reached = 0;
  while (!queue.empty()) {
    Pixel p = queue.front();
    queue.pop_front();
    ++reached;
    for (Pixel d : kNeighbors4) {
      Pixel q = p + d;
      if (inside.contains(q) && inside[q] && !seen[q]) {
        seen[q] = true;
        queue.push_back(q);
      }
    }
  }
  return reached == region.pixels.size();
}

// Pixel candidates for the rounded centroid along one axis. An exactly
// half-integral coordinate yields both neighbors.
std::vector<int> rounded_coordinate(long long sum, long long n) {
  if ((2 * sum) % n == 0 && ((2 * sum) / n) % 2 != 0) {
    const int lo = static_cast<int>((2 * sum / n - 1) / 2);
    return {lo, lo + 1};
  }
  return {static_cast<int>(std::lround(static_cast<double>(sum) / static_cast<double>(n)))};
}

Pixel choose_source(const Region& region) {
  long long sx = 0, sy = 0;
  for (Pixel p : region.pixels) {
    sx += p.x;
    sy += p.y;
  }
  const auto n = static_cast<long long>(region.pixels.size());
  std::vector<Pixel> candidates;
  for (int y : rounded_coordinate(sy, n)) {
    for (int x : rounded_coordinate(sx, n)) {
      if (region.contains({x, y})) candidates.push_back({x, y});
    }
  }
  if (candidates.size() == 1) return candidates.front();

  // A half-integral centroid is resolved by shape so the choice follows the
  // cell under flips and rotations. A centroid outside the cell takes the
  // deepest pixel overall. Remaining ties go to the first in raster order.
  const Eigen::VectorXd dist2 = squared_distance_to_outside(region);
  if (!candidates.empty()) {
    // Depth first, then total distance to the cell's pixels (smaller is more central).
    auto spread = [&](Pixel c) {
      double total = 0.0;
      for (Pixel p : region.pixels) total += std::hypot(p.x - c.x, p.y - c.y);
      return total;
    };
    Pixel best = candidates.front();
    double best_spread = spread(best);
    for (Pixel c : candidates) {
      const double d = dist2[region.index_of(c)], d_best = dist2[region.index_of(best)];
      const double s = spread(c);
      const bool tie = std::abs(s - best_spread) <= 1e-9 * best_spread;
      if (d > d_best || (d == d_best && !tie && s < best_spread)) {
        best = c;
        best_spread = s;
      }
    }
    return best;
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < dist2.size(); ++i) {
    if (dist2[i] > dist2[best]) best = i;
  }
  return region.pixels[static_cast<std::size_t>(best)];
}

}  // namespace

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::four;
  if (n == 8) return Connectivity::eight;
  throw Error("connectivity must be 4 or 8, got " + std::to_string(n));
}

std::span<const Pixel> neighbor_offsets(Connectivity c) {
  if (c == Connectivity::four) return kNeighbors4;
  return kNeighbors8;
}

bool Region::contains(Pixel p) const { return index_of(p) >= 0; }

Eigen::Index Region::index_of(Pixel p) const {
  if (!box.contains(p)) return -1;
  auto it = std::lower_bound(pixels.begin(), pixels.end(), p);
  if (it == pixels.end() || !(*it == p)) return -1;
  return it - pixels.begin();
}

Segmentation Segmentation::from_labels(LabelImage labels) {
  Mask background(Mask::Storage(labels.array() == 0));
  return {std::move(labels), std::move(background)};
}

Label max_label(const LabelImage& labels) { return labels.array().maxCoeff(); }

void validate_labels(const LabelImage& labels) {
  if (labels.size() == 0) throw Error("empty label image");
  if (labels.array().minCoeff() < 0) throw Error("label image contains negative ids");
  const Label n = max_label(labels);
  std::vector<char> present(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i) present[labels.data()[i]] = 1;
  for (Label k = 1; k <= n; ++k) {
    if (!present[k]) {
      throw Error("non-compact labeling: id " + std::to_string(k) + " is missing (max id " +
                  std::to_string(n) + ")");
    }
  }
}

std::vector<Region> extract_regions(const LabelImage& labels) {
  validate_labels(labels);
  const Label n = max_label(labels);
  std::vector<Region> regions(static_cast<std::size_t>(n));
  for (Label k = 1; k <= n; ++k) {
    Region& r = regions[k - 1];
    r.id = k;
    r.box = {labels.width(), labels.height(), -1, -1};
  }

  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const Label k = labels(x, y);
      if (k == 0) continue;
      Region& r = regions[k - 1];
      r.pixels.push_back({x, y});
      r.box.x0 = std::min(r.box.x0, x);
      r.box.y0 = std::min(r.box.y0, y);
      r.box.x1 = std::max(r.box.x1, x);
      r.box.y1 = std::max(r.box.y1, y);
      r.centroid += Eigen::Vector2d(x, y);
    }
  }

  for (Region& r : regions) {
    r.centroid /= static_cast<double>(r.pixels.size());
    r.connected = is_4_connected(r);
    r.source = choose_source(r);
  }
  return regions;
}

std::vector<Pixel> boundary_pixels(const Region& region, const LabelImage& labels) {
  std::vector<Pixel> out;
  for (Pixel p : region.pixels) {
    for (Pixel d : kNeighbors4) {
      Pixel q = p + d;
      if (!labels.contains(q) || labels[q] != region.id) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

LabelImage relabel_connected(const Mask& mask, Connectivity connectivity) {
  LabelImage out(mask.width(), mask.height(), 0);
  const auto offsets = neighbor_offsets(connectivity);
  Label next = 0;
  std::deque<Pixel> queue;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || out(x, y) != 0) continue;
      out(x, y) = ++next;
      queue.push_back({x, y});
      while (!queue.empty()) {
        Pixel p = queue.front();
        queue.pop_front();
        for (Pixel d : offsets) {
          Pixel q = p + d;
          if (mask.contains(q) && mask[q] && out[q] == 0) {
            out[q] = next;
            queue.push_back(q);
          }
        }
      }
    }
  }
  return out;
}

Mask local_mask(const Region& region, int pad) {
  Mask m(region.box.width() + 2 * pad, region.box.height() + 2 * pad, false);
  for (Pixel p : region.pixels) m(p.x - region.box.x0 + pad, p.y - region.box.y0 + pad) = true;
  return m;
}

bool has_holes(const Region& region) {
  // With one pixel of padding the outer complement is a single 4-connected
  // piece; any further complement component is enclosed.
  Mask outside = local_mask(region, 1);
  outside.array() = !outside.array();
  const LabelImage parts = relabel_connected(outside, Connectivity::four);
  return max_label(parts) > 1;
}

void normalize_per_instance(FieldMap& field, std::span<const Region> regions) {
  FieldMap out(field.width(), field.height(), 0.0);
  for (const Region& r : regions) {
    double peak = 0.0;
    for (Pixel p : r.pixels) peak = std::max(peak, field[p]);
    if (!(peak > 0.0) || !std::isfinite(peak)) {
      throw Error("cannot normalize instance " + std::to_string(r.id) +
                  ": field maximum is not positive");
    }
    for (Pixel p : r.pixels) out[p] = field[p] / peak;
  }
  field = std::move(out);
}

}  // namespace cellfield
