#pragma once

#include "cellfield/image.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace cellfield {

enum class Connectivity { four = 4, eight = 8 };

Connectivity connectivity_from_int(int n);

/// Neighbor offsets for the given connectivity, in a fixed order.
std::span<const Pixel> neighbor_offsets(Connectivity c);

struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;  // inclusive
  int y1 = 0;  // inclusive

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool contains(Pixel p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

/// One labeled instance. Pixels are stored in raster order.
struct Region {
  Label id = 0;
  std::vector<Pixel> pixels;
  BoundingBox box;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  // Rounded centroid when inside the cell. A half-integral coordinate picks
  // the deeper, then more central, neighbor; a centroid outside the cell
  // picks the deepest pixel. Remaining ties go to raster order.
  Pixel source;
  // False when the instance is split into several 4-connected pieces.
  bool connected = true;

  std::size_t area() const { return pixels.size(); }
  bool contains(Pixel p) const;
  // Position of `p` in `pixels`, or -1.
  Eigen::Index index_of(Pixel p) const;
};

/// Recovered instances plus the background mask they were confined to.
struct Segmentation {
  LabelImage instances;
  Mask background;

  static Segmentation from_labels(LabelImage labels);
  int width() const { return instances.width(); }
  int height() const { return instances.height(); }
};

/// Throws unless every id is non-negative and 1..max all occur.
void validate_labels(const LabelImage& labels);

Label max_label(const LabelImage& labels);

/// One Region per nonzero id, sorted by id.
std::vector<Region> extract_regions(const LabelImage& labels);

/// Inner boundary: region pixels with a 4-neighbor outside the region or the image.
std::vector<Pixel> boundary_pixels(const Region& region, const LabelImage& labels);

/// Connected components of `mask`, numbered 1..n in raster discovery order.
LabelImage relabel_connected(const Mask& mask, Connectivity connectivity);

/// Membership mask of a region over its bounding box grown by `pad` pixels.
/// Pixel (0,0) of the result corresponds to (box.x0 - pad, box.y0 - pad).
Mask local_mask(const Region& region, int pad);

/// True if the complement of the region has a component enclosed by it.
bool has_holes(const Region& region);

/// Rescales each instance so its maximum is 1; background is set to 0.
/// Throws if an instance has a non-positive maximum.
void normalize_per_instance(FieldMap& field, std::span<const Region> regions);

}  // namespace cellfield
