#include "cellfield/edt.hpp"

#include <cmath>

namespace cellfield {

namespace {

// Well above any squared distance on a realistic raster while keeping the
// parabola intersections finite.
constexpr double kFar = 1e20;

}  // namespace

Eigen::VectorXd squared_distance_to_outside(const Region& region) {
  // The one-pixel ring around the bounding box is entirely outside, so the
  // nearest outside pixel always lies within the padded box.
  const Mask inside = local_mask(region, 1);
  Eigen::MatrixXd cost(inside.height(), inside.width());
  for (int y = 0; y < inside.height(); ++y) {
    for (int x = 0; x < inside.width(); ++x) cost(y, x) = inside(x, y) ? kFar : 0.0;
  }
  for (Eigen::Index row = 0; row < cost.rows(); ++row) {
    cost.row(row) = squared_distance_1d<double>(cost.row(row).transpose()).transpose();
  }
  for (Eigen::Index col = 0; col < cost.cols(); ++col) {
    cost.col(col) = squared_distance_1d<double>(cost.col(col));
  }

  Eigen::VectorXd out(static_cast<Eigen::Index>(region.pixels.size()));
  for (std::size_t i = 0; i < region.pixels.size(); ++i) {
    const Pixel p = region.pixels[i];
    out[static_cast<Eigen::Index>(i)] = cost(p.y - region.box.y0 + 1, p.x - region.box.x0 + 1);
  }
  return out;
}

namespace {

FieldMap distance_field(const LabelImage& labels, std::span<const Region> regions) {
  FieldMap field(labels.width(), labels.height(), 0.0);
  for (const Region& r : regions) {
    const Eigen::VectorXd d = squared_distance_to_outside(r).cwiseSqrt();
    for (std::size_t i = 0; i < r.pixels.size(); ++i) {
      field[r.pixels[i]] = d[static_cast<Eigen::Index>(i)];
    }
  }
  return field;
}

}  // namespace

FieldMap distance_field(const LabelImage& labels) {
  return distance_field(labels, extract_regions(labels));
}

FieldMap edt_field_map(const LabelImage& labels) {
  const auto regions = extract_regions(labels);
  FieldMap field = distance_field(labels, regions);
  normalize_per_instance(field, regions);
  return field;
}

}  // namespace cellfield
