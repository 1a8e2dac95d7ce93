#pragma once

#include "cellfield/grid.hpp"

#include <Eigen/Core>

#include <limits>
#include <vector>

namespace cellfield {

/// Exact 1-D squared distance transform by lower envelope of parabolas.
/// `f` holds the sampled cost (0 at feature points, a large value elsewhere);
/// the result is min_q (p - q)^2 + f(q) for every p.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> squared_distance_1d(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& f) {
  const Eigen::Index n = f.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(n);
  if (n == 0) return d;
  std::vector<Eigen::Index> v(static_cast<std::size_t>(n));
  std::vector<Scalar> z(static_cast<std::size_t>(n) + 1);
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  auto intersect = [&](Eigen::Index q, Eigen::Index p) {
    return ((f[q] + Scalar(q * q)) - (f[p] + Scalar(p * p))) / Scalar(2 * q - 2 * p);
  };
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (Eigen::Index q = 1; q < n; ++q) {
    Scalar s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (Eigen::Index q = 0; q < n; ++q) {
    while (z[k + 1] < Scalar(q)) ++k;
    const Eigen::Index dq = q - v[k];
    d[q] = Scalar(dq * dq) + f[v[k]];
  }
  return d;
}

/// Squared Euclidean distance from each region pixel (in `region.pixels`
/// order) to the nearest pixel center outside the region. Pixels beyond the
/// image border count as outside.
Eigen::VectorXd squared_distance_to_outside(const Region& region);

/// Raw per-cell distance map, unnormalized; background is 0.
FieldMap distance_field(const LabelImage& labels);

/// Distance field scaled so each cell peaks at exactly 1.
FieldMap edt_field_map(const LabelImage& labels);

}  // namespace cellfield
