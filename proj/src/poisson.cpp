#include "cellfield/poisson.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <array>
#include <string>

namespace cellfield {

LaplacianSystem assemble_laplacian(const Region& region) {
  const auto n = static_cast<Eigen::Index>(region.pixels.size());
  if (n == 0) throw Error("cannot assemble a Laplacian for an empty region");

  // Local index raster over the box; -1 marks out-of-cell pixels.
  Eigen::ArrayXXi index = Eigen::ArrayXXi::Constant(region.box.height(), region.box.width(), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Pixel p = region.pixels[static_cast<std::size_t>(i)];
    index(p.y - region.box.y0, p.x - region.box.x0) = static_cast<int>(i);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * n));
  constexpr std::array<Pixel, 4> kStencil{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Pixel p = region.pixels[static_cast<std::size_t>(i)];
    triplets.emplace_back(i, i, -4.0);
    for (Pixel d : kStencil) {
      const int lx = p.x + d.x - region.box.x0;
      const int ly = p.y + d.y - region.box.y0;
      if (lx < 0 || ly < 0 || lx >= region.box.width() || ly >= region.box.height()) continue;
      const int j = index(ly, lx);
      if (j >= 0) triplets.emplace_back(i, j, 1.0);
    }
  }

  LaplacianSystem system;
  system.matrix.resize(n, n);
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.matrix.makeCompressed();
  system.rhs = Eigen::VectorXd::Constant(n, -1.0);
  return system;
}

PoissonSolution solve_poisson(const Region& region, const PoissonOptions& options) {
  const LaplacianSystem system = assemble_laplacian(region);
  // A is negative definite; factor -A, which is SPD.
  const Eigen::SparseMatrix<double> spd = -system.matrix;
  const Eigen::VectorXd ones = -system.rhs;

  PoissonSolution out;
  out.report.instance_id = region.id;
  out.report.unknowns = spd.rows();
  out.report.has_holes = has_holes(region);

  if (spd.rows() > options.iterative_threshold) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(options.cg_tolerance);
    cg.setMaxIterations(10 * spd.rows() + 100);
    cg.compute(spd);
    out.values = cg.solve(ones);
    if (cg.info() != Eigen::Success) {
      throw Error("conjugate gradient failed to converge for instance " +
                  std::to_string(region.id));
    }
    out.report.solve_strategy = SolveStrategy::iterative;
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(spd);
    if (ldlt.info() != Eigen::Success) {
      throw Error("sparse factorization failed for instance " + std::to_string(region.id));
    }
    out.values = ldlt.solve(ones);
    if (ldlt.info() != Eigen::Success) {
      throw Error("sparse solve failed for instance " + std::to_string(region.id));
    }
    out.report.solve_strategy = SolveStrategy::direct;
  }

  out.report.max_residual = (system.matrix * out.values - system.rhs).lpNorm<Eigen::Infinity>();
  return out;
}

PoissonFieldResult poisson_field(const LabelImage& labels, const PoissonOptions& options) {
  const auto regions = extract_regions(labels);
  PoissonFieldResult result{FieldMap(labels.width(), labels.height(), 0.0), {}};
  result.reports.reserve(regions.size());
  for (const Region& r : regions) {
    PoissonSolution sol = solve_poisson(r, options);
    for (std::size_t i = 0; i < r.pixels.size(); ++i) {
      result.field[r.pixels[i]] = sol.values[static_cast<Eigen::Index>(i)];
    }
    result.reports.push_back(sol.report);
  }
  normalize_per_instance(result.field, regions);
  return result;
}

FieldMap poisson_field_map(const LabelImage& labels) { return poisson_field(labels).field; }

}  // namespace cellfield
