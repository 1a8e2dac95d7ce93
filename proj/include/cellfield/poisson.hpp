#pragma once

#include "cellfield/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <limits>
#include <vector>

namespace cellfield {

enum class SolveStrategy { direct, iterative };

struct PoissonSolveReport {
  Label instance_id = 0;
  Eigen::Index unknowns = 0;
  double max_residual = 0.0;  // ||A u + 1||_inf
  SolveStrategy solve_strategy = SolveStrategy::direct;
  bool has_holes = false;
};

struct PoissonOptions {
  // Regions with more unknowns than this are solved by conjugate gradients.
  Eigen::Index iterative_threshold = std::numeric_limits<Eigen::Index>::max();
  double cg_tolerance = 1e-10;
};

/// Five-point Laplacian restricted to one cell: unknowns are the region
/// pixels in raster order, out-of-cell neighbors are fixed at zero.
struct LaplacianSystem {
  Eigen::SparseMatrix<double> matrix;  // -4 on the diagonal, +1 per in-cell 4-neighbor
  Eigen::VectorXd rhs;                 // all -1
};

LaplacianSystem assemble_laplacian(const Region& region);

struct PoissonSolution {
  Eigen::VectorXd values;  // ordered like region.pixels
  PoissonSolveReport report;
};

PoissonSolution solve_poisson(const Region& region, const PoissonOptions& options = {});

struct PoissonFieldResult {
  FieldMap field;
  std::vector<PoissonSolveReport> reports;
};

/// Solves every cell independently and scales each to a peak of 1.
PoissonFieldResult poisson_field(const LabelImage& labels, const PoissonOptions& options = {});

FieldMap poisson_field_map(const LabelImage& labels);

}  // namespace cellfield
