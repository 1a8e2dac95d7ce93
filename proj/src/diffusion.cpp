#include "cellfield/diffusion.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace cellfield {

namespace {

// In-cell 3x3 neighborhoods of one region in compressed row form.
class MaskedBoxStencil {
 public:
  MaskedBoxStencil(const Region& region, BoundaryRule rule)
      : source_(region.index_of(region.source)) {
    const auto n = static_cast<Eigen::Index>(region.pixels.size());
    offsets_.reserve(static_cast<std::size_t>(n) + 1);
    weights_.resize(n);
    offsets_.push_back(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Pixel p = region.pixels[static_cast<std::size_t>(i)];
      int members = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Eigen::Index j = region.index_of({p.x + dx, p.y + dy});
          if (j < 0) continue;
          columns_.push_back(j);
          ++members;
        }
      }
      offsets_.push_back(columns_.size());
      weights_[i] = rule == BoundaryRule::renormalized ? 1.0 / members : 1.0 / 9.0;
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    Eigen::VectorXd half = u;
    half[source_] += 1.0;
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sum += half[columns_[k]];
      out[i] = sum * weights_[i];
    }
    return out;
  }

 private:
  Eigen::Index source_;
  std::vector<std::size_t> offsets_;
  std::vector<Eigen::Index> columns_;
  Eigen::VectorXd weights_;
};

Eigen::VectorXd gather(const FieldMap& field, const Region& r) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(r.pixels.size()));
  for (std::size_t i = 0; i < r.pixels.size(); ++i) u[static_cast<Eigen::Index>(i)] = field[r.pixels[i]];
  return u;
}

void scatter(FieldMap& field, const Region& r, const Eigen::VectorXd& u) {
  for (std::size_t i = 0; i < r.pixels.size(); ++i) field[r.pixels[i]] = u[static_cast<Eigen::Index>(i)];
}

// Change between iterates. Under the zero-flux rule the raw field grows
// without bound, so only its normalized shape is compared.
double update_size(const Eigen::VectorXd& before, const Eigen::VectorXd& after, BoundaryRule rule) {
  if (rule == BoundaryRule::leaky_denominator_9) return (after - before).norm();
  const double peak_before = before.maxCoeff();
  if (!(peak_before > 0.0)) return std::numeric_limits<double>::infinity();
  return (after / after.maxCoeff() - before / peak_before).norm();
}

}  // namespace

BoundaryRule boundary_rule_from_string(std::string_view name) {
  if (name == "leaky" || name == "leaky_denominator_9") return BoundaryRule::leaky_denominator_9;
  if (name == "renormalized") return BoundaryRule::renormalized;
  throw Error("unknown boundary rule '" + std::string(name) + "' (expected leaky or renormalized)");
}

std::string_view to_string(BoundaryRule rule) {
  return rule == BoundaryRule::renormalized ? "renormalized" : "leaky";
}

void DiffusionConfig::validate() const {
  if (!(convergence_epsilon > 0.0)) throw Error("diffusion convergence epsilon must be positive");
  if (max_iterations < 1) throw Error("diffusion max_iterations must be at least 1");
}

FieldMap diffusion_step(const FieldMap& field, std::span<const Region> regions,
                        const DiffusionConfig& config, std::span<const bool> active) {
  if (!active.empty() && active.size() != regions.size()) {
    throw Error("diffusion_step: active flags do not match the region count");
  }
  FieldMap out(field.width(), field.height(), 0.0);
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const Region& r = regions[k];
    for (Pixel p : r.pixels) {
      if (!field.contains(p)) throw Error("diffusion_step: region lies outside the field");
    }
    Eigen::VectorXd u = gather(field, r);
    if (active.empty() || active[k]) u = MaskedBoxStencil(r, config.boundary_rule).apply(u);
    scatter(out, r, u);
  }
  return out;
}

DiffusionResult run_diffusion(const LabelImage& labels, const DiffusionConfig& config) {
  config.validate();
  const auto regions = extract_regions(labels);
  DiffusionResult result{FieldMap(labels.width(), labels.height(), 0.0),
                         FieldMap(labels.width(), labels.height(), 0.0),
                         {}};

  // Cells never interact, so running each to its own convergence is the same
  // as one global loop that freezes cells as they settle.
  for (const Region& r : regions) {
    const MaskedBoxStencil stencil(r, config.boundary_rule);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.pixels.size()));
    InstanceDiffusion status{r.id, 0, false, std::numeric_limits<double>::infinity()};
    while (status.iterations < config.max_iterations) {
      Eigen::VectorXd next = stencil.apply(u);
      status.last_delta = update_size(u, next, config.boundary_rule);
      ++status.iterations;
      u = std::move(next);
      if (status.last_delta < config.convergence_epsilon) {
        status.converged = true;
        break;
      }
    }
    scatter(result.raw, r, u);
    result.report.instances.push_back(status);
  }

  std::ostringstream failures;
  for (const InstanceDiffusion& s : result.report.instances) {
    if (!s.converged) failures << " " << s.instance_id << " (last delta " << s.last_delta << ")";
  }
  if (!failures.str().empty()) {
    throw Error("diffusion did not converge within " + std::to_string(config.max_iterations) +
                " iterations for instances:" + failures.str());
  }

  result.field = result.raw;
  normalize_per_instance(result.field, regions);
  return result;
}

FieldMap diffusion_field_map(const LabelImage& labels, const DiffusionConfig& config) {
  return run_diffusion(labels, config).field;
}

}  // namespace cellfield
