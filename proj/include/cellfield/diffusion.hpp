#pragma once

#include "cellfield/grid.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace cellfield {

enum class BoundaryRule {
  // Out-of-cell neighbors contribute 0 and the 3x3 mean keeps denominator 9.
  leaky_denominator_9,
  // Mean over the in-cell members of the 3x3 neighborhood only (zero flux).
  renormalized,
};

BoundaryRule boundary_rule_from_string(std::string_view name);
std::string_view to_string(BoundaryRule rule);

struct DiffusionConfig {
  double convergence_epsilon = 0.01;
  long max_iterations = 100000;
  BoundaryRule boundary_rule = BoundaryRule::leaky_denominator_9;

  void validate() const;
};

struct InstanceDiffusion {
  Label instance_id = 0;
  long iterations = 0;
  bool converged = false;
  double last_delta = 0.0;
};

struct DiffusionReport {
  std::vector<InstanceDiffusion> instances;
};

/// One synchronous update: +1 at the source of every active region, then the
/// masked 3x3 mean. Pixels outside active regions are copied unchanged, except
/// background, which is held at 0. An empty `active` span means all regions.
FieldMap diffusion_step(const FieldMap& field, std::span<const Region> regions,
                        const DiffusionConfig& config, std::span<const bool> active = {});

struct DiffusionResult {
  FieldMap field;  // per-cell peak scaled to 1
  FieldMap raw;    // converged values before scaling
  DiffusionReport report;
};

/// Iterates until every cell's update falls below the convergence threshold.
/// Each cell stops being injected and averaged once it converges.
DiffusionResult run_diffusion(const LabelImage& labels, const DiffusionConfig& config = {});

FieldMap diffusion_field_map(const LabelImage& labels, const DiffusionConfig& config = {});

}  // namespace cellfield
