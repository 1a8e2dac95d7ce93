#pragma once

#include "cellfield/image.hpp"

#include <cstdint>
#include <string_view>

namespace cellfield {

// `mixed` draws disk, ellipse or blob independently per instance.
enum class ShapeKind { disk, ellipse, blob, mixed };

ShapeKind shape_kind_from_string(std::string_view name);

struct SynthSpec {
  std::uint64_t seed = 0;
  int width = 128;
  int height = 128;
  int n_instances = 8;
  ShapeKind shape_kind = ShapeKind::disk;
  double radius_min = 5.0;
  double radius_max = 10.0;
  int min_gap = 2;                 // background pixels between non-touching cells
  double touching_fraction = 0.0;  // probability a cell is placed against an earlier one
  double noise_amplitude = 0.05;   // noise standard deviation, fraction of the intensity range
  int max_attempts = 1000;         // placement retries per instance

  void validate() const;
};

struct SynthSample {
  LabelImage labels;
  Image<std::uint8_t> image;
};

/// Deterministic for a fixed spec. Cells are 4-connected, at least one pixel
/// from the image border, and non-touching cells keep `min_gap` background
/// pixels between them (minimum center distance of min_gap + 1).
SynthSample generate(const SynthSpec& spec);

}  // namespace cellfield
