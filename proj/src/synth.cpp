#include "cellfield/synth.hpp"

#include "cellfield/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cellfield {

namespace {

using Rng = std::mt19937_64;

// Star-shaped outline: radius as a function of angle around a center.
struct Outline {
  ShapeKind kind = ShapeKind::disk;
  double radius = 1.0;
  // ellipse
  double minor_ratio = 1.0;
  double rotation = 0.0;
  // blob: low-order Fourier perturbation of the radius
  std::array<double, 3> amplitude{};
  std::array<double, 3> phase{};

  double radius_at(double theta) const {
    switch (kind) {
      case ShapeKind::ellipse: {
        const double a = radius, b = radius * minor_ratio;
        const double c = std::cos(theta - rotation), s = std::sin(theta - rotation);
        return a * b / std::sqrt(b * b * c * c + a * a * s * s);
      }
      case ShapeKind::blob: {
        double scale = 1.0;
        for (int k = 0; k < 3; ++k) scale += amplitude[k] * std::cos((k + 2) * theta + phase[k]);
        return radius * scale;
      }
      default:
        return radius;
    }
  }

  double extent() const {
    if (kind != ShapeKind::blob) return radius;
    return radius * (1.0 + std::abs(amplitude[0]) + std::abs(amplitude[1]) + std::abs(amplitude[2]));
  }
};

Outline draw_outline(const SynthSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Outline o;
  o.kind = spec.shape_kind;
  if (o.kind == ShapeKind::mixed) {
    constexpr std::array kinds{ShapeKind::disk, ShapeKind::ellipse, ShapeKind::blob};
    o.kind = kinds[std::uniform_int_distribution<int>(0, 2)(rng)];
  }
  o.radius = spec.radius_min + (spec.radius_max - spec.radius_min) * unit(rng);
  if (o.kind == ShapeKind::ellipse) {
    o.minor_ratio = 0.6 + 0.4 * unit(rng);
    o.rotation = std::numbers::pi * unit(rng);
  } else if (o.kind == ShapeKind::blob) {
    for (int k = 0; k < 3; ++k) {
      o.amplitude[k] = 0.16 * unit(rng) - 0.08;
      o.phase[k] = 2.0 * std::numbers::pi * unit(rng);
    }
  }
  return o;
}

// Pixels of the outline centered at (cx, cy), reduced to the 4-connected
// piece containing the center. Empty if any pixel leaves the inner frame.
std::vector<Pixel> rasterize(const Outline& o, double cx, double cy, int width, int height) {
  const int reach = static_cast<int>(std::ceil(o.extent())) + 1;
  const int x0 = static_cast<int>(std::floor(cx)) - reach;
  const int y0 = static_cast<int>(std::floor(cy)) - reach;
  const int side = 2 * reach + 2;
  Mask inside(side, side, false);
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const double dx = x0 + i - cx, dy = y0 + j - cy;
      const double r = std::hypot(dx, dy);
      inside(i, j) = r <= (r == 0.0 ? o.radius : o.radius_at(std::atan2(dy, dx)));
    }
  }
  const Pixel center{static_cast<int>(std::lround(cx)) - x0, static_cast<int>(std::lround(cy)) - y0};
  if (!inside[center]) return {};
  const LabelImage parts = relabel_connected(inside, Connectivity::four);
  const Label keep = parts[center];

  std::vector<Pixel> pixels;
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      if (parts(i, j) != keep) continue;
      const Pixel p{x0 + i, y0 + j};
      if (p.x < 1 || p.y < 1 || p.x > width - 2 || p.y > height - 2) return {};
      pixels.push_back(p);
    }
  }
  return pixels;
}

class Canvas {
 public:
  Canvas(int width, int height, int min_gap) : labels_(width, height, 0) {
    const int r = min_gap + 1;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy < r * r) gap_offsets_.push_back({dx, dy});
      }
    }
  }

  const LabelImage& labels() const { return labels_; }

  // No pixel of another instance (other than `partner`) lies closer than the gap.
  bool respects_gap(const std::vector<Pixel>& pixels, Label partner) const {
    for (Pixel p : pixels) {
      if (labels_[p] != 0) return false;
      for (Pixel d : gap_offsets_) {
        const Pixel q{p.x + d.x, p.y + d.y};
        if (!labels_.contains(q)) continue;
        const Label k = labels_[q];
        if (k != 0 && k != partner) return false;
      }
    }
    return true;
  }

  bool overlaps(const std::vector<Pixel>& pixels) const {
    return std::any_of(pixels.begin(), pixels.end(), [&](Pixel p) { return labels_[p] != 0; });
  }

  bool touches(const std::vector<Pixel>& pixels, Label partner) const {
    constexpr std::array<Pixel, 4> n4{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
    for (Pixel p : pixels) {
      for (Pixel d : n4) {
        const Pixel q{p.x + d.x, p.y + d.y};
        if (labels_.contains(q) && labels_[q] == partner) return true;
      }
    }
    return false;
  }

  void paint(const std::vector<Pixel>& pixels, Label id) {
    for (Pixel p : pixels) labels_[p] = id;
  }

 private:
  LabelImage labels_;
  std::vector<Pixel> gap_offsets_;
};

struct Placed {
  double cx, cy, extent;
};

}  // namespace

ShapeKind shape_kind_from_string(std::string_view name) {
  if (name == "disk") return ShapeKind::disk;
  if (name == "ellipse") return ShapeKind::ellipse;
  if (name == "blob") return ShapeKind::blob;
  if (name == "mixed") return ShapeKind::mixed;
  throw Error("unknown shape kind '" + std::string(name) + "'");
}

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw Error("synth: image dimensions must be positive");
  if (n_instances < 0) throw Error("synth: n_instances must be non-negative");
  if (radius_min < 2.0) throw Error("synth: minimum radius must be at least 2");
  if (radius_max < radius_min) throw Error("synth: radius range is inverted");
  if (min_gap < 0) throw Error("synth: min_gap must be non-negative");
  if (touching_fraction < 0.0 || touching_fraction > 1.0) {
    throw Error("synth: touching_fraction must lie in [0, 1]");
  }
  if (noise_amplitude < 0.0) throw Error("synth: noise amplitude must be non-negative");
  if (max_attempts < 1) throw Error("synth: max_attempts must be positive");
}

SynthSample generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Canvas canvas(spec.width, spec.height, spec.min_gap);
  std::vector<Placed> placed;
  const double min_area = std::numbers::pi * spec.radius_min * spec.radius_min / 2.0;

  for (int n = 0; n < spec.n_instances; ++n) {
    const Label id = n + 1;
    const bool touching = !placed.empty() && unit(rng) < spec.touching_fraction;
    bool done = false;
    for (int attempt = 0; attempt < spec.max_attempts && !done; ++attempt) {
      const Outline outline = draw_outline(spec, rng);
      if (!touching) {
        const double cx = spec.width * unit(rng), cy = spec.height * unit(rng);
        const auto pixels = rasterize(outline, cx, cy, spec.width, spec.height);
        if (pixels.size() < min_area || !canvas.respects_gap(pixels, 0)) continue;
        canvas.paint(pixels, id);
        placed.push_back({cx, cy, outline.extent()});
        done = true;
        continue;
      }
      // Slide the new cell toward a random partner until it first touches.
      const auto partner = static_cast<Label>(
          std::uniform_int_distribution<std::size_t>(0, placed.size() - 1)(rng) + 1);
      const Placed& anchor = placed[static_cast<std::size_t>(partner - 1)];
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      for (double d = anchor.extent + outline.extent() + 2.0; d >= 0.0; d -= 0.5) {
        const double cx = anchor.cx + d * std::cos(theta), cy = anchor.cy + d * std::sin(theta);
        const auto pixels = rasterize(outline, cx, cy, spec.width, spec.height);
        if (pixels.empty()) continue;
        if (canvas.overlaps(pixels)) break;
        if (!canvas.touches(pixels, partner)) continue;
        if (pixels.size() >= min_area && canvas.respects_gap(pixels, partner)) {
          canvas.paint(pixels, id);
          placed.push_back({cx, cy, outline.extent()});
          done = true;
        }
        break;
      }
    }
    if (!done) {
      throw Error("synth: could not place instance " + std::to_string(id) + " of " +
                  std::to_string(spec.n_instances) + " after " + std::to_string(spec.max_attempts) +
                  " attempts; lower n_instances, radius or min_gap, or enlarge the image");
    }
  }

  SynthSample out{canvas.labels(), Image<std::uint8_t>(spec.width, spec.height, 0)};
  std::vector<double> intensity(placed.size() + 1, 0.15);
  for (std::size_t k = 1; k < intensity.size(); ++k) intensity[k] = 0.5 + 0.4 * unit(rng);
  std::normal_distribution<double> noise(0.0, spec.noise_amplitude > 0 ? spec.noise_amplitude : 1.0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double v = intensity[static_cast<std::size_t>(out.labels(x, y))];
      if (spec.noise_amplitude > 0) v += noise(rng);
      out.image(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    }
  }
  return out;
}

}  // namespace cellfield
