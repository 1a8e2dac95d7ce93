// cellfield: field maps, watershed segmentation and instance metrics for
// labeled cell images.

#include "cellfield/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace cellfield;

struct Options {
  std::string method = "poisson";
  std::string boundary_rule = "leaky";
  std::string shape = "mixed";
  int connectivity = 8;
  int n_images = 10;
  PipelineConfig config;
  SynthSpec synth;
  fs::path in_dir, out_dir, gt_dir, pred_dir, csv;
};

void add_watershed_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.config.watershed.background_epsilon, "Background threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--h", o.config.watershed.h, "h-minima depth")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--connectivity", o.connectivity, "Pixel connectivity")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
}

void add_field_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--method", o.method, "Field family")
      ->check(CLI::IsMember({"poisson", "diffusion", "edt"}))
      ->capture_default_str();
  cmd->add_option("--diffusion-eps", o.config.diffusion.convergence_epsilon,
                  "Diffusion convergence threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--boundary-rule", o.boundary_rule, "Diffusion boundary rule")
      ->check(CLI::IsMember({"leaky", "renormalized"}))
      ->capture_default_str();
}

void add_synth_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n-images", o.n_images, "Number of images")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--seed", o.synth.seed, "Random seed")->capture_default_str();
  cmd->add_option("--width", o.synth.width, "Image width")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--height", o.synth.height, "Image height")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--n-instances", o.synth.n_instances, "Cells per image")->capture_default_str();
  cmd->add_option("--shape", o.shape, "Cell shape")
      ->check(CLI::IsMember({"disk", "ellipse", "blob", "mixed"}))
      ->capture_default_str();
  cmd->add_option("--radius-min", o.synth.radius_min, "Minimum cell radius")->capture_default_str();
  cmd->add_option("--radius-max", o.synth.radius_max, "Maximum cell radius")->capture_default_str();
  cmd->add_option("--min-gap", o.synth.min_gap, "Background gap between cells")->capture_default_str();
  cmd->add_option("--touching-fraction", o.synth.touching_fraction, "Share of cells placed touching")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--noise", o.synth.noise_amplitude, "Noise level for grayscale images")->capture_default_str();
}

int report(const BatchResult& r, const char* what) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
  std::cerr << what << ": " << r.processed << " processed, " << r.errors.size() << " failed\n";
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalar field maps and watershed segmentation for cell instance images"};
  // Only --help, so that --h stays free for the h-minima depth.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.config.threads, "Worker threads (0 = all cores)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  add_synth_flags(synth, o);
  synth->add_option("--out", o.out_dir, "Output directory")->required();

  auto* fields = app.add_subcommand("fields", "Compute field maps from 16-bit label PNGs");
  add_field_flags(fields, o);
  fields->add_option("--labels", o.in_dir, "Directory of label PNGs")->required();
  fields->add_option("--out", o.out_dir, "Output directory for FMAP files")->required();
  fields->add_flag("--viz", o.config.visualize, "Also write 8-bit PNG previews");

  auto* seg = app.add_subcommand("segment", "Watershed-segment FMAP field maps");
  add_watershed_flags(seg, o);
  seg->add_option("--fields", o.in_dir, "Directory of FMAP files")->required();
  seg->add_option("--out", o.out_dir, "Output directory for label PNGs")->required();
  seg->add_flag("--viz", o.config.visualize, "Also write color-labeled previews");

  auto* eval = app.add_subcommand("eval", "Score predicted label PNGs against ground truth");
  eval->add_option("--gt", o.gt_dir, "Ground-truth label directory")->required();
  eval->add_option("--pred", o.pred_dir, "Predicted label directory")->required();
  eval->add_option("--out", o.csv, "Metrics CSV path")->required();

  auto* pipe = app.add_subcommand("pipeline", "synth, fields, segment and eval in one run");
  add_synth_flags(pipe, o);
  add_field_flags(pipe, o);
  add_watershed_flags(pipe, o);
  pipe->add_option("--out", o.out_dir, "Output directory")->required();
  pipe->add_flag("--viz", o.config.visualize, "Also write previews");

  CLI11_PARSE(app, argc, argv);

  try {
    o.config.method = field_method_from_string(o.method);
    o.config.diffusion.boundary_rule = boundary_rule_from_string(o.boundary_rule);
    o.config.watershed.connectivity = connectivity_from_int(o.connectivity);
    o.synth.shape_kind = shape_kind_from_string(o.shape);

    if (synth->parsed()) return report(cmd_synth(o.synth, o.n_images, o.out_dir, o.config.threads), "synth");
    if (fields->parsed()) return report(cmd_fields(o.in_dir, o.out_dir, o.config), "fields");
    if (seg->parsed()) return report(cmd_segment(o.in_dir, o.out_dir, o.config), "segment");
    if (eval->parsed()) return report(cmd_eval(o.gt_dir, o.pred_dir, o.csv, o.config.threads), "eval");
    if (pipe->parsed()) return report(cmd_pipeline(o.synth, o.n_images, o.out_dir, o.config), "pipeline");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
