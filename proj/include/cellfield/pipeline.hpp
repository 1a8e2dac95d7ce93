#pragma once

#include "cellfield/diffusion.hpp"
#include "cellfield/io.hpp"
#include "cellfield/poisson.hpp"
#include "cellfield/synth.hpp"
#include "cellfield/watershed.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cellfield {

enum class FieldMethod { poisson, diffusion, edt };

FieldMethod field_method_from_string(std::string_view name);
std::string_view to_string(FieldMethod method);

struct PipelineConfig {
  FieldMethod method = FieldMethod::poisson;
  WatershedParams watershed;
  DiffusionConfig diffusion;
  bool visualize = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Outcome of a batch command. `errors` holds one message per failed file.
struct BatchResult {
  int processed = 0;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

struct FieldOutcome {
  FieldMap field;
  int instances = 0;
  double max_residual = 0.0;  // poisson only
  long max_iterations = 0;    // diffusion only
  bool holes = false;         // poisson only
};

FieldOutcome compute_field(const LabelImage& labels, const PipelineConfig& config);

/// labels_dir/*.png -> out_dir/<stem>.fmap, plus out_dir/fields_report.csv.
BatchResult cmd_fields(const fs::path& labels_dir, const fs::path& out_dir, const PipelineConfig& config);

/// fields_dir/*.fmap -> out_dir/<stem>.png (16-bit instance maps).
BatchResult cmd_segment(const fs::path& fields_dir, const fs::path& out_dir, const PipelineConfig& config);

/// Compares same-named PNGs and writes the metrics CSV to `csv_path`.
BatchResult cmd_eval(const fs::path& gt_dir, const fs::path& pred_dir, const fs::path& csv_path,
                     unsigned threads = 0);

/// Writes images/NNNN.png and labels/NNNN.png for `n_images` samples. Image i
/// uses a seed derived from `spec.seed` and i.
BatchResult cmd_synth(const SynthSpec& spec, int n_images, const fs::path& out_dir, unsigned threads = 0);

/// synth -> fields -> segment -> eval under out_dir; metrics land in out_dir/metrics.csv.
BatchResult cmd_pipeline(const SynthSpec& spec, int n_images, const fs::path& out_dir,
                         const PipelineConfig& config);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace cellfield
