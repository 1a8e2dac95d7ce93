#include "cellfield/pipeline.hpp"

#include "cellfield/edt.hpp"
#include "cellfield/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace cellfield {

namespace {

// Runs task(i) for every i in [0, n). Failures are reported per index so the
// caller can assemble messages in a fixed order.
std::vector<std::optional<std::string>> parallel_for(std::size_t n, unsigned threads,
                                                     const std::function<void(std::size_t)>& task) {
  std::vector<std::optional<std::string>> failures(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return failures;
}

void collect(BatchResult& result, const std::vector<fs::path>& inputs,
             const std::vector<std::optional<std::string>>& failures) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (failures[i]) {
      result.errors.push_back(inputs[i].filename().string() + ": " + *failures[i]);
    } else {
      ++result.processed;
    }
  }
}

std::string index_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

}  // namespace

FieldMethod field_method_from_string(std::string_view name) {
  if (name == "poisson") return FieldMethod::poisson;
  if (name == "diffusion") return FieldMethod::diffusion;
  if (name == "edt") return FieldMethod::edt;
  throw Error("unknown field method '" + std::string(name) + "'");
}

std::string_view to_string(FieldMethod method) {
  switch (method) {
    case FieldMethod::diffusion:
      return "diffusion";
    case FieldMethod::edt:
      return "edt";
    default:
      return "poisson";
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

FieldOutcome compute_field(const LabelImage& labels, const PipelineConfig& config) {
  FieldOutcome out;
  out.instances = max_label(labels);
  switch (config.method) {
    case FieldMethod::poisson: {
      PoissonFieldResult r = poisson_field(labels);
      for (const PoissonSolveReport& rep : r.reports) {
        out.max_residual = std::max(out.max_residual, rep.max_residual);
        out.holes = out.holes || rep.has_holes;
      }
      out.field = std::move(r.field);
      break;
    }
    case FieldMethod::diffusion: {
      DiffusionResult r = run_diffusion(labels, config.diffusion);
      for (const InstanceDiffusion& s : r.report.instances) {
        out.max_iterations = std::max(out.max_iterations, s.iterations);
      }
      out.field = std::move(r.field);
      break;
    }
    case FieldMethod::edt:
      out.field = edt_field_map(labels);
      break;
  }
  return out;
}

BatchResult cmd_fields(const fs::path& labels_dir, const fs::path& out_dir, const PipelineConfig& config) {
  BatchResult result;
  const auto inputs = list_files(labels_dir, ".png");
  if (inputs.empty()) result.warnings.push_back("no label images found in " + labels_dir.string());
  fs::create_directories(out_dir);
  if (config.visualize) fs::create_directories(out_dir / "viz");

  std::vector<std::string> rows(inputs.size());
  const auto failures = parallel_for(inputs.size(), config.threads, [&](std::size_t i) {
    const fs::path& in = inputs[i];
    const FieldOutcome f = compute_field(read_label_png(in), config);
    const std::string stem = in.stem().string();
    write_fmap(out_dir / (stem + ".fmap"), f.field);
    if (config.visualize) write_gray8_png(out_dir / "viz" / (stem + ".png"), field_to_gray8(f.field));
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%.3e,%ld,%d", in.filename().c_str(),
                  std::string(to_string(config.method)).c_str(), f.instances, f.max_residual,
                  f.max_iterations, f.holes ? 1 : 0);
    rows[i] = buf;
  });
  collect(result, inputs, failures);

  std::ostringstream report;
  report << "file,method,instances,max_residual,max_iterations,holes\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!failures[i]) report << rows[i] << '\n';
  }
  write_atomically(out_dir / "fields_report.csv", [&](const fs::path& tmp) {
    std::ofstream(tmp, std::ios::binary) << report.str();
  });
  return result;
}

BatchResult cmd_segment(const fs::path& fields_dir, const fs::path& out_dir, const PipelineConfig& config) {
  config.watershed.validate();
  BatchResult result;
  const auto inputs = list_files(fields_dir, ".fmap");
  if (inputs.empty()) result.warnings.push_back("no FMAP files found in " + fields_dir.string());
  fs::create_directories(out_dir);
  if (config.visualize) fs::create_directories(out_dir / "viz");

  const auto failures = parallel_for(inputs.size(), config.threads, [&](std::size_t i) {
    const Field<float> field = read_fmap(inputs[i]);
    const Segmentation seg = segment(field, config.watershed);
    const std::string stem = inputs[i].stem().string();
    write_label_png(out_dir / (stem + ".png"), seg.instances);
    if (config.visualize) {
      write_rgb8_png(out_dir / "viz" / (stem + ".png"), seg.width(), seg.height(),
                     colorize_labels(seg.instances));
    }
  });
  collect(result, inputs, failures);
  return result;
}

BatchResult cmd_eval(const fs::path& gt_dir, const fs::path& pred_dir, const fs::path& csv_path,
                     unsigned threads) {
  BatchResult result;
  const auto gt_files = list_files(gt_dir, ".png");
  const auto pred_files = list_files(pred_dir, ".png");
  std::set<std::string> gt_names, pred_names;
  for (const auto& p : gt_files) gt_names.insert(p.filename().string());
  for (const auto& p : pred_files) pred_names.insert(p.filename().string());
  for (const auto& n : gt_names) {
    if (!pred_names.count(n)) result.errors.push_back("orphan ground truth without prediction: " + n);
  }
  for (const auto& n : pred_names) {
    if (!gt_names.count(n)) result.errors.push_back("orphan prediction without ground truth: " + n);
  }
  if (!result.ok()) return result;
  if (gt_files.empty()) result.warnings.push_back("no images to evaluate in " + gt_dir.string());

  std::vector<MetricsReport> reports(gt_files.size());
  const auto failures = parallel_for(gt_files.size(), threads, [&](std::size_t i) {
    const std::string name = gt_files[i].filename().string();
    const LabelImage gt = read_label_png(gt_files[i]);
    const LabelImage pred = read_label_png(pred_dir / name);
    reports[i] = evaluate(gt, Segmentation::from_labels(pred), name);
  });
  collect(result, gt_files, failures);
  if (!result.ok()) return result;

  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  write_atomically(csv_path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    write_metrics_csv(out, reports);
    if (!out) throw Error("failed to write " + tmp.string());
  });
  return result;
}

BatchResult cmd_synth(const SynthSpec& spec, int n_images, const fs::path& out_dir, unsigned threads) {
  spec.validate();
  if (n_images < 0) throw Error("n_images must be non-negative");
  BatchResult result;
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "labels");
  std::vector<fs::path> names;
  for (int i = 0; i < n_images; ++i) names.emplace_back(index_name(static_cast<std::size_t>(i)) + ".png");

  const auto failures = parallel_for(names.size(), threads, [&](std::size_t i) {
    SynthSpec s = spec;
    s.seed = derive_seed(spec.seed, i);
    const SynthSample sample = generate(s);
    write_gray8_png(out_dir / "images" / names[i], sample.image);
    write_label_png(out_dir / "labels" / names[i], sample.labels);
  });
  collect(result, names, failures);
  return result;
}

BatchResult cmd_pipeline(const SynthSpec& spec, int n_images, const fs::path& out_dir,
                         const PipelineConfig& config) {
  BatchResult result = cmd_synth(spec, n_images, out_dir, config.threads);
  auto chain = [&](BatchResult step) {
    result.errors.insert(result.errors.end(), step.errors.begin(), step.errors.end());
    result.warnings.insert(result.warnings.end(), step.warnings.begin(), step.warnings.end());
  };
  if (!result.ok()) return result;
  chain(cmd_fields(out_dir / "labels", out_dir / "fields", config));
  if (!result.ok()) return result;
  chain(cmd_segment(out_dir / "fields", out_dir / "segmentation", config));
  if (!result.ok()) return result;
  BatchResult eval = cmd_eval(out_dir / "labels", out_dir / "segmentation", out_dir / "metrics.csv",
                              config.threads);
  chain(eval);
  result.processed = eval.processed;
  return result;
}

}  // namespace cellfield
