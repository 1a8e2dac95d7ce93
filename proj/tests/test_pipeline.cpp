#include "cellfield/pipeline.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace cellfield;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cellfield_pipe_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SynthSpec small_spec() {
  SynthSpec spec;
  spec.seed = 12;
  spec.width = 64;
  spec.height = 64;
  spec.n_instances = 4;
  spec.radius_min = 3;
  spec.radius_max = 7;
  spec.shape_kind = ShapeKind::mixed;
  return spec;
}

}  // namespace

TEST_CASE("derive_seed spreads indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(0, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 0) != derive_seed(0, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}

TEST_CASE("cmd_synth writes paired images and labels") {
  TempDir dir;
  const BatchResult r = cmd_synth(small_spec(), 3, dir.path, 2);
  CHECK(r.ok());
  CHECK(r.processed == 3);
  for (const char* name : {"0000.png", "0001.png", "0002.png"}) {
    CHECK(fs::exists(dir.path / "images" / name));
    const LabelImage l = read_label_png(dir.path / "labels" / name);
    CHECK(max_label(l) == 4);
  }
}

TEST_CASE("cmd_fields, cmd_segment and cmd_eval chain for every method") {
  TempDir dir;
  REQUIRE(cmd_synth(small_spec(), 2, dir.path, 1).ok());
  for (FieldMethod m : {FieldMethod::poisson, FieldMethod::diffusion, FieldMethod::edt}) {
    PipelineConfig config;
    config.method = m;
    config.visualize = true;
    const fs::path fields = dir.path / ("fields_" + std::string(to_string(m)));
    const fs::path seg = dir.path / ("seg_" + std::string(to_string(m)));
    const BatchResult f = cmd_fields(dir.path / "labels", fields, config);
    CHECK(f.ok());
    CHECK(f.processed == 2);
    CHECK(fs::exists(fields / "0001.fmap"));
    CHECK(fs::exists(fields / "viz" / "0001.png"));
    const std::string report = slurp(fields / "fields_report.csv");
    CHECK(report.rfind("file,method,instances,max_residual,max_iterations,holes\n", 0) == 0);
    CHECK(report.find("0000.png," + std::string(to_string(m)) + ",4,") != std::string::npos);

    const BatchResult s = cmd_segment(fields, seg, config);
    CHECK(s.ok());
    CHECK(fs::exists(seg / "viz" / "0000.png"));
    fs::remove_all(seg / "viz");
    const fs::path csv = dir.path / ("metrics_" + std::string(to_string(m)) + ".csv");
    const BatchResult e = cmd_eval(dir.path / "labels", seg, csv);
    CHECK(e.ok());
    CHECK(e.processed == 2);
    const std::string text = slurp(csv);
    CHECK(text.find("\nmean,8,") != std::string::npos);
  }
}

TEST_CASE("cmd_eval reports orphans and writes nothing") {
  TempDir dir;
  fs::create_directories(dir.path / "gt");
  fs::create_directories(dir.path / "pred");
  LabelImage l(4, 4, 0);
  write_label_png(dir.path / "gt" / "a.png", l);
  write_label_png(dir.path / "gt" / "b.png", l);
  write_label_png(dir.path / "pred" / "a.png", l);
  write_label_png(dir.path / "pred" / "c.png", l);
  const BatchResult r = cmd_eval(dir.path / "gt", dir.path / "pred", dir.path / "m.csv");
  REQUIRE(r.errors.size() == 2);
  CHECK(r.errors[0].find("b.png") != std::string::npos);
  CHECK(r.errors[1].find("c.png") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "m.csv"));
}

TEST_CASE("cmd_eval reports a size mismatch per file") {
  TempDir dir;
  fs::create_directories(dir.path / "gt");
  fs::create_directories(dir.path / "pred");
  write_label_png(dir.path / "gt" / "a.png", LabelImage(4, 4, 0));
  write_label_png(dir.path / "pred" / "a.png", LabelImage(5, 4, 0));
  const BatchResult r = cmd_eval(dir.path / "gt", dir.path / "pred", dir.path / "m.csv");
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].find("dimension mismatch") != std::string::npos);
}

TEST_CASE("empty input directories warn but succeed") {
  TempDir dir;
  fs::create_directories(dir.path / "empty");
  const BatchResult f = cmd_fields(dir.path / "empty", dir.path / "fields", PipelineConfig{});
  CHECK(f.ok());
  CHECK(f.warnings.size() == 1);
  CHECK(slurp(dir.path / "fields" / "fields_report.csv") ==
        "file,method,instances,max_residual,max_iterations,holes\n");
  const BatchResult s = cmd_segment(dir.path / "fields", dir.path / "seg", PipelineConfig{});
  CHECK(s.ok());
  CHECK(s.warnings.size() == 1);
  CHECK_THROWS_AS(cmd_fields(dir.path / "missing", dir.path / "x", PipelineConfig{}), Error);
}

TEST_CASE("a corrupt label file fails alone") {
  TempDir dir;
  REQUIRE(cmd_synth(small_spec(), 2, dir.path, 1).ok());
  std::ofstream(dir.path / "labels" / "0001.png") << "garbage";
  const BatchResult f = cmd_fields(dir.path / "labels", dir.path / "fields", PipelineConfig{});
  CHECK(f.processed == 1);
  REQUIRE(f.errors.size() == 1);
  CHECK(f.errors[0].rfind("0001.png: ", 0) == 0);
  CHECK(fs::exists(dir.path / "fields" / "0000.fmap"));
  CHECK_FALSE(fs::exists(dir.path / "fields" / "0001.fmap"));
}

TEST_CASE("cmd_pipeline is byte-identical across runs and thread counts") {
  TempDir dir;
  PipelineConfig one, many;
  one.threads = 1;
  many.threads = 3;
  REQUIRE(cmd_pipeline(small_spec(), 4, dir.path / "a", one).ok());
  REQUIRE(cmd_pipeline(small_spec(), 4, dir.path / "b", many).ok());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir.path / "a"))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir.path / "a"));
  CHECK(files.size() == 4 * 4 + 2);
  for (const auto& rel : files) {
    INFO(rel.string());
    CHECK(slurp(dir.path / "a" / rel) == slurp(dir.path / "b" / rel));
  }
}
