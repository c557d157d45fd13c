#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "radarcam/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_cli;
std::string g_data;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path out_file = workdir / "stdout.txt";
  const fs::path err_file = workdir / "stderr.txt";
  const std::string cmd =
      g_cli + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (fs::exists(out_file)) result.out = radarcam::io::read_file(out_file);
  if (fs::exists(err_file)) result.err = radarcam::io::read_file(err_file);
  return result;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("radarcam_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("usage errors exit 2 with a synopsis") {
  TempDir dir("usage");
  const auto bogus = run_cli("frobnicate", dir.path);
  CHECK(bogus.exit_code == 2);
  CHECK(bogus.err.find("usage: radarcam") != std::string::npos);

  const auto missing = run_cli("calibrate", dir.path);  // required options absent
  CHECK(missing.exit_code == 2);

  const auto help = run_cli("--help", dir.path);
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("calibrate rejects five correspondences with a diagnostic") {
  TempDir dir("five");
  std::string lines;
  for (int i = 0; i < 5; ++i) {
    lines += R"({"x_m":)" + std::to_string(i) +
             R"(,"y_m":0.5,"z_m":5.0,"u_px":100.0,"v_px":200.0,"weight":1.0})" "\n";
  }
  radarcam::io::write_file_atomic(dir.path / "corrs.jsonl", lines);

  const auto result = run_cli("calibrate --correspondences " + (dir.path / "corrs.jsonl").string() +
                                  " --out " + (dir.path / "calib.json").string(),
                              dir.path);
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("insufficient correspondences") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "calib.json"));  // no partial output
}

TEST_CASE("fuse rejects a rank-deficient calibration file") {
  TempDir dir("rank2");
  radarcam::io::write_file_atomic(
      dir.path / "calib.json",
      R"({"matrix":[1,0,0,0,0,1,0,0,0,0,0,0],"rms_error_px":0.0,"inlier_count":6,"created_at":"t","tool_version":"v"})");
  radarcam::io::write_file_atomic(dir.path / "radar.jsonl", R"({"t_us":0,"points":[]})" "\n");
  radarcam::io::write_file_atomic(dir.path / "detections.jsonl", R"({"t_us":0,"boxes":[]})" "\n");

  const auto result = run_cli("fuse --calib " + (dir.path / "calib.json").string() + " --radar " +
                                  (dir.path / "radar.jsonl").string() + " --detections " +
                                  (dir.path / "detections.jsonl").string() + " --out " +
                                  (dir.path / "reports.jsonl").string(),
                              dir.path);
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("rank-deficient") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "reports.jsonl"));
}

TEST_CASE("demo chain: simulate, calibrate, track, eval") {
  TempDir dir("chain");
  const std::string scene = g_data + "/demo_scene.json";
  const std::string config = g_data + "/pipeline_config.json";
  const fs::path sim_dir = dir.path / "sim";

  auto r = run_cli("simulate --scene " + scene + " --out-dir " + sim_dir.string() + " --plot-data",
                   dir.path);
  REQUIRE(r.exit_code == 0);
  for (const char* name :
       {"radar.jsonl", "detections.jsonl", "truth.jsonl", "correspondences.jsonl",
        "true_calibration.json", "range_profile.csv"}) {
    CHECK(fs::exists(sim_dir / name));
  }

  r = run_cli("calibrate --correspondences " + (sim_dir / "correspondences.jsonl").string() +
                  " --robust --threshold-px 2 --seed 5 --plot-data --out " +
                  (dir.path / "calib.json").string(),
              dir.path);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.path / "calib_residuals.csv"));

  // The robust fit on the noise-free sweep reproduces the generating matrix.
  const auto estimated = radarcam::io::parse_calibration(
      radarcam::io::read_file(dir.path / "calib.json"));
  const auto truth = radarcam::io::parse_calibration(
      radarcam::io::read_file(sim_dir / "true_calibration.json"));
  CHECK(estimated.matrix.distance(truth.matrix) < 1e-8);

  r = run_cli("track --calib " + (dir.path / "calib.json").string() + " --radar " +
                  (sim_dir / "radar.jsonl").string() + " --detections " +
                  (sim_dir / "detections.jsonl").string() + " --config " + config + " --out " +
                  (dir.path / "reports.jsonl").string() + " --metrics " +
                  (dir.path / "summary.json").string() + " --plot-data",
              dir.path);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.path / "reports_tracks.csv"));
  CHECK(fs::exists(dir.path / "reports_range_profile.csv"));

  const auto summary = radarcam::io::parse_run_summary(
      radarcam::io::read_file(dir.path / "summary.json"));
  CHECK(summary.frames == 20);
  CHECK(summary.confirmed_tracks == 2);

  r = run_cli("eval --reports " + (dir.path / "reports.jsonl").string() + " --truth " +
                  (sim_dir / "truth.jsonl").string() + " --out " +
                  (dir.path / "eval.json").string() + " --plot-data",
              dir.path);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir.path / "eval_error_vs_time.csv"));

  const auto metrics =
      radarcam::io::parse_eval_metrics(radarcam::io::read_file(dir.path / "eval.json"));
  CHECK(metrics.spoof_recall == 1.0);
  CHECK(metrics.spoof_precision == 1.0);
  CHECK(metrics.identity_consistency == 1.0);
  CHECK(metrics.position_rmse_m < 1e-3);
  CHECK(metrics.dropped_detections == 0);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: cli_tests <radarcam-binary> <data-dir> [doctest args]\n");
    return 64;
  }
  g_cli = argv[1];
  g_data = argv[2];
  doctest::Context context;
  context.applyCommandLine(argc - 2, argv + 2);
  return context.run();
}
