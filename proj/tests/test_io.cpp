#include <doctest.h>

#include <filesystem>

#include "docgen.hpp"
#include "radarcam/io.hpp"

using namespace radarcam;
namespace fs = std::filesystem;

TEST_CASE("radar stream round-trip, 20 frames") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(0.0, 20.0), ang(-0.9, 0.9), doppler(-5.0, 5.0);
  std::vector<RadarFrame> frames;
  for (int k = 0; k < 20; ++k) {
    RadarFrame f{k * 100000, {}};
    for (int p = 0; p <= k % 5; ++p) {
      f.points.push_back({r(rng), ang(rng), ang(rng) / 2.0, doppler(rng), 20.0});
    }
    frames.push_back(std::move(f));
  }
  const auto text = io::serialize_radar_stream(frames);
  CHECK(io::parse_radar_stream(text) == frames);
  // Deterministic byte output.
  CHECK(io::serialize_radar_stream(io::parse_radar_stream(text)) == text);
}

TEST_CASE("stream schema violations name the field and line") {
  const std::string good = R"({"t_us":0,"points":[{"r_m":1.0,"az_rad":0.0,"el_rad":0.0,"doppler_mps":0.0,"snr_db":10.0}]})";
  const std::string bad = R"({"t_us":100,"points":[{"r_m":-1.0,"az_rad":0.0,"el_rad":0.0,"doppler_mps":0.0,"snr_db":10.0}]})";

  try {
    io::parse_radar_stream(good + "\n" + good + "\n" + bad + "\n");
    FAIL("expected SchemaViolation");
  } catch (const SchemaViolation& e) {
    CHECK(e.line() == 3);
    CHECK(e.field() == "r_m");
    CHECK(std::string(e.what()).find("r_m") != std::string::npos);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("unsorted stream timestamps are rejected at the first offender") {
  const std::string l1 = R"({"t_us":500,"points":[]})";
  const std::string l2 = R"({"t_us":300,"points":[]})";
  try {
    io::parse_radar_stream(l1 + "\n" + l2 + "\n");
    FAIL("expected UnsortedTimestamps");
  } catch (const UnsortedTimestamps& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(io::parse_radar_stream(R"({"t_us":0,"points":[],"bogus":1})" "\n"),
                  SchemaViolation);
  CHECK_THROWS_AS(io::parse_detection_stream(
                      R"({"t_us":0,"boxes":[{"u_min":0,"v_min":0,"u_max":1,"v_max":1,"class":"x","conf":0.5,"extra":2}]})" "\n"),
                  SchemaViolation);
  CHECK_THROWS_AS(io::parse_calibration(
                      R"({"matrix":[1,0,0,0,0,1,0,0,0,0,1,0],"rms_error_px":0,"inlier_count":6,"created_at":"t","tool_version":"v","color":"red"})"),
                  SchemaViolation);
}

TEST_CASE("malformed lines carry their line number") {
  const std::string good = R"({"t_us":0,"points":[]})";
  try {
    io::parse_radar_stream(good + "\nnot json at all\n");
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("detection boxes are validated") {
  CHECK_THROWS_AS(io::parse_detection_stream(
                      R"({"t_us":0,"boxes":[{"u_min":5,"v_min":0,"u_max":1,"v_max":1,"class":"x","conf":0.5}]})" "\n"),
                  SchemaViolation);
  CHECK_THROWS_AS(io::parse_detection_stream(
                      R"({"t_us":0,"boxes":[{"u_min":0,"v_min":0,"u_max":1,"v_max":1,"class":"x","conf":1.5}]})" "\n"),
                  SchemaViolation);
}

TEST_CASE("calibration file: canonical on write, validated on read") {
  std::mt19937_64 rng(2);
  const auto calib = testsupport::random_calibration(rng);
  const auto text = io::serialize_calibration(calib);
  const auto parsed = io::parse_calibration(text);
  CHECK(parsed == calib);

  // A rank-deficient matrix is rejected on read.
  const std::string rank2 =
      R"({"matrix":[1,0,0,0,0,1,0,0,0,0,0,0],"rms_error_px":0.0,"inlier_count":6,"created_at":"t","tool_version":"v"})";
  CHECK_THROWS_AS(io::parse_calibration(rank2), Error);
}

TEST_CASE("scene round-trip and defaults") {
  std::mt19937_64 rng(3);
  const Scene scene = testsupport::random_scene(rng);
  const Scene parsed = io::parse_scene(io::serialize_scene(scene));
  CHECK(testsupport::scenes_equal(scene, parsed));

  // true_matrix may be omitted; it then derives from the rig.
  const std::string minimal = R"({
    "seed": 1, "duration_us": 1000000, "radar_period_us": 100000,
    "detection_period_us": 500000,
    "rig": {"radar_height_m": 1.0, "radar_fov_az_rad": 1.8849555921538759,
            "radar_fov_el_rad": 0.7679448708775051, "camera_fov_h_rad": 1.1344640137963142,
            "image_width_px": 640.0, "image_height_px": 480.0},
    "noise": {"range_sigma_m": 0.0, "angle_sigma_rad": 0.0, "pixel_sigma_px": 0.0,
              "dropout_prob": 0.0, "points_per_object_min": 5, "points_per_object_max": 5},
    "objects": []
  })";
  const Scene defaulted = io::parse_scene(minimal);
  CHECK(defaulted.true_matrix.distance(make_projection_from_rig(defaulted.rig)) == 0.0);
}

TEST_CASE("size models round-trip and validation") {
  std::mt19937_64 rng(4);
  const auto models = testsupport::random_size_models(rng);
  CHECK(io::parse_size_models(io::serialize_size_models(models)) == models);

  CHECK_THROWS_AS(
      io::parse_size_models(R"({"models":[{"class":"x","nominal_height_m":0.0,"tolerance_factor":1.5}]})"),
      SchemaViolation);
  CHECK_THROWS_AS(
      io::parse_size_models(R"({"models":[{"class":"x","nominal_height_m":1.0,"tolerance_factor":1.0}]})"),
      SchemaViolation);
}

TEST_CASE("metrics round-trips") {
  std::mt19937_64 rng(5);
  const auto summary = testsupport::random_run_summary(rng);
  CHECK(io::parse_run_summary(io::serialize_run_summary(summary)) == summary);

  const auto metrics = testsupport::random_eval_metrics(rng);
  CHECK(io::parse_eval_metrics(io::serialize_eval_metrics(metrics)) == metrics);
}

TEST_CASE("correspondences, truth and reports round-trip") {
  std::mt19937_64 rng(6);
  const auto corrs = testsupport::random_correspondence_doc(rng);
  CHECK(io::parse_correspondences(io::serialize_correspondences(corrs)) == corrs);

  const auto truth = testsupport::random_truth_doc(rng);
  const auto truth_back = io::parse_truth(io::serialize_truth(truth));
  REQUIRE(truth_back.size() == truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) CHECK(truth_back[i] == truth[i]);

  const auto reports = testsupport::random_reports_doc(rng);
  CHECK(testsupport::reports_equal(io::parse_reports(io::serialize_reports(reports)), reports));
}

TEST_CASE("reports parser enforces the cluster/range pairing") {
  const std::string orphan_range =
      R"({"t_us":0,"fused":[{"box":{"u_min":0,"v_min":0,"u_max":1,"v_max":1,"class":"x","conf":0.5},"t_us":0,"range_m":5.0}],"tracks":[],"verdicts":[],"unmatched_clusters":0})";
  CHECK_THROWS_AS(io::parse_reports(orphan_range + "\n"), SchemaViolation);
}

TEST_CASE("pipeline config: partial files fall back to defaults") {
  const PipelineConfig defaults;
  const PipelineConfig parsed = io::parse_pipeline_config(R"({"cluster":{"eps_m":0.8}})");
  CHECK(parsed.cluster.eps == 0.8);
  CHECK(parsed.cluster.min_points == defaults.cluster.min_points);
  CHECK(parsed.tracker == defaults.tracker);
  CHECK(parsed.sync_tolerance_us == defaults.sync_tolerance_us);

  const PipelineConfig cfg = io::parse_pipeline_config(io::serialize_pipeline_config(parsed));
  CHECK(cfg.cluster.eps == 0.8);

  CHECK_THROWS_AS(io::parse_pipeline_config(R"({"cluster":{"eps_m":-1.0}})"), SchemaViolation);
  CHECK_THROWS_AS(io::parse_pipeline_config(R"({"unknown_section":{}})"), SchemaViolation);
}

TEST_CASE("atomic writes never leave partial output") {
  const fs::path dir = fs::temp_directory_path() / "radarcam_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path ok = dir / "ok.json";
  io::write_file_atomic(ok, "{}\n");
  CHECK(io::read_file(ok) == "{}\n");

  const fs::path missing_parent = dir / "no_such_dir" / "out.json";
  CHECK_THROWS_AS(io::write_file_atomic(missing_parent, "data"), Error);
  CHECK_FALSE(fs::exists(missing_parent));
  fs::remove_all(dir);
}

TEST_CASE("timestamp honors SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(io::current_timestamp() == "1970-01-01T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
}
