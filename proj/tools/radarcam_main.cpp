#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "radarcam/io.hpp"
#include "radarcam/pipeline.hpp"
#include "radarcam/version.hpp"

namespace fs = std::filesystem;
using namespace radarcam;

namespace {

constexpr const char* kSynopsis =
    "usage: radarcam <simulate|calibrate|fuse|track|eval> [options]\n"
    "       radarcam --help for details";

// Shortest round-trip decimal, same formatting the JSON writers use.
std::string fmt(double v) { return nlohmann::json(v).dump(); }

std::string csv_range_profile(const std::vector<RadarFrame>& radar) {
  std::string out = "t_us,r_m\n";
  for (const auto& f : radar) {
    for (const auto& p : f.points) {
      out += std::to_string(f.t_us);
      out += ',';
      out += fmt(p.range);
      out += '\n';
    }
  }
  return out;
}

std::string csv_tracks(const std::vector<FrameReport>& reports) {
  std::string out = "t_us,track_id,status,class,x_m,y_m,z_m,vx_mps,vy_mps,vz_mps\n";
  for (const auto& r : reports) {
    for (const auto& t : r.tracks) {
      out += std::to_string(r.t_us);
      out += ',' + std::to_string(t.id);
      out += ',';
      out += to_string(t.status);
      out += ',' + t.class_label;
      for (int i = 0; i < 3; ++i) out += ',' + fmt(t.position(i));
      for (int i = 0; i < 3; ++i) out += ',' + fmt(t.velocity(i));
      out += '\n';
    }
  }
  return out;
}

std::string csv_track_errors(const std::vector<TrackErrorSample>& samples) {
  std::string out = "t_us,track_id,error_m\n";
  for (const auto& s : samples) {
    out += std::to_string(s.t_us);
    out += ',' + std::to_string(s.track_id);
    out += ',' + fmt(s.error_m);
    out += '\n';
  }
  return out;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

struct FuseArgs {
  std::string calib_path;
  std::string radar_path;
  std::string detections_path;
  std::string config_path;
  std::string out_path;
  std::string metrics_path;
  bool plot_data = false;
};

int run_fuse_like(const FuseArgs& args, const RunOptions& opts) {
  const io::CalibrationFile calib = io::parse_calibration(io::read_file(args.calib_path));
  const auto radar = io::parse_radar_stream(io::read_file(args.radar_path));
  const auto detections = io::parse_detection_stream(io::read_file(args.detections_path));

  PipelineConfig cfg;
  if (!args.config_path.empty()) {
    cfg = io::parse_pipeline_config(io::read_file(args.config_path));
  }
  cfg.calibration = calib.matrix;

  const RunResult result = run(cfg, radar, detections, opts);

  io::write_file_atomic(args.out_path, io::serialize_reports(result.reports));
  if (!args.metrics_path.empty()) {
    io::write_file_atomic(args.metrics_path, io::serialize_run_summary(result.summary));
  }
  if (args.plot_data) {
    io::write_file_atomic(sibling(args.out_path, "_range_profile.csv"), csv_range_profile(radar));
    if (opts.with_tracking) {
      io::write_file_atomic(sibling(args.out_path, "_tracks.csv"), csv_tracks(result.reports));
    }
  }

  const auto& s = result.summary;
  std::cout << "frames: " << s.frames << "  dropped detections: " << s.dropped_detections
            << "  boxes: " << s.boxes_total << " (" << s.fused_with_radar << " radar-backed, "
            << s.camera_only << " camera-only)\n"
            << "unmatched clusters: " << s.unmatched_clusters
            << "  confirmed tracks: " << s.confirmed_tracks
            << "  spoof flags: " << s.spoof_no_radar << " no-radar, " << s.spoof_size_mismatch
            << " size-mismatch\n"
            << "mean stage latency (us): gate " << s.mean_timings.gate_us << ", cluster "
            << s.mean_timings.cluster_us << ", associate " << s.mean_timings.associate_us
            << ", track " << s.mean_timings.track_us << ", consistency "
            << s.mean_timings.consistency_us << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radarcam: offline radar-camera fusion toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate sensor streams from a scene file");
  std::string scene_path, out_dir;
  std::size_t n_corrs = 40;
  bool sim_plot = false;
  sim_cmd->add_option("--scene", scene_path, "Scene description file")->required();
  sim_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
  sim_cmd->add_option("--num-correspondences", n_corrs, "Calibration sweep size (>= 6)")
      ->check(CLI::Range(std::size_t{6}, std::size_t{100000}));
  sim_cmd->add_flag("--plot-data", sim_plot, "Also emit range_profile.csv");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Estimate the projection matrix");
  std::string corr_path, cal_out;
  bool robust = false, cal_plot = false;
  double threshold_px = 2.0;
  int max_iters = 200;
  std::uint64_t seed = 0;
  cal_cmd->add_option("--correspondences", corr_path, "Correspondence file")->required();
  cal_cmd->add_option("--out", cal_out, "Calibration output file")->required();
  cal_cmd->add_flag("--robust", robust, "RANSAC over minimal samples of 6");
  cal_cmd->add_option("--threshold-px", threshold_px, "Inlier reprojection threshold");
  cal_cmd->add_option("--max-iters", max_iters, "RANSAC iterations");
  cal_cmd->add_option("--seed", seed, "RANSAC seed");
  cal_cmd->add_flag("--plot-data", cal_plot, "Also emit per-correspondence residual CSV");

  // fuse / track
  FuseArgs fuse_args, track_args;
  auto add_fuse_options = [](CLI::App* cmd, FuseArgs& args) {
    cmd->add_option("--calib", args.calib_path, "Calibration file")->required();
    cmd->add_option("--radar", args.radar_path, "Radar stream file")->required();
    cmd->add_option("--detections", args.detections_path, "Detection stream file")->required();
    cmd->add_option("--config", args.config_path, "Pipeline configuration file");
    cmd->add_option("--out", args.out_path, "Frame report output file")->required();
    cmd->add_option("--metrics", args.metrics_path, "Run summary output file");
    cmd->add_flag("--plot-data", args.plot_data, "Also emit CSV series next to --out");
  };
  auto* fuse_cmd = app.add_subcommand("fuse", "Associate radar clusters with detections");
  add_fuse_options(fuse_cmd, fuse_args);
  auto* track_cmd =
      app.add_subcommand("track", "Fuse plus multi-object tracking and spoof verdicts");
  add_fuse_options(track_cmd, track_args);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score reports against a ground-truth log");
  std::string reports_path, truth_path, eval_out;
  bool eval_plot = false;
  eval_cmd->add_option("--reports", reports_path, "Frame report file")->required();
  eval_cmd->add_option("--truth", truth_path, "Ground-truth log")->required();
  eval_cmd->add_option("--out", eval_out, "Metrics output file")->required();
  eval_cmd->add_flag("--plot-data", eval_plot, "Also emit error-vs-time CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << kSynopsis << "\n";
    return 2;
  }

  try {
    if (sim_cmd->parsed()) {
      const Scene scene = io::parse_scene(io::read_file(scene_path));
      const SimOutput sim = generate(scene);
      for (const auto& w : sim.warnings) std::cerr << "warning: " << w << "\n";
      const auto corrs = generate_correspondences(scene, n_corrs);

      fs::create_directories(out_dir);
      const fs::path dir(out_dir);
      io::write_file_atomic(dir / "radar.jsonl", io::serialize_radar_stream(sim.radar));
      io::write_file_atomic(dir / "detections.jsonl",
                            io::serialize_detection_stream(sim.detections));
      io::write_file_atomic(dir / "truth.jsonl", io::serialize_truth(sim.truth));
      io::write_file_atomic(dir / "correspondences.jsonl", io::serialize_correspondences(corrs));
      io::CalibrationFile true_calib;
      true_calib.matrix = sim.true_calibration;
      true_calib.rms_error_px = 0.0;
      true_calib.inlier_count = corrs.size();
      true_calib.created_at = io::current_timestamp();
      true_calib.tool_version = kToolVersion;
      io::write_file_atomic(dir / "true_calibration.json", io::serialize_calibration(true_calib));
      if (sim_plot) {
        io::write_file_atomic(dir / "range_profile.csv", csv_range_profile(sim.radar));
      }
      std::cout << "simulated " << sim.radar.size() << " radar frames, " << sim.detections.size()
                << " detection frames, " << corrs.size() << " correspondences -> " << out_dir
                << "\n";
      return 0;
    }

    if (cal_cmd->parsed()) {
      const auto corrs = io::parse_correspondences(io::read_file(corr_path));
      const CalibrationResult result =
          robust ? solve_robust(corrs, threshold_px, max_iters, seed) : solve_dlt(corrs);
      io::CalibrationFile out;
      out.matrix = result.matrix;
      out.rms_error_px = result.rms_reprojection_error;
      out.inlier_count = result.inlier_count();
      out.created_at = io::current_timestamp();
      out.tool_version = kToolVersion;
      io::write_file_atomic(cal_out, io::serialize_calibration(out));
      if (cal_plot) {
        const auto errors = reprojection_errors(result.matrix, corrs);
        std::string csv = "index,inlier,error_px\n";
        for (std::size_t i = 0; i < errors.size(); ++i) {
          csv += std::to_string(i);
          csv += result.inlier_flags[i] ? ",1," : ",0,";
          csv += fmt(errors[i]);
          csv += '\n';
        }
        io::write_file_atomic(sibling(cal_out, "_residuals.csv"), csv);
      }
      std::cout << "calibrated from " << corrs.size() << " correspondences: rms "
                << result.rms_reprojection_error << " px, " << out.inlier_count
                << " inliers, condition ratio " << result.condition_ratio << "\n";
      return 0;
    }

    if (fuse_cmd->parsed()) {
      return run_fuse_like(fuse_args, RunOptions{false, false});
    }
    if (track_cmd->parsed()) {
      return run_fuse_like(track_args, RunOptions{true, true});
    }

    if (eval_cmd->parsed()) {
      const auto reports = io::parse_reports(io::read_file(reports_path));
      const auto truth = io::parse_truth(io::read_file(truth_path));
      const EvalMetrics metrics = evaluate(reports, truth);
      io::write_file_atomic(eval_out, io::serialize_eval_metrics(metrics));
      if (eval_plot) {
        io::write_file_atomic(sibling(eval_out, "_error_vs_time.csv"),
                              csv_track_errors(track_errors(reports, truth)));
      }
      std::cout << "rmse " << metrics.position_rmse_m << " m, identity consistency "
                << metrics.identity_consistency << ", spoof precision " << metrics.spoof_precision
                << ", spoof recall " << metrics.spoof_recall << ", dropped "
                << metrics.dropped_detections << ", confirmed tracks "
                << metrics.confirmed_tracks << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
