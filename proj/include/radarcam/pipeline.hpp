#ifndef RADARCAM_PIPELINE_HPP
#define RADARCAM_PIPELINE_HPP

#include <cstdint>
#include <vector>

#include "radarcam/consistency.hpp"
#include "radarcam/fusion.hpp"
#include "radarcam/radar_proc.hpp"
#include "radarcam/simulator.hpp"
#include "radarcam/stream_sync.hpp"
#include "radarcam/tracking.hpp"

namespace radarcam {

struct PipelineConfig {
  std::int64_t sync_tolerance_us = 50000;  // half the radar period at 10 FPS
  ClusterConfig cluster;
  AssociationConfig association;
  TrackerConfig tracker;
  std::vector<ClassSizeModel> size_models;
  RigGeometry rig;
  ProjectionMatrix calibration;
};

struct RunOptions {
  bool with_tracking = true;
  bool with_verdicts = true;
};

/// Track state as reported per frame (covariance stays inside the tracker).
struct TrackSnapshot {
  std::int64_t id = 0;
  TrackStatus status = TrackStatus::kTentative;
  std::string class_label;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  int hits = 0;
  int misses = 0;

  bool operator==(const TrackSnapshot&) const = default;
};

struct StageTimings {
  std::int64_t gate_us = 0;
  std::int64_t cluster_us = 0;
  std::int64_t associate_us = 0;
  std::int64_t track_us = 0;
  std::int64_t consistency_us = 0;
};

/// Everything the pipeline produced for one synced pair.
struct FrameReport {
  std::int64_t t_us = 0;
  std::vector<FusedDetection> fused;
  std::vector<TrackSnapshot> tracks;
  std::vector<ConsistencyVerdict> verdicts;
  std::size_t unmatched_clusters = 0;
  StageTimings timings;  // wall-clock; excluded from serialized reports
};

struct RunSummary {
  std::size_t frames = 0;
  std::size_t dropped_detections = 0;
  std::size_t boxes_total = 0;
  std::size_t fused_with_radar = 0;
  std::size_t camera_only = 0;
  std::size_t unmatched_clusters = 0;
  std::size_t confirmed_tracks = 0;  // distinct ids ever confirmed
  std::size_t spoof_no_radar = 0;
  std::size_t spoof_size_mismatch = 0;
  StageTimings mean_timings;

  bool operator==(const RunSummary& o) const;
};

struct RunResult {
  std::vector<FrameReport> reports;
  RunSummary summary;
};

/// Full flow per synced pair: gate -> cluster -> associate -> track ->
/// consistency. Deterministic given inputs and configuration.
RunResult run(const PipelineConfig& cfg, const std::vector<RadarFrame>& radar,
              const std::vector<DetectionFrame>& detections, const RunOptions& opts = {});

struct EvalMetrics {
  double position_rmse_m = 0.0;
  double identity_consistency = 1.0;
  double spoof_precision = 1.0;
  double spoof_recall = 1.0;
  std::size_t dropped_detections = 0;
  std::size_t confirmed_tracks = 0;

  bool operator==(const EvalMetrics&) const = default;
};

/// Scores pipeline reports against the simulator's ground-truth log.
/// Confirmed tracks are matched to the nearest non-spoofed object at the
/// frame where they first report confirmed; RMSE and identity consistency
/// are accumulated over their confirmed frames. A detection counts as
/// spoof-flagged when its verdict is not `consistent`.
EvalMetrics evaluate(const std::vector<FrameReport>& reports, const std::vector<TruthEntry>& truth);

struct TrackErrorSample {
  std::int64_t t_us = 0;
  std::int64_t track_id = 0;
  double error_m = 0.0;
};

/// Per-frame position error of each confirmed track against its initial
/// truth match; the series behind the evaluation RMSE.
std::vector<TrackErrorSample> track_errors(const std::vector<FrameReport>& reports,
                                           const std::vector<TruthEntry>& truth);

}  // namespace radarcam

#endif  // RADARCAM_PIPELINE_HPP
