#ifndef RADARCAM_IO_HPP
#define RADARCAM_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "radarcam/calibration.hpp"
#include "radarcam/pipeline.hpp"
#include "radarcam/simulator.hpp"
#include "radarcam/stream_sync.hpp"

namespace radarcam::io {

// All formats are JSON: streams, correspondences, truth logs and frame
// reports are line-delimited (one object per line, sorted by t_us); the
// rest are single documents. Field order and float formatting are stable,
// parse(serialize(x)) == x at full double precision, and unknown keys are
// rejected with the offending line number.

std::string serialize_radar_stream(const std::vector<RadarFrame>& frames);
std::vector<RadarFrame> parse_radar_stream(const std::string& text);

std::string serialize_detection_stream(const std::vector<DetectionFrame>& frames);
std::vector<DetectionFrame> parse_detection_stream(const std::string& text);

struct CalibrationFile {
  ProjectionMatrix matrix;
  double rms_error_px = 0.0;
  std::size_t inlier_count = 0;
  std::string created_at;
  std::string tool_version;

  bool operator==(const CalibrationFile&) const = default;
};

std::string serialize_calibration(const CalibrationFile& calib);
/// Re-normalizes the stored matrix and validates full rank on read.
CalibrationFile parse_calibration(const std::string& text);

std::string serialize_scene(const Scene& scene);
/// `true_matrix` may be omitted in hand-written scenes; it then defaults to
/// make_projection_from_rig(rig).
Scene parse_scene(const std::string& text);

std::string serialize_size_models(const std::vector<ClassSizeModel>& models);
std::vector<ClassSizeModel> parse_size_models(const std::string& text);

std::string serialize_run_summary(const RunSummary& summary);
RunSummary parse_run_summary(const std::string& text);

std::string serialize_eval_metrics(const EvalMetrics& metrics);
EvalMetrics parse_eval_metrics(const std::string& text);

std::string serialize_correspondences(const std::vector<Correspondence>& corrs);
std::vector<Correspondence> parse_correspondences(const std::string& text);

std::string serialize_truth(const std::vector<TruthEntry>& truth);
std::vector<TruthEntry> parse_truth(const std::string& text);

std::string serialize_reports(const std::vector<FrameReport>& reports);
std::vector<FrameReport> parse_reports(const std::string& text);

std::string serialize_pipeline_config(const PipelineConfig& cfg);
/// Every section is optional and falls back to defaults; the calibration
/// matrix is supplied separately (CLI --calib).
PipelineConfig parse_pipeline_config(const std::string& text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames into place, so a failure never
/// leaves a partial file at the destination.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// UTC ISO-8601 timestamp; honors SOURCE_DATE_EPOCH for reproducible output.
std::string current_timestamp();

}  // namespace radarcam::io

#endif  // RADARCAM_IO_HPP
