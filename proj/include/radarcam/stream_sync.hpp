#ifndef RADARCAM_STREAM_SYNC_HPP
#define RADARCAM_STREAM_SYNC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "radarcam/geometry.hpp"

namespace radarcam {

struct RadarFrame {
  std::int64_t t_us = 0;
  std::vector<RadarPointSpherical> points;

  bool operator==(const RadarFrame&) const = default;
};

struct BoundingBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;
  std::string class_label;
  double confidence = 1.0;  // in [0, 1]

  double center_u() const { return 0.5 * (u_min + u_max); }
  double center_v() const { return 0.5 * (v_min + v_max); }
  double height() const { return v_max - v_min; }
  bool contains(const PixelCoord& p) const {
    return p.u >= u_min && p.u <= u_max && p.v >= v_min && p.v <= v_max;
  }

  bool operator==(const BoundingBox&) const = default;
};

struct DetectionFrame {
  std::int64_t t_us = 0;
  std::vector<BoundingBox> boxes;

  bool operator==(const DetectionFrame&) const = default;
};

/// A detection frame matched with its nearest-in-time radar frame.
/// offset_us = radar.t_us - detection.t_us, within the configured tolerance.
struct SyncedPair {
  DetectionFrame detection;
  RadarFrame radar;
  std::int64_t offset_us = 0;
};

struct SyncResult {
  std::vector<SyncedPair> pairs;       // ordered by detection time
  std::size_t dropped_detections = 0;  // no radar frame within tolerance
};

/// Pairs each detection frame with the radar frame of minimal |offset|,
/// ties broken toward the earlier radar frame. Detections with no radar
/// frame within tolerance_us are dropped and counted. A radar frame may
/// serve several detections. Single pass over both sorted streams.
/// Throws UnsortedInput if either stream's timestamps decrease.
SyncResult pair_streams(const std::vector<RadarFrame>& radar,
                        const std::vector<DetectionFrame>& detections,
                        std::int64_t tolerance_us);

}  // namespace radarcam

#endif  // RADARCAM_STREAM_SYNC_HPP
