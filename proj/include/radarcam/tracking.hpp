#ifndef RADARCAM_TRACKING_HPP
#define RADARCAM_TRACKING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radarcam/fusion.hpp"

namespace radarcam {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Constant-velocity state in radar Cartesian coordinates.
struct TrackState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // m
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // m/s
  Matrix6d covariance = Matrix6d::Identity();          // symmetric positive-definite
};

enum class TrackStatus { kTentative, kConfirmed, kLost };

const char* to_string(TrackStatus s);
TrackStatus track_status_from_string(const std::string& s);

struct Track {
  std::int64_t id = 0;
  TrackState state;
  std::string class_label;
  TrackStatus status = TrackStatus::kTentative;
  int hits = 0;
  int misses = 0;
  std::int64_t last_update_us = 0;
};

struct TrackerConfig {
  double process_noise_accel = 1.0;     // m/s^2, sigma of white acceleration
  double meas_noise_pos = 0.1;          // m
  double meas_noise_doppler = 0.1;      // m/s, for the radial-velocity update
  double gate_chi2 = 7.815;             // squared-Mahalanobis gate, 3 dof
  int confirm_hits = 3;
  int lose_misses = 5;

  bool operator==(const TrackerConfig&) const = default;
};

/// Position measurement with optional Doppler (radial velocity) observation.
struct TrackMeasurement {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<double> radial_velocity;
};

/// Propagates the track dt seconds ahead under the constant-velocity model
/// with piecewise-constant white-acceleration process noise.
Track predict(const Track& t, double dt_s, const TrackerConfig& cfg);

/// Kalman measurement update on position, followed, when Doppler is present,
/// by a scalar update on the linearized radial-velocity observation
/// (p.v)/|p|. Covariance is kept symmetric positive-definite (Joseph form).
/// Throws SingularInnovation when the innovation covariance is not
/// invertible within 1e-12.
Track update(const Track& t, const TrackMeasurement& z, const TrackerConfig& cfg);

/// Squared Mahalanobis distance of a position measurement under the track's
/// predicted measurement distribution.
double gate_distance2(const Track& t, const Eigen::Vector3d& position, const TrackerConfig& cfg);

/// Multi-object tracker: predict, gate, assign, update, manage lifecycle.
/// Track ids are never reused. Steps must have non-decreasing timestamps.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg) : cfg_(cfg) {}

  /// Processes one frame of radar-backed detections (cluster present).
  /// Returns snapshots of all live tracks plus tracks lost this step.
  std::vector<Track> step(const std::vector<FusedDetection>& detections, std::int64_t t_now_us);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 1;
  std::int64_t last_step_us_ = std::numeric_limits<std::int64_t>::min();
};

}  // namespace radarcam

#endif  // RADARCAM_TRACKING_HPP
