#include "radarcam/tracking.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "radarcam/assignment.hpp"

namespace radarcam {

namespace {

constexpr double kInitVelocitySigma = 10.0;  // m/s, prior spread for new tracks
constexpr double kSingularTol = 1e-12;

using Matrix36d = Eigen::Matrix<double, 3, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

Matrix36d position_observation() {
  Matrix36d h = Matrix36d::Zero();
  h.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
  return h;
}

void symmetrize(Matrix6d& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::kTentative: return "tentative";
    case TrackStatus::kConfirmed: return "confirmed";
    case TrackStatus::kLost: return "lost";
  }
  return "tentative";
}

TrackStatus track_status_from_string(const std::string& s) {
  if (s == "confirmed") return TrackStatus::kConfirmed;
  if (s == "lost") return TrackStatus::kLost;
  if (s == "tentative") return TrackStatus::kTentative;
  throw Error("unknown track status: " + s);
}

Track predict(const Track& t, double dt_s, const TrackerConfig& cfg) {
  Track out = t;
  out.state.position += t.state.velocity * dt_s;

  Matrix6d f = Matrix6d::Identity();
  f.block<3, 3>(0, 3) = dt_s * Eigen::Matrix3d::Identity();

  const double q = cfg.process_noise_accel * cfg.process_noise_accel;
  const double dt2 = dt_s * dt_s;
  Matrix6d noise = Matrix6d::Zero();
  noise.block<3, 3>(0, 0) = (q * dt2 * dt2 / 4.0) * Eigen::Matrix3d::Identity();
  noise.block<3, 3>(0, 3) = (q * dt2 * dt_s / 2.0) * Eigen::Matrix3d::Identity();
  noise.block<3, 3>(3, 0) = noise.block<3, 3>(0, 3);
  noise.block<3, 3>(3, 3) = (q * dt2) * Eigen::Matrix3d::Identity();

  out.state.covariance = f * t.state.covariance * f.transpose() + noise;
  symmetrize(out.state.covariance);
  return out;
}

double gate_distance2(const Track& t, const Eigen::Vector3d& position, const TrackerConfig& cfg) {
  const Matrix36d h = position_observation();
  const Eigen::Matrix3d s = h * t.state.covariance * h.transpose() +
                            cfg.meas_noise_pos * cfg.meas_noise_pos * Eigen::Matrix3d::Identity();
  const Eigen::Vector3d innovation = position - t.state.position;
  return innovation.dot(s.llt().solve(innovation));
}

Track update(const Track& t, const TrackMeasurement& z, const TrackerConfig& cfg) {
  Track out = t;
  Vector6d x;
  x << t.state.position, t.state.velocity;
  Matrix6d p = t.state.covariance;

  {
    const Matrix36d h = position_observation();
    const Eigen::Matrix3d r =
        cfg.meas_noise_pos * cfg.meas_noise_pos * Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d s = h * p * h.transpose() + r;
    if (std::abs(s.determinant()) <= kSingularTol) {
      throw SingularInnovation("position innovation covariance is singular");
    }
    const Eigen::Matrix<double, 6, 3> k = p * h.transpose() * s.inverse();
    x += k * (z.position - h * x);
    const Matrix6d ikh = Matrix6d::Identity() - k * h;
    p = ikh * p * ikh.transpose() + k * r * k.transpose();  // Joseph form
    symmetrize(p);
  }

  if (z.radial_velocity) {
    const Eigen::Vector3d pos = x.head<3>();
    const double rho = pos.norm();
    if (rho > 1e-9) {
      const Eigen::Vector3d vel = x.tail<3>();
      const Eigen::Vector3d dir = pos / rho;
      const double predicted = dir.dot(vel);
      Eigen::Matrix<double, 1, 6> h;
      h.head<3>() = ((vel - predicted * dir) / rho).transpose();
      h.tail<3>() = dir.transpose();
      const double r = cfg.meas_noise_doppler * cfg.meas_noise_doppler;
      const double s = (h * p * h.transpose())(0, 0) + r;
      if (std::abs(s) <= kSingularTol) {
        throw SingularInnovation("radial-velocity innovation covariance is singular");
      }
      const Vector6d k = p * h.transpose() / s;
      x += k * (*z.radial_velocity - predicted);
      const Matrix6d ikh = Matrix6d::Identity() - k * h;
      p = ikh * p * ikh.transpose() + k * r * k.transpose();
      symmetrize(p);
    }
  }

  out.state.position = x.head<3>();
  out.state.velocity = x.tail<3>();
  out.state.covariance = p;
  out.hits = t.hits + 1;
  out.misses = 0;
  return out;
}

std::vector<Track> Tracker::step(const std::vector<FusedDetection>& detections,
                                 std::int64_t t_now_us) {
  if (t_now_us < last_step_us_) {
    throw NonMonotoneTime("tracker step time moved backwards: " + std::to_string(t_now_us) +
                          " < " + std::to_string(last_step_us_));
  }

  for (auto& t : tracks_) {
    const double dt = static_cast<double>(t_now_us - t.last_update_us) / 1e6;
    t = predict(t, dt, cfg_);
    t.last_update_us = t_now_us;
  }

  // Gate + optimal assignment on squared Mahalanobis distance.
  const auto n_tracks = static_cast<Eigen::Index>(tracks_.size());
  const auto n_dets = static_cast<Eigen::Index>(detections.size());
  Eigen::MatrixXd cost(n_tracks, n_dets);
  for (Eigen::Index ti = 0; ti < n_tracks; ++ti) {
    for (Eigen::Index di = 0; di < n_dets; ++di) {
      const auto& det = detections[static_cast<std::size_t>(di)];
      const Eigen::Vector3d z = det.cluster->centroid.vec();
      const double d2 = gate_distance2(tracks_[static_cast<std::size_t>(ti)], z, cfg_);
      cost(ti, di) = d2 <= cfg_.gate_chi2 ? d2 : kUnassignable;
    }
  }
  const Assignment assignment = solve_assignment(cost);

  std::vector<bool> det_used(detections.size(), false);
  for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
    const int di = assignment.row_to_col[ti];
    auto& track = tracks_[ti];
    if (di >= 0) {
      const auto& det = detections[static_cast<std::size_t>(di)];
      TrackMeasurement z;
      z.position = det.cluster->centroid.vec();
      z.radial_velocity = det.radial_velocity;
      track = update(track, z, cfg_);
      track.last_update_us = t_now_us;
      if (track.status == TrackStatus::kTentative && track.hits >= cfg_.confirm_hits) {
        track.status = TrackStatus::kConfirmed;
      }
      det_used[static_cast<std::size_t>(di)] = true;
    } else {
      ++track.misses;
      if (track.misses >= cfg_.lose_misses) track.status = TrackStatus::kLost;
    }
  }

  for (std::size_t di = 0; di < detections.size(); ++di) {
    if (det_used[di]) continue;
    const auto& det = detections[di];
    Track t;
    t.id = next_id_++;
    t.state.position = det.cluster->centroid.vec();
    t.state.velocity = Eigen::Vector3d::Zero();
    Matrix6d p = Matrix6d::Zero();
    p.block<3, 3>(0, 0) =
        cfg_.meas_noise_pos * cfg_.meas_noise_pos * Eigen::Matrix3d::Identity();
    p.block<3, 3>(3, 3) = kInitVelocitySigma * kInitVelocitySigma * Eigen::Matrix3d::Identity();
    t.state.covariance = p;
    t.class_label = det.box.class_label;
    t.status = cfg_.confirm_hits <= 1 ? TrackStatus::kConfirmed : TrackStatus::kTentative;
    t.hits = 1;
    t.misses = 0;
    t.last_update_us = t_now_us;
    tracks_.push_back(std::move(t));
  }

  std::vector<Track> emitted = tracks_;
  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::kLost; });
  last_step_us_ = t_now_us;
  return emitted;
}

}  // namespace radarcam
