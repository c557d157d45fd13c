#ifndef RADARCAM_TESTS_SUPPORT_HPP
#define RADARCAM_TESTS_SUPPORT_HPP

// Shared fixtures and independent oracles. Everything here is deliberately
// written from first principles (hand-rolled loops, naive enumeration) so a
// library bug cannot hide behind its own arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "radarcam/calibration.hpp"
#include "radarcam/geometry.hpp"
#include "radarcam/radar_proc.hpp"
#include "radarcam/simulator.hpp"
#include "radarcam/stream_sync.hpp"

namespace testsupport {

using radarcam::Correspondence;
using radarcam::Matrix34d;
using radarcam::ProjectionMatrix;

// ---------------------------------------------------------------------------
// Hand-composed pinhole model, independent of library code paths.

struct HandPinhole {
  double focal = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // t in x_cam = R x + t

  Matrix34d matrix() const {
    Matrix34d p;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) p(r, c) = rotation(r, c);
      p(r, 3) = translation(r);
    }
    Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
    k(0, 0) = k(1, 1) = focal;
    k(0, 2) = cx;
    k(1, 2) = cy;
    return k * p;
  }

  // Direct evaluation: rotate, translate, divide, scale by intrinsics.
  radarcam::PixelCoord project(const Eigen::Vector3d& x) const {
    const Eigen::Vector3d cam = rotation * x + translation;
    return {focal * cam.x() / cam.z() + cx, focal * cam.y() / cam.z() + cy};
  }
};

inline Eigen::Matrix3d rotation_zyx(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

/// Random well-conditioned ground-truth camera for recovery tests.
inline HandPinhole random_pinhole(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> focal(350.0, 800.0);
  std::uniform_real_distribution<double> angle(-0.15, 0.15);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  HandPinhole cam;
  cam.focal = focal(rng);
  cam.rotation = rotation_zyx(angle(rng), angle(rng), angle(rng));
  cam.translation = Eigen::Vector3d(offset(rng), offset(rng), offset(rng));
  return cam;
}

/// Exact correspondences from a hand pinhole over a 3-D box of radar points.
inline std::vector<Correspondence> exact_correspondences(const HandPinhole& cam, std::size_t n,
                                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-3.0, 3.0), y(-1.0, 1.5), z(2.0, 9.5);
  std::vector<Correspondence> corrs;
  corrs.reserve(n);
  while (corrs.size() < n) {
    const Eigen::Vector3d p(x(rng), y(rng), z(rng));
    const auto uv = cam.project(p);
    corrs.push_back({{p.x(), p.y(), p.z()}, uv, 1.0});
  }
  return corrs;
}

// ---------------------------------------------------------------------------
// Brute-force assignment oracle: maximize matched pairs, then minimize cost.

struct BruteAssignment {
  std::size_t matched = 0;
  double total_cost = 0.0;
};

inline void brute_assign_rec(const Eigen::MatrixXd& cost, std::size_t row,
                             std::vector<bool>& col_used, std::size_t matched, double total,
                             BruteAssignment& best) {
  if (row == static_cast<std::size_t>(cost.rows())) {
    if (matched > best.matched || (matched == best.matched && total < best.total_cost)) {
      best.matched = matched;
      best.total_cost = total;
    }
    return;
  }
  brute_assign_rec(cost, row + 1, col_used, matched, total, best);  // row unmatched
  for (std::size_t c = 0; c < static_cast<std::size_t>(cost.cols()); ++c) {
    if (col_used[c] || !std::isfinite(cost(static_cast<Eigen::Index>(row),
                                           static_cast<Eigen::Index>(c)))) {
      continue;
    }
    col_used[c] = true;
    brute_assign_rec(cost, row + 1, col_used, matched + 1,
                     total + cost(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)),
                     best);
    col_used[c] = false;
  }
}

inline BruteAssignment brute_force_assignment(const Eigen::MatrixXd& cost) {
  BruteAssignment best;
  best.matched = 0;
  best.total_cost = std::numeric_limits<double>::max();
  if (cost.rows() == 0 || cost.cols() == 0) return {0, 0.0};
  std::vector<bool> used(static_cast<std::size_t>(cost.cols()), false);
  brute_assign_rec(cost, 0, used, 0, 0.0, best);
  if (best.matched == 0) best.total_cost = 0.0;
  return best;
}

// ---------------------------------------------------------------------------
// Brute-force connected components over a radar frame (independent BFS).

inline std::vector<std::vector<std::size_t>> brute_force_components(
    const radarcam::ClusterConfig& cfg, const radarcam::RadarFrame& f) {
  const std::size_t n = f.points.size();
  std::vector<std::array<double, 3>> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = f.points[i];
    pts[i] = {s.range * std::cos(s.elevation) * std::sin(s.azimuth),
              s.range * std::sin(s.elevation),
              s.range * std::cos(s.elevation) * std::cos(s.azimuth)};
  }
  auto close = [&](std::size_t a, std::size_t b) {
    const double dx = pts[a][0] - pts[b][0];
    const double dy = pts[a][1] - pts[b][1];
    const double dz = pts[a][2] - pts[b][2];
    return dx * dx + dy * dy + dz * dz <= cfg.eps * cfg.eps;
  };
  std::vector<bool> visited(n, false);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t s = 0; s < n; ++s) {
    if (visited[s]) continue;
    std::vector<std::size_t> queue{s}, members;
    visited[s] = true;
    while (!queue.empty()) {
      const std::size_t cur = queue.back();
      queue.pop_back();
      members.push_back(cur);
      for (std::size_t j = 0; j < n; ++j) {
        if (!visited[j] && close(cur, j)) {
          visited[j] = true;
          queue.push_back(j);
        }
      }
    }
    if (members.size() >= cfg.min_points) {
      std::sort(members.begin(), members.end());
      components.push_back(std::move(members));
    }
  }
  return components;
}

// ---------------------------------------------------------------------------
// Closed-form least-squares line fit (per-axis position vs time).

struct LineFit {
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d position_at_end = Eigen::Vector3d::Zero();
};

inline LineFit fit_line(const std::vector<double>& t_s,
                        const std::vector<Eigen::Vector3d>& positions) {
  const auto n = static_cast<double>(t_s.size());
  double st = 0.0, stt = 0.0;
  Eigen::Vector3d sp = Eigen::Vector3d::Zero(), spt = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < t_s.size(); ++i) {
    st += t_s[i];
    stt += t_s[i] * t_s[i];
    sp += positions[i];
    spt += t_s[i] * positions[i];
  }
  LineFit fit;
  const double denom = n * stt - st * st;
  fit.velocity = (n * spt - st * sp) / denom;
  const Eigen::Vector3d intercept = (sp - fit.velocity * st) / n;
  fit.position_at_end = intercept + fit.velocity * t_s.back();
  return fit;
}

// ---------------------------------------------------------------------------
// Scene helpers.

inline radarcam::Scene basic_scene(std::uint64_t seed) {
  radarcam::Scene scene;
  scene.rig = radarcam::RigGeometry{};
  scene.true_matrix = radarcam::make_projection_from_rig(scene.rig);
  scene.seed = seed;
  return scene;
}

inline radarcam::SceneObject make_object(int id, const std::string& cls, double height,
                                         const Eigen::Vector3d& pos, const Eigen::Vector3d& vel,
                                         bool spoofed = false) {
  radarcam::SceneObject obj;
  obj.id = id;
  obj.class_label = cls;
  obj.height = height;
  obj.initial_position = pos;
  obj.velocity = vel;
  obj.spoofed = spoofed;
  return obj;
}

}  // namespace testsupport

#endif  // RADARCAM_TESTS_SUPPORT_HPP
