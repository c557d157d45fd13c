#include "radarcam/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace radarcam {

namespace {

constexpr std::size_t kMinCorrespondences = 6;
constexpr double kDegenerateRatio = 0.5;
// Singular values below this fraction of the largest are numerical noise;
// flooring both trailing values there makes the rank-deficiency ratio
// deterministic instead of a quotient of rounding errors.
constexpr double kRankFloor = 1e-10;

struct PixelNormalization {
  Eigen::Matrix3d transform;  // maps raw homogeneous pixels to normalized ones
};

struct PointNormalization {
  Eigen::Matrix4d transform;
};

PixelNormalization normalize_pixels(const std::vector<Correspondence>& corrs) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& c : corrs) mean += Eigen::Vector2d(c.pixel.u, c.pixel.v);
  mean /= static_cast<double>(corrs.size());
  double rms = 0.0;
  for (const auto& c : corrs) rms += (Eigen::Vector2d(c.pixel.u, c.pixel.v) - mean).squaredNorm();
  rms = std::sqrt(rms / static_cast<double>(corrs.size()));
  const double s = rms > 0.0 ? std::sqrt(2.0) / rms : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = t(1, 1) = s;
  t(0, 2) = -s * mean.x();
  t(1, 2) = -s * mean.y();
  return {t};
}

PointNormalization normalize_points(const std::vector<Correspondence>& corrs) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& c : corrs) mean += c.radar.vec();
  mean /= static_cast<double>(corrs.size());
  double rms = 0.0;
  for (const auto& c : corrs) rms += (c.radar.vec() - mean).squaredNorm();
  rms = std::sqrt(rms / static_cast<double>(corrs.size()));
  const double s = rms > 0.0 ? std::sqrt(3.0) / rms : 1.0;
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t(0, 0) = t(1, 1) = t(2, 2) = s;
  t.block<3, 1>(0, 3) = -s * mean;
  return {t};
}

struct DltSolution {
  Matrix34d matrix;  // not yet canonicalized
  double condition_ratio = 0.0;
};

DltSolution dlt_core(const std::vector<Correspondence>& corrs) {
  const auto pixel_norm = normalize_pixels(corrs);
  const auto point_norm = normalize_points(corrs);

  const auto n = static_cast<Eigen::Index>(corrs.size());
  Eigen::MatrixXd design(2 * n, 12);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = corrs[static_cast<std::size_t>(i)];
    const Eigen::Vector4d xh = point_norm.transform * Eigen::Vector4d(c.radar.x, c.radar.y, c.radar.z, 1.0);
    const Eigen::Vector3d uvh = pixel_norm.transform * Eigen::Vector3d(c.pixel.u, c.pixel.v, 1.0);
    const double u = uvh.x();
    const double v = uvh.y();
    const double w = std::sqrt(c.weight);
    design.row(2 * i) << w * xh.transpose(), Eigen::RowVector4d::Zero(), -w * u * xh.transpose();
    design.row(2 * i + 1) << Eigen::RowVector4d::Zero(), w * xh.transpose(), -w * v * xh.transpose();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double floor = kRankFloor * sv(0);
  const double smallest = std::max(sv(11), floor);
  const double second = std::max(sv(10), floor);
  const double ratio = second > 0.0 ? smallest / second : 1.0;

  const Eigen::VectorXd p = svd.matrixV().col(11);
  Matrix34d normalized;
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 4; ++col) normalized(r, col) = p(r * 4 + col);

  const Matrix34d denorm = pixel_norm.transform.inverse() * normalized * point_norm.transform;
  return {denorm, ratio};
}

double rms_of(const std::vector<double>& errors) {
  if (errors.empty()) return 0.0;
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

std::vector<std::size_t> draw_sample(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  // Partial Fisher-Yates over an index pool.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> sample(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
    sample[i] = pool[i];
  }
  return sample;
}

}  // namespace

std::size_t CalibrationResult::inlier_count() const {
  return static_cast<std::size_t>(std::count(inlier_flags.begin(), inlier_flags.end(), true));
}

CalibrationResult solve_dlt(const std::vector<Correspondence>& corrs) {
  if (corrs.size() < kMinCorrespondences) {
    throw InsufficientCorrespondences("insufficient correspondences: need at least 6, got " +
                                      std::to_string(corrs.size()));
  }
  const DltSolution sol = dlt_core(corrs);
  if (sol.condition_ratio > kDegenerateRatio) {
    throw DegenerateConfiguration(
        "degenerate correspondence configuration (condition ratio " +
        std::to_string(sol.condition_ratio) + "): radar points may be coplanar");
  }
  CalibrationResult result;
  result.matrix = ProjectionMatrix::from_matrix(sol.matrix);
  result.condition_ratio = sol.condition_ratio;
  result.rms_reprojection_error = rms_of(reprojection_errors(result.matrix, corrs));
  result.inlier_flags.assign(corrs.size(), true);
  return result;
}

CalibrationResult solve_robust(const std::vector<Correspondence>& corrs, double threshold_px,
                               int max_iters, std::uint64_t seed) {
  if (corrs.size() < kMinCorrespondences) {
    throw InsufficientCorrespondences("insufficient correspondences: need at least 6, got " +
                                      std::to_string(corrs.size()));
  }
  if (!(threshold_px > 0.0)) {
    throw Error("robust fit requires a positive pixel threshold");
  }

  std::mt19937_64 rng(seed);
  std::vector<bool> best_flags;
  std::size_t best_count = 0;

  for (int iter = 0; iter < max_iters; ++iter) {
    const auto idx = draw_sample(rng, corrs.size(), kMinCorrespondences);
    std::vector<Correspondence> sample;
    sample.reserve(kMinCorrespondences);
    for (auto i : idx) sample.push_back(corrs[i]);

    Matrix34d candidate;
    try {
      const DltSolution sol = dlt_core(sample);
      if (sol.condition_ratio > kDegenerateRatio) continue;
      candidate = ProjectionMatrix::from_matrix(sol.matrix).matrix();
    } catch (const Error&) {
      continue;  // degenerate minimal sample
    }

    std::vector<bool> flags(corrs.size(), false);
    std::size_t count = 0;
    const ProjectionMatrix pm = ProjectionMatrix::from_matrix(candidate);
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      double err;
      try {
        const PixelCoord uv = project(pm, corrs[i].radar);
        err = std::hypot(uv.u - corrs[i].pixel.u, uv.v - corrs[i].pixel.v);
      } catch (const DegenerateDepth&) {
        continue;
      }
      if (err < threshold_px) {
        flags[i] = true;
        ++count;
      }
    }
    if (count > best_count) {
      best_count = count;
      best_flags = std::move(flags);
    }
  }

  if (best_count < kMinCorrespondences) {
    throw NoConsensus("no sample produced a consensus of at least 6 correspondences");
  }

  std::vector<Correspondence> consensus;
  consensus.reserve(best_count);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (best_flags[i]) consensus.push_back(corrs[i]);
  }
  CalibrationResult result = solve_dlt(consensus);
  result.inlier_flags = std::move(best_flags);
  return result;
}

std::vector<double> reprojection_errors(const ProjectionMatrix& m,
                                        const std::vector<Correspondence>& corrs) {
  std::vector<double> errors;
  errors.reserve(corrs.size());
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    try {
      const PixelCoord uv = project(m, corrs[i].radar);
      errors.push_back(std::hypot(uv.u - corrs[i].pixel.u, uv.v - corrs[i].pixel.v));
    } catch (const DegenerateDepth&) {
      throw DegenerateDepth("correspondence " + std::to_string(i) +
                                " has degenerate depth under the matrix",
                            i);
    }
  }
  return errors;
}

}  // namespace radarcam
