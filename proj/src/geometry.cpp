#include "radarcam/geometry.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace radarcam {

namespace {
// Entries below this magnitude (on the unit-norm matrix) do not decide the
// canonical sign; SVD noise on a structurally zero coefficient must not flip it.
constexpr double kSignEps = 1e-9;
constexpr double kDepthEps = 1e-12;
constexpr double kRankRatio = 1e-10;
}  // namespace

Matrix34d ProjectionMatrix::default_matrix() {
  Matrix34d m = Matrix34d::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
  return m;
}

Matrix34d ProjectionMatrix::canonicalize(const Matrix34d& m) {
  const double norm = m.norm();
  if (!(norm > 0.0) || !m.allFinite()) {
    throw DegenerateConfiguration("projection matrix must be finite and nonzero");
  }
  // Idempotent: an already unit-norm matrix round-trips bit-exactly.
  Matrix34d out = std::abs(norm - 1.0) <= 1e-12 ? m : Matrix34d(m / norm);
  int pivot = -1;
  for (int j = 0; j < 4; ++j) {
    if (std::abs(out(2, j)) > kSignEps) {
      pivot = j;
      break;
    }
  }
  if (pivot < 0) {
    // Last row numerically zero; fall back to its largest entry.
    out.row(2).cwiseAbs().maxCoeff(&pivot);
  }
  if (out(2, pivot) < 0.0) out = -out;
  return out;
}

ProjectionMatrix ProjectionMatrix::from_matrix(const Matrix34d& m) {
  return ProjectionMatrix(canonicalize(m));
}

ProjectionMatrix ProjectionMatrix::from_row_major(const double (&coeffs)[12]) {
  Matrix34d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = coeffs[r * 4 + c];
  return from_matrix(m);
}

void ProjectionMatrix::to_row_major(double (&coeffs)[12]) const {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) coeffs[r * 4 + c] = m_(r, c);
}

void ProjectionMatrix::validate() const {
  if (std::abs(m_.norm() - 1.0) > 1e-12) {
    throw DegenerateConfiguration("projection matrix is not unit-normalized");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(2) <= kRankRatio * sv(0)) {
    throw DegenerateConfiguration("projection matrix is rank-deficient");
  }
}

void RigGeometry::validate() const {
  const bool positive = radar_height_ry > 0.0 && radar_fov_azimuth > 0.0 &&
                        radar_fov_elevation > 0.0 && camera_fov_horizontal > 0.0 &&
                        image_width > 0.0 && image_height > 0.0;
  if (!positive) throw InvalidScene("rig geometry fields must be positive");
  if (radar_fov_azimuth >= 2.0 * M_PI || radar_fov_elevation >= 2.0 * M_PI ||
      camera_fov_horizontal >= 2.0 * M_PI) {
    throw InvalidScene("rig field-of-view widths must be below 2*pi");
  }
}

RadarPointCartesian spherical_to_cartesian(const RadarPointSpherical& p) {
  const double ce = std::cos(p.elevation);
  return {p.range * ce * std::sin(p.azimuth), p.range * std::sin(p.elevation),
          p.range * ce * std::cos(p.azimuth)};
}

RadarPointSpherical cartesian_to_spherical(const RadarPointCartesian& p) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (r == 0.0) throw ZeroRange("cannot convert the origin to spherical coordinates");
  RadarPointSpherical out;
  out.range = r;
  out.azimuth = std::atan2(p.x, p.z);
  out.elevation = std::asin(std::clamp(p.y / r, -1.0, 1.0));
  return out;
}

PixelCoord project(const ProjectionMatrix& m, const RadarPointCartesian& p) {
  const Eigen::Vector4d xh(p.x, p.y, p.z, 1.0);
  const Eigen::Vector3d uvw = m.matrix() * xh;
  if (std::abs(uvw(2)) <= kDepthEps) {
    throw DegenerateDepth("point lies on the camera principal plane");
  }
  return {uvw(0) / uvw(2), uvw(1) / uvw(2)};
}

bool in_radar_fov(const RigGeometry& g, const RadarPointSpherical& p) {
  return std::abs(p.azimuth) <= 0.5 * g.radar_fov_azimuth &&
         std::abs(p.elevation) <= 0.5 * g.radar_fov_elevation;
}

}  // namespace radarcam
