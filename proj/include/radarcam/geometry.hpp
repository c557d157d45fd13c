#ifndef RADARCAM_GEOMETRY_HPP
#define RADARCAM_GEOMETRY_HPP

#include <Eigen/Core>

#include "radarcam/errors.hpp"

namespace radarcam {

using Matrix34d = Eigen::Matrix<double, 3, 4>;

/// A single radar return in the sensor's native spherical form.
/// Azimuth is positive to the right of boresight, elevation positive up,
/// Doppler positive for receding targets.
struct RadarPointSpherical {
  double range = 0.0;      // m, >= 0
  double azimuth = 0.0;    // rad, |az| <= pi
  double elevation = 0.0;  // rad, |el| <= pi/2
  double doppler = 0.0;    // m/s
  double snr = 0.0;        // dB

  bool operator==(const RadarPointSpherical&) const = default;
};

/// Radar Cartesian frame: x right, y up, z forward along boresight.
struct RadarPointCartesian {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static RadarPointCartesian from_vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  bool operator==(const RadarPointCartesian&) const = default;
};

struct PixelCoord {
  double u = 0.0;  // column
  double v = 0.0;  // row

  bool operator==(const PixelCoord&) const = default;
};

/// Homogeneous 3x4 map from radar Cartesian coordinates to pixels, kept in
/// canonical form: unit Frobenius norm, sign fixed so the first
/// non-negligible entry of the last row is positive.
class ProjectionMatrix {
 public:
  ProjectionMatrix() : m_(canonicalize(default_matrix())) {}

  /// Builds the canonical representative of an arbitrary nonzero 3x4 matrix.
  static ProjectionMatrix from_matrix(const Matrix34d& m);
  static ProjectionMatrix from_row_major(const double (&coeffs)[12]);

  const Matrix34d& matrix() const { return m_; }
  void to_row_major(double (&coeffs)[12]) const;

  /// Frobenius distance to another canonical matrix.
  double distance(const ProjectionMatrix& other) const { return (m_ - other.m_).norm(); }

  /// Throws DegenerateConfiguration unless the matrix has full row rank
  /// and unit Frobenius norm.
  void validate() const;

  bool operator==(const ProjectionMatrix& other) const { return m_ == other.m_; }

 private:
  explicit ProjectionMatrix(const Matrix34d& m) : m_(m) {}
  static Matrix34d canonicalize(const Matrix34d& m);
  static Matrix34d default_matrix();

  Matrix34d m_;
};

/// Sensor rig description: mounting height, angular coverage, imager format.
struct RigGeometry {
  double radar_height_ry = 1.0;                     // m above ground
  double radar_fov_azimuth = 108.0 * M_PI / 180.0;  // rad, full width
  double radar_fov_elevation = 44.0 * M_PI / 180.0;
  double camera_fov_horizontal = 65.0 * M_PI / 180.0;
  double image_width = 640.0;   // px
  double image_height = 480.0;  // px

  bool operator==(const RigGeometry&) const = default;

  /// Throws InvalidScene when any field is non-positive or a FOV >= 2*pi.
  void validate() const;
};

/// x = r cos(el) sin(az), y = r sin(el), z = r cos(el) cos(az)
RadarPointCartesian spherical_to_cartesian(const RadarPointSpherical& p);

/// Inverse of spherical_to_cartesian; Doppler and SNR of the result are zero.
/// Throws ZeroRange for the origin.
RadarPointSpherical cartesian_to_spherical(const RadarPointCartesian& p);

/// Applies the homogeneous projection and divides by depth.
/// Throws DegenerateDepth when |w| <= 1e-12.
PixelCoord project(const ProjectionMatrix& m, const RadarPointCartesian& p);

/// Boundary-inclusive angular gate against the radar field of view.
bool in_radar_fov(const RigGeometry& g, const RadarPointSpherical& p);

}  // namespace radarcam

#endif  // RADARCAM_GEOMETRY_HPP
