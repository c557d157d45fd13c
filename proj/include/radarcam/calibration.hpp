#ifndef RADARCAM_CALIBRATION_HPP
#define RADARCAM_CALIBRATION_HPP

#include <cstdint>
#include <vector>

#include "radarcam/geometry.hpp"

namespace radarcam {

/// One radar<->pixel observation of the same physical point, typically
/// collected by sweeping a reflector through the shared field of view.
struct Correspondence {
  RadarPointCartesian radar;
  PixelCoord pixel;
  double weight = 1.0;  // > 0

  bool operator==(const Correspondence&) const = default;
};

struct CalibrationResult {
  ProjectionMatrix matrix;
  double rms_reprojection_error = 0.0;  // px, over the fitted set
  std::vector<bool> inlier_flags;       // one per input correspondence
  /// Ratio of smallest to second-smallest singular value of the stacked
  /// design system (both floored at numerical-rank level). Near zero for a
  /// well-posed fit; approaches 1 when the system is rank-deficient.
  double condition_ratio = 0.0;

  std::size_t inlier_count() const;
};

/// Direct linear estimate of the projection matrix from >= 6 correspondences.
///
/// Stacks two homogeneous equations per correspondence, Hartley-normalizes
/// both point sets, and takes the right singular vector of the smallest
/// singular value. The result is returned in canonical normalization with the
/// RMS reprojection error over all inputs.
///
/// Throws InsufficientCorrespondences below 6 inputs and
/// DegenerateConfiguration when condition_ratio exceeds 0.5 (e.g. all radar
/// points coplanar).
CalibrationResult solve_dlt(const std::vector<Correspondence>& corrs);

/// RANSAC wrapper around solve_dlt: minimal samples of 6, consensus =
/// correspondences with reprojection error < threshold_px, final refit on the
/// largest consensus set. Deterministic given seed. Throws NoConsensus if no
/// sample reaches 6 inliers.
CalibrationResult solve_robust(const std::vector<Correspondence>& corrs, double threshold_px,
                               int max_iters, std::uint64_t seed);

/// Per-correspondence Euclidean pixel distance between the projected radar
/// point and the observed pixel. DegenerateDepth carries the offending index.
std::vector<double> reprojection_errors(const ProjectionMatrix& m,
                                        const std::vector<Correspondence>& corrs);

}  // namespace radarcam

#endif  // RADARCAM_CALIBRATION_HPP
