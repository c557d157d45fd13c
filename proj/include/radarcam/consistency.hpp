#ifndef RADARCAM_CONSISTENCY_HPP
#define RADARCAM_CONSISTENCY_HPP

#include <optional>
#include <string>
#include <vector>

#include "radarcam/fusion.hpp"

namespace radarcam {

/// Expected physical height for a detection class, with a multiplicative
/// tolerance band on the predicted pixel height.
struct ClassSizeModel {
  std::string class_label;
  double nominal_height = 1.7;    // m, > 0
  double tolerance_factor = 1.5;  // > 1

  bool operator==(const ClassSizeModel&) const = default;
};

enum class Verdict { kConsistent, kNoRadarReturn, kSizeRangeMismatch };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SizeMismatchDetail {
  double expected_height_px = 0.0;
  double observed_height_px = 0.0;

  bool operator==(const SizeMismatchDetail&) const = default;
};

struct ConsistencyVerdict {
  std::size_t detection_ref = 0;  // index into the checked fused list
  Verdict verdict = Verdict::kConsistent;
  std::optional<SizeMismatchDetail> detail;  // present iff size_range_mismatch

  bool operator==(const ConsistencyVerdict&) const = default;
};

/// Flags camera detections without radar corroboration, and radar-backed
/// detections whose pixel height contradicts the pinhole size expected at
/// their measured range. Classes without a size model pass unscored.
/// Throws NonPositiveRange if a fused range is <= 0.
std::vector<ConsistencyVerdict> check_frame(const std::vector<FusedDetection>& fused,
                                            const std::vector<ClassSizeModel>& models,
                                            double focal_px);

/// focal_px = (image_width / 2) / tan(horizontal_fov / 2)
double estimate_focal(const RigGeometry& g);

}  // namespace radarcam

#endif  // RADARCAM_CONSISTENCY_HPP
