#include "radarcam/consistency.hpp"

#include <algorithm>
#include <cmath>

namespace radarcam {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kConsistent: return "consistent";
    case Verdict::kNoRadarReturn: return "no_radar_return";
    case Verdict::kSizeRangeMismatch: return "size_range_mismatch";
  }
  return "consistent";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "consistent") return Verdict::kConsistent;
  if (s == "no_radar_return") return Verdict::kNoRadarReturn;
  if (s == "size_range_mismatch") return Verdict::kSizeRangeMismatch;
  throw Error("unknown verdict: " + s);
}

std::vector<ConsistencyVerdict> check_frame(const std::vector<FusedDetection>& fused,
                                            const std::vector<ClassSizeModel>& models,
                                            double focal_px) {
  if (!(focal_px > 0.0)) throw Error("focal length must be positive");

  std::vector<ConsistencyVerdict> verdicts;
  verdicts.reserve(fused.size());
  for (std::size_t i = 0; i < fused.size(); ++i) {
    const auto& fd = fused[i];
    ConsistencyVerdict v;
    v.detection_ref = i;

    if (!fd.cluster) {
      v.verdict = Verdict::kNoRadarReturn;
      verdicts.push_back(v);
      continue;
    }

    const double range = *fd.range;
    if (range <= 0.0) {
      throw NonPositiveRange("fused detection " + std::to_string(i) +
                             " has non-positive range " + std::to_string(range));
    }

    const auto model = std::find_if(models.begin(), models.end(), [&](const ClassSizeModel& m) {
      return m.class_label == fd.box.class_label;
    });
    if (model == models.end()) {
      v.verdict = Verdict::kConsistent;  // unscored class
      verdicts.push_back(v);
      continue;
    }

    const double expected = focal_px * model->nominal_height / range;
    const double observed = fd.box.height();
    const double lo = expected / model->tolerance_factor;
    const double hi = expected * model->tolerance_factor;
    if (observed < lo || observed > hi) {
      v.verdict = Verdict::kSizeRangeMismatch;
      v.detail = SizeMismatchDetail{expected, observed};
    } else {
      v.verdict = Verdict::kConsistent;
    }
    verdicts.push_back(v);
  }
  return verdicts;
}

double estimate_focal(const RigGeometry& g) {
  if (!(g.camera_fov_horizontal > 0.0) || !(g.camera_fov_horizontal < M_PI)) {
    throw Error("camera horizontal FOV must lie in (0, pi) to derive a focal length");
  }
  return (g.image_width / 2.0) / std::tan(g.camera_fov_horizontal / 2.0);
}

}  // namespace radarcam
