#include "radarcam/stream_sync.hpp"

#include <cstdlib>

namespace radarcam {

namespace {

std::int64_t abs_offset(std::int64_t radar_t, std::int64_t det_t) {
  return std::llabs(radar_t - det_t);
}

template <typename Frame>
void check_sorted(const std::vector<Frame>& frames, const char* name) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].t_us < frames[i - 1].t_us) {
      throw UnsortedInput(std::string(name) + " stream is not sorted by timestamp");
    }
  }
}

}  // namespace

SyncResult pair_streams(const std::vector<RadarFrame>& radar,
                        const std::vector<DetectionFrame>& detections,
                        std::int64_t tolerance_us) {
  check_sorted(radar, "radar");
  check_sorted(detections, "detection");

  SyncResult out;
  if (radar.empty()) {
    out.dropped_detections = detections.size();
    return out;
  }

  // Both streams are sorted, so the index of the nearest radar frame is
  // non-decreasing across detections.
  std::size_t j = 0;
  for (const auto& det : detections) {
    while (j + 1 < radar.size() &&
           abs_offset(radar[j + 1].t_us, det.t_us) < abs_offset(radar[j].t_us, det.t_us)) {
      ++j;
    }
    const std::int64_t offset = radar[j].t_us - det.t_us;
    if (std::llabs(offset) <= tolerance_us) {
      out.pairs.push_back({det, radar[j], offset});
    } else {
      ++out.dropped_detections;
    }
  }
  return out;
}

}  // namespace radarcam
