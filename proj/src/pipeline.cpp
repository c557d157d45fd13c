#include "radarcam/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace radarcam {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_us(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

}  // namespace

bool RunSummary::operator==(const RunSummary& o) const {
  return frames == o.frames && dropped_detections == o.dropped_detections &&
         boxes_total == o.boxes_total && fused_with_radar == o.fused_with_radar &&
         camera_only == o.camera_only && unmatched_clusters == o.unmatched_clusters &&
         confirmed_tracks == o.confirmed_tracks && spoof_no_radar == o.spoof_no_radar &&
         spoof_size_mismatch == o.spoof_size_mismatch;
}

RunResult run(const PipelineConfig& cfg, const std::vector<RadarFrame>& radar,
              const std::vector<DetectionFrame>& detections, const RunOptions& opts) {
  cfg.calibration.validate();
  cfg.rig.validate();

  RunResult result;
  const SyncResult synced = pair_streams(radar, detections, cfg.sync_tolerance_us);
  result.summary.dropped_detections = synced.dropped_detections;

  const double focal = estimate_focal(cfg.rig);
  Tracker tracker(cfg.tracker);
  std::set<std::int64_t> confirmed_ids;
  StageTimings total{};

  auto process_pair = [&](const SyncedPair& pair, FrameReport& report) {
    auto t0 = Clock::now();
    const RadarFrame gated = gate_frame(cfg.rig, cfg.cluster, pair.radar);
    report.timings.gate_us = elapsed_us(t0);

    t0 = Clock::now();
    const std::vector<RadarCluster> clusters = cluster_frame(cfg.cluster, gated);
    report.timings.cluster_us = elapsed_us(t0);

    t0 = Clock::now();
    AssociationResult assoc = associate(cfg.calibration, cfg.association, pair, clusters);
    report.timings.associate_us = elapsed_us(t0);
    report.fused = std::move(assoc.fused);
    report.unmatched_clusters = assoc.unmatched_clusters.size() + assoc.degenerate_clusters.size();

    if (opts.with_tracking) {
      t0 = Clock::now();
      std::vector<FusedDetection> radar_backed;
      for (const auto& fd : report.fused) {
        if (fd.has_radar()) radar_backed.push_back(fd);
      }
      const std::vector<Track> emitted = tracker.step(radar_backed, pair.detection.t_us);
      report.timings.track_us = elapsed_us(t0);
      report.tracks.reserve(emitted.size());
      for (const auto& t : emitted) {
        report.tracks.push_back({t.id, t.status, t.class_label, t.state.position,
                                 t.state.velocity, t.hits, t.misses});
        if (t.status == TrackStatus::kConfirmed) confirmed_ids.insert(t.id);
      }
    }

    if (opts.with_verdicts) {
      t0 = Clock::now();
      report.verdicts = check_frame(report.fused, cfg.size_models, focal);
      report.timings.consistency_us = elapsed_us(t0);
    }
  };

  for (const auto& pair : synced.pairs) {
    FrameReport report;
    report.t_us = pair.detection.t_us;

    try {
      process_pair(pair, report);
    } catch (const Error& e) {
      throw Error("at frame t_us=" + std::to_string(pair.detection.t_us) + ": " + e.what());
    }

    result.summary.boxes_total += report.fused.size();
    for (const auto& fd : report.fused) {
      (fd.has_radar() ? result.summary.fused_with_radar : result.summary.camera_only)++;
    }
    result.summary.unmatched_clusters += report.unmatched_clusters;
    for (const auto& v : report.verdicts) {
      if (v.verdict == Verdict::kNoRadarReturn) ++result.summary.spoof_no_radar;
      if (v.verdict == Verdict::kSizeRangeMismatch) ++result.summary.spoof_size_mismatch;
    }
    total.gate_us += report.timings.gate_us;
    total.cluster_us += report.timings.cluster_us;
    total.associate_us += report.timings.associate_us;
    total.track_us += report.timings.track_us;
    total.consistency_us += report.timings.consistency_us;

    result.reports.push_back(std::move(report));
  }

  result.summary.frames = result.reports.size();
  result.summary.confirmed_tracks = confirmed_ids.size();
  if (!result.reports.empty()) {
    const auto n = static_cast<std::int64_t>(result.reports.size());
    result.summary.mean_timings = {total.gate_us / n, total.cluster_us / n,
                                   total.associate_us / n, total.track_us / n,
                                   total.consistency_us / n};
  }
  return result;
}

EvalMetrics evaluate(const std::vector<FrameReport>& reports,
                     const std::vector<TruthEntry>& truth) {
  EvalMetrics metrics;

  // Truth indexed by tick; spoofed objects are not matchable by tracks.
  std::map<std::int64_t, std::vector<const TruthEntry*>> by_tick;
  for (const auto& e : truth) by_tick[e.t_us].push_back(&e);

  auto nearest_object = [&](std::int64_t t, const Eigen::Vector3d& p) -> int {
    auto it = by_tick.find(t);
    if (it == by_tick.end()) return -1;
    int best_id = -1;
    double best_d2 = std::numeric_limits<double>::max();
    for (const TruthEntry* e : it->second) {
      if (e->spoofed) continue;
      const double d2 = (e->position - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best_id = e->object_id;
      }
    }
    return best_id;
  };
  auto truth_position = [&](std::int64_t t, int object_id) -> const TruthEntry* {
    auto it = by_tick.find(t);
    if (it == by_tick.end()) return nullptr;
    for (const TruthEntry* e : it->second) {
      if (e->object_id == object_id) return e;
    }
    return nullptr;
  };

  std::map<std::int64_t, int> initial_match;  // track id -> object id at confirmation
  double sq_err_acc = 0.0;
  std::size_t err_samples = 0;
  std::size_t id_consistent = 0, id_samples = 0;

  for (const auto& report : reports) {
    for (const auto& track : report.tracks) {
      if (track.status != TrackStatus::kConfirmed) continue;
      auto [it, inserted] = initial_match.try_emplace(track.id, -1);
      if (inserted) it->second = nearest_object(report.t_us, track.position);
      if (it->second < 0) continue;

      if (const TruthEntry* e = truth_position(report.t_us, it->second)) {
        sq_err_acc += (e->position - track.position).squaredNorm();
        ++err_samples;
      }
      ++id_samples;
      if (nearest_object(report.t_us, track.position) == it->second) ++id_consistent;
    }
  }
  metrics.confirmed_tracks = initial_match.size();
  metrics.position_rmse_m = err_samples ? std::sqrt(sq_err_acc / static_cast<double>(err_samples)) : 0.0;
  metrics.identity_consistency =
      id_samples ? static_cast<double>(id_consistent) / static_cast<double>(id_samples) : 1.0;

  // Spoof scoring: flagged = any verdict other than `consistent`; ground
  // truth from the box -> object identity recorded in the log.
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& report : reports) {
    auto it = by_tick.find(report.t_us);
    for (const auto& v : report.verdicts) {
      bool truth_spoofed = false;
      if (it != by_tick.end()) {
        for (const TruthEntry* e : it->second) {
          if (e->box_index == static_cast<int>(v.detection_ref)) {
            truth_spoofed = e->spoofed;
            break;
          }
        }
      }
      const bool flagged = v.verdict != Verdict::kConsistent;
      if (flagged && truth_spoofed) ++tp;
      if (flagged && !truth_spoofed) ++fp;
      if (!flagged && truth_spoofed) ++fn;
    }
  }
  metrics.spoof_precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  metrics.spoof_recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;

  // Every detection tick appears in the truth log, so missing report frames
  // are exactly the detections dropped by synchronization.
  metrics.dropped_detections = by_tick.size() >= reports.size() ? by_tick.size() - reports.size() : 0;
  return metrics;
}

std::vector<TrackErrorSample> track_errors(const std::vector<FrameReport>& reports,
                                           const std::vector<TruthEntry>& truth) {
  std::map<std::int64_t, std::vector<const TruthEntry*>> by_tick;
  for (const auto& e : truth) by_tick[e.t_us].push_back(&e);

  std::map<std::int64_t, int> initial_match;
  std::vector<TrackErrorSample> samples;
  for (const auto& report : reports) {
    auto tick = by_tick.find(report.t_us);
    if (tick == by_tick.end()) continue;
    for (const auto& track : report.tracks) {
      if (track.status != TrackStatus::kConfirmed) continue;
      auto [it, inserted] = initial_match.try_emplace(track.id, -1);
      if (inserted) {
        double best = std::numeric_limits<double>::max();
        for (const TruthEntry* e : tick->second) {
          if (e->spoofed) continue;
          const double d2 = (e->position - track.position).squaredNorm();
          if (d2 < best) {
            best = d2;
            it->second = e->object_id;
          }
        }
      }
      for (const TruthEntry* e : tick->second) {
        if (e->object_id == it->second) {
          samples.push_back({report.t_us, track.id, (e->position - track.position).norm()});
          break;
        }
      }
    }
  }
  return samples;
}

}  // namespace radarcam
