#ifndef RADARCAM_RADAR_PROC_HPP
#define RADARCAM_RADAR_PROC_HPP

#include <vector>

#include "radarcam/geometry.hpp"
#include "radarcam/stream_sync.hpp"

namespace radarcam {

/// Object-level summary of one connected group of radar returns.
struct RadarCluster {
  RadarPointCartesian centroid;  // arithmetic mean
  double mean_doppler = 0.0;     // SNR-weighted (linear power weights)
  std::size_t point_count = 0;
  double extent = 0.0;  // max pairwise distance, m
  double mean_snr = 0.0;

  double range() const { return centroid.vec().norm(); }

  bool operator==(const RadarCluster&) const = default;
};

struct ClusterConfig {
  double eps = 0.5;           // m, neighborhood radius
  std::size_t min_points = 3;
  double max_range = 10.0;    // m, unambiguous-range gate

  bool operator==(const ClusterConfig&) const = default;
};

/// Keeps only points inside the radar field of view and within max_range,
/// preserving order and timestamp.
RadarFrame gate_frame(const RigGeometry& g, const ClusterConfig& cfg, const RadarFrame& f);

/// Connected components of the eps-neighborhood graph over the frame's points
/// (Cartesian distance <= eps), keeping components of at least min_points.
/// Each kept component is a sorted list of indices into f.points; components
/// are ordered by ascending centroid range.
std::vector<std::vector<std::size_t>> cluster_components(const ClusterConfig& cfg,
                                                         const RadarFrame& f);

/// Summarizes cluster_components into RadarCluster values, same order.
std::vector<RadarCluster> cluster_frame(const ClusterConfig& cfg, const RadarFrame& f);

}  // namespace radarcam

#endif  // RADARCAM_RADAR_PROC_HPP
