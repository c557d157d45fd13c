#ifndef RADARCAM_FUSION_HPP
#define RADARCAM_FUSION_HPP

#include <optional>
#include <vector>

#include "radarcam/geometry.hpp"
#include "radarcam/radar_proc.hpp"
#include "radarcam/stream_sync.hpp"

namespace radarcam {

/// A camera detection, optionally enriched with the radar cluster assigned to
/// it. Range, radial velocity and cost are present exactly when the cluster is.
struct FusedDetection {
  BoundingBox box;
  std::optional<RadarCluster> cluster;
  std::optional<double> range;             // m
  std::optional<double> radial_velocity;   // m/s
  std::optional<double> association_cost;  // px
  std::int64_t t_us = 0;

  bool has_radar() const { return cluster.has_value(); }

  bool operator==(const FusedDetection&) const = default;
};

struct AssociationConfig {
  double gate_px = 75.0;
  bool allow_outside_box = true;  // when false, projections outside the box cannot match

  bool operator==(const AssociationConfig&) const = default;
};

struct AssociationResult {
  std::vector<FusedDetection> fused;            // one per box, box order preserved
  std::vector<std::size_t> unmatched_clusters;  // indices into the input cluster list
  std::vector<std::size_t> degenerate_clusters; // excluded: centroid on the principal plane
};

/// Pixel cost of matching a cluster to a box: distance from the projected
/// centroid to the box center, halved when the projection falls inside the
/// box so contained matches are strictly cheaper. Throws DegenerateDepth.
double association_cost(const ProjectionMatrix& m, const BoundingBox& box, const RadarCluster& c);

/// One-to-one box/cluster assignment minimizing total association cost over
/// pairs within gate_px (max-cardinality, then min-cost; ties resolved by
/// (box index, cluster index) order). Every box yields a FusedDetection;
/// boxes without a partner carry no radar fields.
AssociationResult associate(const ProjectionMatrix& m, const AssociationConfig& cfg,
                            const SyncedPair& pair, const std::vector<RadarCluster>& clusters);

}  // namespace radarcam

#endif  // RADARCAM_FUSION_HPP
