#include "radarcam/fusion.hpp"

#include <cmath>

#include "radarcam/assignment.hpp"

namespace radarcam {

double association_cost(const ProjectionMatrix& m, const BoundingBox& box, const RadarCluster& c) {
  const PixelCoord uv = project(m, c.centroid);
  const double dist = std::hypot(uv.u - box.center_u(), uv.v - box.center_v());
  return box.contains(uv) ? 0.5 * dist : dist;
}

AssociationResult associate(const ProjectionMatrix& m, const AssociationConfig& cfg,
                            const SyncedPair& pair, const std::vector<RadarCluster>& clusters) {
  const auto& boxes = pair.detection.boxes;
  const auto n_boxes = static_cast<Eigen::Index>(boxes.size());
  const auto n_clusters = static_cast<Eigen::Index>(clusters.size());

  AssociationResult result;

  std::vector<bool> degenerate(clusters.size(), false);
  Eigen::MatrixXd cost(n_boxes, n_clusters);
  for (Eigen::Index ci = 0; ci < n_clusters; ++ci) {
    const auto& cluster = clusters[static_cast<std::size_t>(ci)];
    for (Eigen::Index bi = 0; bi < n_boxes; ++bi) {
      const auto& box = boxes[static_cast<std::size_t>(bi)];
      double c;
      try {
        const PixelCoord uv = project(m, cluster.centroid);
        const bool inside = box.contains(uv);
        if (!cfg.allow_outside_box && !inside) {
          cost(bi, ci) = kUnassignable;
          continue;
        }
        const double dist = std::hypot(uv.u - box.center_u(), uv.v - box.center_v());
        c = inside ? 0.5 * dist : dist;
      } catch (const DegenerateDepth&) {
        degenerate[static_cast<std::size_t>(ci)] = true;
        c = kUnassignable;
      }
      cost(bi, ci) = c <= cfg.gate_px ? c : kUnassignable;
    }
  }
  if (n_boxes == 0) {
    // project() never ran above; still classify clusters for the report
    for (Eigen::Index ci = 0; ci < n_clusters; ++ci) {
      try {
        project(m, clusters[static_cast<std::size_t>(ci)].centroid);
      } catch (const DegenerateDepth&) {
        degenerate[static_cast<std::size_t>(ci)] = true;
      }
    }
  }

  const Assignment assignment = solve_assignment(cost);

  std::vector<bool> cluster_used(clusters.size(), false);
  result.fused.reserve(boxes.size());
  for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
    FusedDetection fd;
    fd.box = boxes[bi];
    fd.t_us = pair.detection.t_us;
    const int ci = assignment.row_to_col[bi];
    if (ci >= 0) {
      const auto& cluster = clusters[static_cast<std::size_t>(ci)];
      fd.cluster = cluster;
      fd.range = cluster.range();
      fd.radial_velocity = cluster.mean_doppler;
      fd.association_cost = cost(static_cast<Eigen::Index>(bi), ci);
      cluster_used[static_cast<std::size_t>(ci)] = true;
    }
    result.fused.push_back(std::move(fd));
  }

  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    if (degenerate[ci]) {
      result.degenerate_clusters.push_back(ci);
    } else if (!cluster_used[ci]) {
      result.unmatched_clusters.push_back(ci);
    }
  }
  return result;
}

}  // namespace radarcam
