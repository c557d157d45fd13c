#include "radarcam/radar_proc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radarcam {

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

}  // namespace

RadarFrame gate_frame(const RigGeometry& g, const ClusterConfig& cfg, const RadarFrame& f) {
  RadarFrame out;
  out.t_us = f.t_us;
  out.points.reserve(f.points.size());
  for (const auto& p : f.points) {
    if (in_radar_fov(g, p) && p.range <= cfg.max_range) out.points.push_back(p);
  }
  return out;
}

std::vector<std::vector<std::size_t>> cluster_components(const ClusterConfig& cfg,
                                                         const RadarFrame& f) {
  const std::size_t n = f.points.size();
  std::vector<Eigen::Vector3d> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = spherical_to_cartesian(f.points[i]).vec();

  UnionFind uf(n);
  const double eps2 = cfg.eps * cfg.eps;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((pts[i] - pts[j]).squaredNorm() <= eps2) uf.unite(i, j);

  std::vector<std::vector<std::size_t>> by_root(n);
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);

  std::vector<std::vector<std::size_t>> components;
  for (auto& members : by_root) {
    if (members.size() >= cfg.min_points) components.push_back(std::move(members));
  }

  // Order by ascending centroid range; centroid coordinates break exact ties
  // so the output is independent of input permutation.
  auto centroid_of = [&](const std::vector<std::size_t>& members) {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (auto i : members) c += pts[i];
    return Eigen::Vector3d(c / static_cast<double>(members.size()));
  };
  std::sort(components.begin(), components.end(),
            [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
              const Eigen::Vector3d ca = centroid_of(a), cb = centroid_of(b);
              const double ra = ca.norm(), rb = cb.norm();
              if (ra != rb) return ra < rb;
              if (ca.x() != cb.x()) return ca.x() < cb.x();
              if (ca.y() != cb.y()) return ca.y() < cb.y();
              return ca.z() < cb.z();
            });
  return components;
}

std::vector<RadarCluster> cluster_frame(const ClusterConfig& cfg, const RadarFrame& f) {
  const auto components = cluster_components(cfg, f);
  std::vector<Eigen::Vector3d> pts(f.points.size());
  for (std::size_t i = 0; i < f.points.size(); ++i)
    pts[i] = spherical_to_cartesian(f.points[i]).vec();

  std::vector<RadarCluster> clusters;
  clusters.reserve(components.size());
  for (const auto& members : components) {
    RadarCluster c;
    c.point_count = members.size();

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    double doppler_acc = 0.0, weight_acc = 0.0, snr_acc = 0.0;
    for (auto i : members) {
      centroid += pts[i];
      const double w = std::pow(10.0, f.points[i].snr / 10.0);  // dB -> linear power
      doppler_acc += w * f.points[i].doppler;
      weight_acc += w;
      snr_acc += f.points[i].snr;
    }
    centroid /= static_cast<double>(members.size());
    c.centroid = RadarPointCartesian::from_vec(centroid);
    c.mean_doppler = doppler_acc / weight_acc;
    c.mean_snr = snr_acc / static_cast<double>(members.size());

    double extent2 = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        extent2 = std::max(extent2, (pts[members[a]] - pts[members[b]]).squaredNorm());
    c.extent = std::sqrt(extent2);

    clusters.push_back(c);
  }
  return clusters;
}

}  // namespace radarcam
