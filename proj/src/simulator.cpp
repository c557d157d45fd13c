#include "radarcam/simulator.hpp"

#include <cmath>
#include <random>

#include "radarcam/consistency.hpp"

namespace radarcam {

namespace {

constexpr double kSimSnrDb = 20.0;
constexpr double kSimBoxConfidence = 0.9;
constexpr double kBoxAspect = 0.5;  // width / height of emitted boxes

Eigen::Vector3d position_at(const SceneObject& obj, std::int64_t t_us) {
  return obj.initial_position + obj.velocity * (static_cast<double>(t_us) / 1e6);
}

bool projects_into_image(const ProjectionMatrix& m, const RigGeometry& rig,
                         const Eigen::Vector3d& p, PixelCoord* uv_out) {
  const Eigen::Vector3d uvw = m.matrix() * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
  if (uvw.z() <= 1e-12) return false;  // behind or on the principal plane
  const PixelCoord uv{uvw.x() / uvw.z(), uvw.y() / uvw.z()};
  if (uv_out) *uv_out = uv;
  return uv.u >= 0.0 && uv.u <= rig.image_width && uv.v >= 0.0 && uv.v <= rig.image_height;
}

}  // namespace

void Scene::validate() const {
  rig.validate();
  if (radar_period_us <= 0 || detection_period_us <= 0) {
    throw InvalidScene("scene periods must be positive");
  }
  if (duration_us < radar_period_us && duration_us < detection_period_us) {
    throw InvalidScene("scene duration must cover at least one sensor period");
  }
  if (noise.radar_range_sigma < 0 || noise.radar_angle_sigma < 0 || noise.pixel_sigma < 0) {
    throw InvalidScene("noise sigmas must be non-negative");
  }
  if (noise.dropout_prob < 0.0 || noise.dropout_prob >= 1.0) {
    throw InvalidScene("dropout probability must lie in [0, 1)");
  }
  if (noise.points_per_object_min < 1 || noise.points_per_object_max < noise.points_per_object_min) {
    throw InvalidScene("points_per_object range is invalid");
  }
  for (const auto& obj : objects) {
    if (!(obj.height > 0.0)) {
      throw InvalidScene("object " + std::to_string(obj.id) + " must have positive height");
    }
  }
}

ProjectionMatrix compose_pinhole(double focal_px, double cx, double cy,
                                 const Eigen::Matrix3d& rotation, const Eigen::Vector3d& center) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = k(1, 1) = focal_px;
  k(0, 2) = cx;
  k(1, 2) = cy;
  Matrix34d rt;
  rt.block<3, 3>(0, 0) = rotation;
  rt.col(3) = -rotation * center;
  return ProjectionMatrix::from_matrix(k * rt);
}

ProjectionMatrix make_projection_from_rig(const RigGeometry& g) {
  const double focal = estimate_focal(g);
  // Radar frame is x right / y up / z forward; the imager's v axis grows
  // downward, so y is flipped. The camera center sits RY below the radar.
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r(1, 1) = -1.0;
  const Eigen::Vector3d camera_center(0.0, -g.radar_height_ry, 0.0);
  return compose_pinhole(focal, g.image_width / 2.0, g.image_height / 2.0, r, camera_center);
}

SimOutput generate(const Scene& scene) {
  scene.validate();
  SimOutput out;
  out.true_calibration = scene.true_matrix;

  std::mt19937_64 rng(scene.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit_uniform(0.0, 1.0);
  std::uniform_int_distribution<int> points_dist(scene.noise.points_per_object_min,
                                                 scene.noise.points_per_object_max);

  const double focal = estimate_focal(scene.rig);
  std::vector<bool> observable(scene.objects.size(), false);

  for (std::int64_t t = 0; t < scene.duration_us; t += scene.radar_period_us) {
    RadarFrame frame;
    frame.t_us = t;
    for (std::size_t oi = 0; oi < scene.objects.size(); ++oi) {
      const auto& obj = scene.objects[oi];
      if (obj.spoofed) continue;
      const Eigen::Vector3d p = position_at(obj, t);
      const RadarPointSpherical center_sph =
          cartesian_to_spherical(RadarPointCartesian::from_vec(p));
      if (!in_radar_fov(scene.rig, center_sph)) continue;
      observable[oi] = true;

      const double doppler = p.dot(obj.velocity) / p.norm();
      const int n_points = points_dist(rng);
      for (int k = 0; k < n_points; ++k) {
        RadarPointSpherical pt = center_sph;
        pt.range = std::max(0.0, pt.range + scene.noise.radar_range_sigma * unit_normal(rng));
        pt.azimuth += scene.noise.radar_angle_sigma * unit_normal(rng);
        pt.elevation += scene.noise.radar_angle_sigma * unit_normal(rng);
        pt.doppler = doppler;
        pt.snr = kSimSnrDb;
        frame.points.push_back(pt);
      }
    }
    out.radar.push_back(std::move(frame));
  }

  for (std::int64_t t = 0; t < scene.duration_us; t += scene.detection_period_us) {
    DetectionFrame frame;
    frame.t_us = t;
    std::vector<int> box_index(scene.objects.size(), -1);
    for (std::size_t oi = 0; oi < scene.objects.size(); ++oi) {
      const auto& obj = scene.objects[oi];
      const Eigen::Vector3d p = position_at(obj, t);
      PixelCoord uv;
      if (!projects_into_image(scene.true_matrix, scene.rig, p, &uv)) continue;
      observable[oi] = true;
      if (scene.noise.dropout_prob > 0.0 && unit_uniform(rng) < scene.noise.dropout_prob) continue;

      const double height_px = focal * obj.height / p.norm();
      const double width_px = kBoxAspect * height_px;
      double cu = uv.u, cv = uv.v;
      if (scene.noise.pixel_sigma > 0.0) {
        cu += scene.noise.pixel_sigma * unit_normal(rng);
        cv += scene.noise.pixel_sigma * unit_normal(rng);
      }
      BoundingBox box;
      box.u_min = cu - width_px / 2.0;
      box.u_max = cu + width_px / 2.0;
      box.v_min = cv - height_px / 2.0;
      box.v_max = cv + height_px / 2.0;
      box.class_label = obj.class_label;
      box.confidence = kSimBoxConfidence;
      box_index[oi] = static_cast<int>(frame.boxes.size());
      frame.boxes.push_back(std::move(box));
    }
    for (std::size_t oi = 0; oi < scene.objects.size(); ++oi) {
      const auto& obj = scene.objects[oi];
      TruthEntry entry;
      entry.t_us = t;
      entry.object_id = obj.id;
      entry.class_label = obj.class_label;
      entry.position = position_at(obj, t);
      entry.velocity = obj.velocity;
      entry.spoofed = obj.spoofed;
      entry.box_index = box_index[oi];
      out.truth.push_back(std::move(entry));
    }
    out.detections.push_back(std::move(frame));
  }

  for (std::size_t oi = 0; oi < scene.objects.size(); ++oi) {
    if (!observable[oi]) {
      out.warnings.push_back("object " + std::to_string(scene.objects[oi].id) +
                             " is never observable by either sensor");
    }
  }
  return out;
}

std::vector<Correspondence> generate_correspondences(const Scene& scene, std::size_t n) {
  scene.rig.validate();
  // Decoupled from generate() so the two draws do not interleave.
  std::mt19937_64 rng(scene.seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  const double az_half =
      0.45 * std::min(scene.rig.radar_fov_azimuth, scene.rig.camera_fov_horizontal);
  const double el_half = 0.45 * scene.rig.radar_fov_elevation;
  std::uniform_real_distribution<double> az_dist(-az_half, az_half);
  std::uniform_real_distribution<double> el_dist(-el_half, el_half);
  std::uniform_real_distribution<double> range_dist(1.5, 9.5);

  std::vector<Correspondence> corrs;
  corrs.reserve(n);
  while (corrs.size() < n) {
    RadarPointSpherical sph;
    sph.range = range_dist(rng);
    sph.azimuth = az_dist(rng);
    sph.elevation = el_dist(rng);
    const RadarPointCartesian p = spherical_to_cartesian(sph);
    PixelCoord uv;
    if (!projects_into_image(scene.true_matrix, scene.rig, p.vec(), &uv)) continue;
    if (scene.noise.pixel_sigma > 0.0) {
      uv.u += scene.noise.pixel_sigma * unit_normal(rng);
      uv.v += scene.noise.pixel_sigma * unit_normal(rng);
    }
    corrs.push_back({p, uv, 1.0});
  }
  return corrs;
}

}  // namespace radarcam
