#ifndef RADARCAM_SIMULATOR_HPP
#define RADARCAM_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radarcam/calibration.hpp"
#include "radarcam/geometry.hpp"
#include "radarcam/stream_sync.hpp"

namespace radarcam {

/// A simulated target: a vertical stick of the given height moving at
/// constant velocity. Spoofed objects are camera-visible (a flat picture)
/// but produce no radar returns.
struct SceneObject {
  int id = 0;
  std::string class_label = "person";
  double height = 1.7;  // m
  Eigen::Vector3d initial_position = Eigen::Vector3d::Zero();  // radar frame, m
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();          // m/s
  bool spoofed = false;
};

struct NoiseSpec {
  double radar_range_sigma = 0.0;   // m, also the radial scatter of returns
  double radar_angle_sigma = 0.0;   // rad
  double pixel_sigma = 0.0;         // px, on box centers
  double dropout_prob = 0.0;        // [0, 1)
  int points_per_object_min = 5;
  int points_per_object_max = 5;

  bool operator==(const NoiseSpec&) const = default;
};

struct Scene {
  std::vector<SceneObject> objects;
  RigGeometry rig;
  ProjectionMatrix true_matrix;  // usually make_projection_from_rig(rig)
  std::int64_t radar_period_us = 100000;      // 10 FPS
  std::int64_t detection_period_us = 500000;  // 2 FPS
  std::int64_t duration_us = 10000000;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidScene
};

/// Builds the rig's ground-truth projection: pinhole intrinsics from the
/// camera FOV and image size, y flipped from up to image-down, camera center
/// RY below the radar origin; canonicalized.
ProjectionMatrix make_projection_from_rig(const RigGeometry& g);

/// General pinhole composition K [R | -R c] for test and scene construction.
ProjectionMatrix compose_pinhole(double focal_px, double cx, double cy,
                                 const Eigen::Matrix3d& rotation, const Eigen::Vector3d& center);

/// Ground truth at one detection tick for one object. box_index is the
/// object's bounding box position within that frame, or -1 when the object
/// emitted no box (out of image or dropped).
struct TruthEntry {
  std::int64_t t_us = 0;
  int object_id = 0;
  std::string class_label;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  bool spoofed = false;
  int box_index = -1;

  bool operator==(const TruthEntry&) const = default;
};

struct SimOutput {
  std::vector<RadarFrame> radar;
  std::vector<DetectionFrame> detections;
  std::vector<TruthEntry> truth;
  ProjectionMatrix true_calibration;
  std::vector<std::string> warnings;  // objects never observable by either sensor
};

/// Deterministic scene synthesis: radar frames at radar_period_us, detection
/// frames at detection_period_us, ground truth at every detection tick.
SimOutput generate(const Scene& scene);

/// n reflector-sweep correspondences in the joint field of view, pixels
/// computed through the scene's true matrix plus optional pixel noise.
std::vector<Correspondence> generate_correspondences(const Scene& scene, std::size_t n);

}  // namespace radarcam

#endif  // RADARCAM_SIMULATOR_HPP
