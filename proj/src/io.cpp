#include "radarcam/io.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "radarcam/version.hpp"

namespace radarcam::io {

namespace {

using ojson = nlohmann::ordered_json;

ojson parse_object(const std::string& text, std::size_t line) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedLine("malformed JSON at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!j.is_object()) {
    throw MalformedLine("expected a JSON object at line " + std::to_string(line), line);
  }
  return j;
}

bool contains_name(std::initializer_list<const char*> names, const std::string& k) {
  for (const char* n : names) {
    if (k == n) return true;
  }
  return false;
}

void check_keys(const ojson& o, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional, std::size_t line) {
  for (const auto& item : o.items()) {
    if (!contains_name(required, item.key()) && !contains_name(optional, item.key())) {
      throw SchemaViolation("unknown key '" + item.key() + "' at line " + std::to_string(line),
                            line, item.key());
    }
  }
  for (const char* k : required) {
    if (!o.contains(k)) {
      throw SchemaViolation("missing key '" + std::string(k) + "' at line " + std::to_string(line),
                            line, k);
    }
  }
}

[[noreturn]] void field_error(const std::string& field, const std::string& what, std::size_t line) {
  throw SchemaViolation("field '" + field + "' " + what + " at line " + std::to_string(line), line,
                        field);
}

std::int64_t get_int(const ojson& o, const char* key, std::size_t line) {
  const auto& v = o.at(key);
  if (!v.is_number_integer()) field_error(key, "must be an integer", line);
  return v.get<std::int64_t>();
}

double get_double(const ojson& o, const char* key, std::size_t line) {
  const auto& v = o.at(key);
  if (!v.is_number()) field_error(key, "must be a number", line);
  return v.get<double>();
}

std::string get_string(const ojson& o, const char* key, std::size_t line) {
  const auto& v = o.at(key);
  if (!v.is_string()) field_error(key, "must be a string", line);
  return v.get<std::string>();
}

bool get_bool(const ojson& o, const char* key, std::size_t line) {
  const auto& v = o.at(key);
  if (!v.is_boolean()) field_error(key, "must be a boolean", line);
  return v.get<bool>();
}

const ojson& get_array(const ojson& o, const char* key, std::size_t line) {
  const auto& v = o.at(key);
  if (!v.is_array()) field_error(key, "must be an array", line);
  return v;
}

Eigen::Vector3d get_vec3(const ojson& o, const char* key, std::size_t line) {
  const auto& arr = get_array(o, key, line);
  if (arr.size() != 3) field_error(key, "must hold exactly 3 numbers", line);
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number()) field_error(key, "must hold numbers", line);
    v(i) = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

ojson vec3_to_json(const Eigen::Vector3d& v) { return ojson::array({v.x(), v.y(), v.z()}); }

ojson matrix_to_json(const ProjectionMatrix& m) {
  double coeffs[12];
  m.to_row_major(coeffs);
  ojson arr = ojson::array();
  for (double c : coeffs) arr.push_back(c);
  return arr;
}

ProjectionMatrix matrix_from_json(const ojson& o, const char* key, std::size_t line) {
  const auto& arr = get_array(o, key, line);
  if (arr.size() != 12) field_error(key, "must hold exactly 12 numbers (3x4 row-major)", line);
  double coeffs[12];
  for (std::size_t i = 0; i < 12; ++i) {
    if (!arr[i].is_number()) field_error(key, "must hold numbers", line);
    coeffs[i] = arr[i].get<double>();
  }
  try {
    return ProjectionMatrix::from_row_major(coeffs);
  } catch (const Error& e) {
    field_error(key, std::string("is not a usable projection matrix: ") + e.what(), line);
  }
}

// Applies fn to every non-empty line; line numbers are 1-based.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    fn(line, lineno);
  }
}

void check_stream_order(std::int64_t t, std::int64_t prev, std::size_t line) {
  if (t < prev) {
    throw UnsortedTimestamps("timestamps out of order at line " + std::to_string(line) + ": " +
                                 std::to_string(t) + " after " + std::to_string(prev),
                             line);
  }
}

ojson radar_point_to_json(const RadarPointSpherical& p) {
  return ojson{{"r_m", p.range},
               {"az_rad", p.azimuth},
               {"el_rad", p.elevation},
               {"doppler_mps", p.doppler},
               {"snr_db", p.snr}};
}

RadarPointSpherical radar_point_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"r_m", "az_rad", "el_rad", "doppler_mps", "snr_db"}, {}, line);
  RadarPointSpherical p;
  p.range = get_double(o, "r_m", line);
  p.azimuth = get_double(o, "az_rad", line);
  p.elevation = get_double(o, "el_rad", line);
  p.doppler = get_double(o, "doppler_mps", line);
  p.snr = get_double(o, "snr_db", line);
  if (p.range < 0.0) field_error("r_m", "must be >= 0", line);
  if (std::abs(p.azimuth) > M_PI) field_error("az_rad", "must lie in [-pi, pi]", line);
  if (std::abs(p.elevation) > M_PI / 2.0) field_error("el_rad", "must lie in [-pi/2, pi/2]", line);
  return p;
}

ojson box_to_json(const BoundingBox& b) {
  return ojson{{"u_min", b.u_min}, {"v_min", b.v_min}, {"u_max", b.u_max},
               {"v_max", b.v_max}, {"class", b.class_label}, {"conf", b.confidence}};
}

BoundingBox box_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"u_min", "v_min", "u_max", "v_max", "class", "conf"}, {}, line);
  BoundingBox b;
  b.u_min = get_double(o, "u_min", line);
  b.v_min = get_double(o, "v_min", line);
  b.u_max = get_double(o, "u_max", line);
  b.v_max = get_double(o, "v_max", line);
  b.class_label = get_string(o, "class", line);
  b.confidence = get_double(o, "conf", line);
  if (!(b.u_min < b.u_max)) field_error("u_max", "must exceed u_min", line);
  if (!(b.v_min < b.v_max)) field_error("v_max", "must exceed v_min", line);
  if (b.confidence < 0.0 || b.confidence > 1.0) field_error("conf", "must lie in [0, 1]", line);
  return b;
}

ojson rig_to_json(const RigGeometry& g) {
  return ojson{{"radar_height_m", g.radar_height_ry},
               {"radar_fov_az_rad", g.radar_fov_azimuth},
               {"radar_fov_el_rad", g.radar_fov_elevation},
               {"camera_fov_h_rad", g.camera_fov_horizontal},
               {"image_width_px", g.image_width},
               {"image_height_px", g.image_height}};
}

RigGeometry rig_from_json(const ojson& o, std::size_t line) {
  check_keys(o,
             {"radar_height_m", "radar_fov_az_rad", "radar_fov_el_rad", "camera_fov_h_rad",
              "image_width_px", "image_height_px"},
             {}, line);
  RigGeometry g;
  g.radar_height_ry = get_double(o, "radar_height_m", line);
  g.radar_fov_azimuth = get_double(o, "radar_fov_az_rad", line);
  g.radar_fov_elevation = get_double(o, "radar_fov_el_rad", line);
  g.camera_fov_horizontal = get_double(o, "camera_fov_h_rad", line);
  g.image_width = get_double(o, "image_width_px", line);
  g.image_height = get_double(o, "image_height_px", line);
  try {
    g.validate();
  } catch (const Error& e) {
    field_error("rig", std::string("is invalid: ") + e.what(), line);
  }
  return g;
}

ojson cluster_to_json(const RadarCluster& c) {
  return ojson{{"x_m", c.centroid.x},   {"y_m", c.centroid.y},
               {"z_m", c.centroid.z},   {"doppler_mps", c.mean_doppler},
               {"points", c.point_count}, {"extent_m", c.extent},
               {"snr_db", c.mean_snr}};
}

RadarCluster cluster_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"x_m", "y_m", "z_m", "doppler_mps", "points", "extent_m", "snr_db"}, {}, line);
  RadarCluster c;
  c.centroid = {get_double(o, "x_m", line), get_double(o, "y_m", line), get_double(o, "z_m", line)};
  c.mean_doppler = get_double(o, "doppler_mps", line);
  const std::int64_t n = get_int(o, "points", line);
  if (n < 1) field_error("points", "must be >= 1", line);
  c.point_count = static_cast<std::size_t>(n);
  c.extent = get_double(o, "extent_m", line);
  if (c.extent < 0.0) field_error("extent_m", "must be >= 0", line);
  c.mean_snr = get_double(o, "snr_db", line);
  return c;
}

}  // namespace

std::string serialize_radar_stream(const std::vector<RadarFrame>& frames) {
  std::string out;
  for (const auto& f : frames) {
    ojson j{{"t_us", f.t_us}};
    ojson pts = ojson::array();
    for (const auto& p : f.points) pts.push_back(radar_point_to_json(p));
    j["points"] = std::move(pts);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<RadarFrame> parse_radar_stream(const std::string& text) {
  std::vector<RadarFrame> frames;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for_each_line(text, [&](const std::string& line, std::size_t lineno) {
    const ojson j = parse_object(line, lineno);
    check_keys(j, {"t_us", "points"}, {}, lineno);
    RadarFrame f;
    f.t_us = get_int(j, "t_us", lineno);
    if (f.t_us < 0) field_error("t_us", "must be >= 0", lineno);
    check_stream_order(f.t_us, prev, lineno);
    prev = f.t_us;
    for (const auto& p : get_array(j, "points", lineno)) {
      if (!p.is_object()) field_error("points", "must hold objects", lineno);
      f.points.push_back(radar_point_from_json(p, lineno));
    }
    frames.push_back(std::move(f));
  });
  return frames;
}

std::string serialize_detection_stream(const std::vector<DetectionFrame>& frames) {
  std::string out;
  for (const auto& f : frames) {
    ojson j{{"t_us", f.t_us}};
    ojson boxes = ojson::array();
    for (const auto& b : f.boxes) boxes.push_back(box_to_json(b));
    j["boxes"] = std::move(boxes);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<DetectionFrame> parse_detection_stream(const std::string& text) {
  std::vector<DetectionFrame> frames;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for_each_line(text, [&](const std::string& line, std::size_t lineno) {
    const ojson j = parse_object(line, lineno);
    check_keys(j, {"t_us", "boxes"}, {}, lineno);
    DetectionFrame f;
    f.t_us = get_int(j, "t_us", lineno);
    if (f.t_us < 0) field_error("t_us", "must be >= 0", lineno);
    check_stream_order(f.t_us, prev, lineno);
    prev = f.t_us;
    for (const auto& b : get_array(j, "boxes", lineno)) {
      if (!b.is_object()) field_error("boxes", "must hold objects", lineno);
      f.boxes.push_back(box_from_json(b, lineno));
    }
    frames.push_back(std::move(f));
  });
  return frames;
}

std::string serialize_calibration(const CalibrationFile& calib) {
  ojson j{{"matrix", matrix_to_json(calib.matrix)},
          {"rms_error_px", calib.rms_error_px},
          {"inlier_count", calib.inlier_count},
          {"created_at", calib.created_at},
          {"tool_version", calib.tool_version}};
  return j.dump(2) + "\n";
}

CalibrationFile parse_calibration(const std::string& text) {
  const ojson j = parse_object(text, 1);
  check_keys(j, {"matrix", "rms_error_px", "inlier_count", "created_at", "tool_version"}, {}, 1);
  CalibrationFile out;
  out.matrix = matrix_from_json(j, "matrix", 1);
  out.matrix.validate();
  out.rms_error_px = get_double(j, "rms_error_px", 1);
  if (out.rms_error_px < 0.0) field_error("rms_error_px", "must be >= 0", 1);
  const std::int64_t inliers = get_int(j, "inlier_count", 1);
  if (inliers < 6) field_error("inlier_count", "must be >= 6", 1);
  out.inlier_count = static_cast<std::size_t>(inliers);
  out.created_at = get_string(j, "created_at", 1);
  out.tool_version = get_string(j, "tool_version", 1);
  return out;
}

namespace {

ojson noise_to_json(const NoiseSpec& n) {
  return ojson{{"range_sigma_m", n.radar_range_sigma},
               {"angle_sigma_rad", n.radar_angle_sigma},
               {"pixel_sigma_px", n.pixel_sigma},
               {"dropout_prob", n.dropout_prob},
               {"points_per_object_min", n.points_per_object_min},
               {"points_per_object_max", n.points_per_object_max}};
}

NoiseSpec noise_from_json(const ojson& o, std::size_t line) {
  check_keys(o,
             {"range_sigma_m", "angle_sigma_rad", "pixel_sigma_px", "dropout_prob",
              "points_per_object_min", "points_per_object_max"},
             {}, line);
  NoiseSpec n;
  n.radar_range_sigma = get_double(o, "range_sigma_m", line);
  n.radar_angle_sigma = get_double(o, "angle_sigma_rad", line);
  n.pixel_sigma = get_double(o, "pixel_sigma_px", line);
  n.dropout_prob = get_double(o, "dropout_prob", line);
  n.points_per_object_min = static_cast<int>(get_int(o, "points_per_object_min", line));
  n.points_per_object_max = static_cast<int>(get_int(o, "points_per_object_max", line));
  return n;
}

ojson scene_object_to_json(const SceneObject& obj) {
  return ojson{{"id", obj.id},
               {"class", obj.class_label},
               {"height_m", obj.height},
               {"position_m", vec3_to_json(obj.initial_position)},
               {"velocity_mps", vec3_to_json(obj.velocity)},
               {"spoofed", obj.spoofed}};
}

SceneObject scene_object_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"id", "class", "height_m", "position_m", "velocity_mps", "spoofed"}, {}, line);
  SceneObject obj;
  obj.id = static_cast<int>(get_int(o, "id", line));
  obj.class_label = get_string(o, "class", line);
  obj.height = get_double(o, "height_m", line);
  if (!(obj.height > 0.0)) field_error("height_m", "must be > 0", line);
  obj.initial_position = get_vec3(o, "position_m", line);
  obj.velocity = get_vec3(o, "velocity_mps", line);
  obj.spoofed = get_bool(o, "spoofed", line);
  return obj;
}

}  // namespace

std::string serialize_scene(const Scene& scene) {
  ojson objs = ojson::array();
  for (const auto& o : scene.objects) objs.push_back(scene_object_to_json(o));
  ojson j{{"seed", scene.seed},
          {"duration_us", scene.duration_us},
          {"radar_period_us", scene.radar_period_us},
          {"detection_period_us", scene.detection_period_us},
          {"rig", rig_to_json(scene.rig)},
          {"noise", noise_to_json(scene.noise)},
          {"objects", std::move(objs)},
          {"true_matrix", matrix_to_json(scene.true_matrix)}};
  return j.dump(2) + "\n";
}

Scene parse_scene(const std::string& text) {
  const ojson j = parse_object(text, 1);
  check_keys(j,
             {"seed", "duration_us", "radar_period_us", "detection_period_us", "rig", "noise",
              "objects"},
             {"true_matrix"}, 1);

  Scene scene;
  scene.seed = static_cast<std::uint64_t>(get_int(j, "seed", 1));
  scene.duration_us = get_int(j, "duration_us", 1);
  scene.radar_period_us = get_int(j, "radar_period_us", 1);
  scene.detection_period_us = get_int(j, "detection_period_us", 1);
  if (!j.at("rig").is_object()) field_error("rig", "must be an object", 1);
  scene.rig = rig_from_json(j.at("rig"), 1);
  if (!j.at("noise").is_object()) field_error("noise", "must be an object", 1);
  scene.noise = noise_from_json(j.at("noise"), 1);
  for (const auto& o : get_array(j, "objects", 1)) {
    if (!o.is_object()) field_error("objects", "must hold objects", 1);
    scene.objects.push_back(scene_object_from_json(o, 1));
  }
  scene.true_matrix =
      j.contains("true_matrix") ? matrix_from_json(j, "true_matrix", 1) : make_projection_from_rig(scene.rig);
  try {
    scene.validate();
  } catch (const Error& e) {
    throw SchemaViolation(std::string("invalid scene: ") + e.what(), 1);
  }
  return scene;
}

std::string serialize_size_models(const std::vector<ClassSizeModel>& models) {
  ojson arr = ojson::array();
  for (const auto& m : models) {
    arr.push_back(ojson{{"class", m.class_label},
                        {"nominal_height_m", m.nominal_height},
                        {"tolerance_factor", m.tolerance_factor}});
  }
  return ojson{{"models", std::move(arr)}}.dump(2) + "\n";
}

std::vector<ClassSizeModel> parse_size_models(const std::string& text) {
  const ojson j = parse_object(text, 1);
  check_keys(j, {"models"}, {}, 1);
  std::vector<ClassSizeModel> models;
  for (const auto& o : get_array(j, "models", 1)) {
    if (!o.is_object()) field_error("models", "must hold objects", 1);
    check_keys(o, {"class", "nominal_height_m", "tolerance_factor"}, {}, 1);
    ClassSizeModel m;
    m.class_label = get_string(o, "class", 1);
    m.nominal_height = get_double(o, "nominal_height_m", 1);
    m.tolerance_factor = get_double(o, "tolerance_factor", 1);
    if (!(m.nominal_height > 0.0)) field_error("nominal_height_m", "must be > 0", 1);
    if (!(m.tolerance_factor > 1.0)) field_error("tolerance_factor", "must be > 1", 1);
    models.push_back(std::move(m));
  }
  return models;
}

std::string serialize_run_summary(const RunSummary& s) {
  ojson j{{"frames", s.frames},
          {"dropped_detections", s.dropped_detections},
          {"boxes_total", s.boxes_total},
          {"fused_with_radar", s.fused_with_radar},
          {"camera_only", s.camera_only},
          {"unmatched_clusters", s.unmatched_clusters},
          {"confirmed_tracks", s.confirmed_tracks},
          {"spoof_no_radar", s.spoof_no_radar},
          {"spoof_size_mismatch", s.spoof_size_mismatch}};
  return j.dump(2) + "\n";
}

RunSummary parse_run_summary(const std::string& text) {
  const ojson j = parse_object(text, 1);
  check_keys(j,
             {"frames", "dropped_detections", "boxes_total", "fused_with_radar", "camera_only",
              "unmatched_clusters", "confirmed_tracks", "spoof_no_radar", "spoof_size_mismatch"},
             {}, 1);
  RunSummary s;
  auto get_count = [&](const char* key) {
    const std::int64_t v = get_int(j, key, 1);
    if (v < 0) field_error(key, "must be >= 0", 1);
    return static_cast<std::size_t>(v);
  };
  s.frames = get_count("frames");
  s.dropped_detections = get_count("dropped_detections");
  s.boxes_total = get_count("boxes_total");
  s.fused_with_radar = get_count("fused_with_radar");
  s.camera_only = get_count("camera_only");
  s.unmatched_clusters = get_count("unmatched_clusters");
  s.confirmed_tracks = get_count("confirmed_tracks");
  s.spoof_no_radar = get_count("spoof_no_radar");
  s.spoof_size_mismatch = get_count("spoof_size_mismatch");
  return s;
}

std::string serialize_eval_metrics(const EvalMetrics& m) {
  ojson j{{"position_rmse_m", m.position_rmse_m},
          {"identity_consistency", m.identity_consistency},
          {"spoof_precision", m.spoof_precision},
          {"spoof_recall", m.spoof_recall},
          {"dropped_detections", m.dropped_detections},
          {"confirmed_tracks", m.confirmed_tracks}};
  return j.dump(2) + "\n";
}

EvalMetrics parse_eval_metrics(const std::string& text) {
  const ojson j = parse_object(text, 1);
  check_keys(j,
             {"position_rmse_m", "identity_consistency", "spoof_precision", "spoof_recall",
              "dropped_detections", "confirmed_tracks"},
             {}, 1);
  EvalMetrics m;
  m.position_rmse_m = get_double(j, "position_rmse_m", 1);
  m.identity_consistency = get_double(j, "identity_consistency", 1);
  m.spoof_precision = get_double(j, "spoof_precision", 1);
  m.spoof_recall = get_double(j, "spoof_recall", 1);
  m.dropped_detections = static_cast<std::size_t>(get_int(j, "dropped_detections", 1));
  m.confirmed_tracks = static_cast<std::size_t>(get_int(j, "confirmed_tracks", 1));
  return m;
}

std::string serialize_correspondences(const std::vector<Correspondence>& corrs) {
  std::string out;
  for (const auto& c : corrs) {
    ojson j{{"x_m", c.radar.x}, {"y_m", c.radar.y},   {"z_m", c.radar.z},
            {"u_px", c.pixel.u}, {"v_px", c.pixel.v}, {"weight", c.weight}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Correspondence> parse_correspondences(const std::string& text) {
  std::vector<Correspondence> corrs;
  for_each_line(text, [&](const std::string& line, std::size_t lineno) {
    const ojson j = parse_object(line, lineno);
    check_keys(j, {"x_m", "y_m", "z_m", "u_px", "v_px", "weight"}, {}, lineno);
    Correspondence c;
    c.radar = {get_double(j, "x_m", lineno), get_double(j, "y_m", lineno),
               get_double(j, "z_m", lineno)};
    c.pixel = {get_double(j, "u_px", lineno), get_double(j, "v_px", lineno)};
    c.weight = get_double(j, "weight", lineno);
    if (!(c.weight > 0.0)) field_error("weight", "must be > 0", lineno);
    corrs.push_back(c);
  });
  return corrs;
}

std::string serialize_truth(const std::vector<TruthEntry>& truth) {
  std::string out;
  for (const auto& e : truth) {
    ojson j{{"t_us", e.t_us},
            {"object_id", e.object_id},
            {"class", e.class_label},
            {"position_m", vec3_to_json(e.position)},
            {"velocity_mps", vec3_to_json(e.velocity)},
            {"spoofed", e.spoofed},
            {"box_index", e.box_index}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TruthEntry> parse_truth(const std::string& text) {
  std::vector<TruthEntry> truth;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for_each_line(text, [&](const std::string& line, std::size_t lineno) {
    const ojson j = parse_object(line, lineno);
    check_keys(j, {"t_us", "object_id", "class", "position_m", "velocity_mps", "spoofed",
                   "box_index"},
               {}, lineno);
    TruthEntry e;
    e.t_us = get_int(j, "t_us", lineno);
    check_stream_order(e.t_us, prev, lineno);
    prev = e.t_us;
    e.object_id = static_cast<int>(get_int(j, "object_id", lineno));
    e.class_label = get_string(j, "class", lineno);
    e.position = get_vec3(j, "position_m", lineno);
    e.velocity = get_vec3(j, "velocity_mps", lineno);
    e.spoofed = get_bool(j, "spoofed", lineno);
    e.box_index = static_cast<int>(get_int(j, "box_index", lineno));
    truth.push_back(std::move(e));
  });
  return truth;
}

namespace {

ojson fused_to_json(const FusedDetection& fd) {
  ojson j{{"box", box_to_json(fd.box)}, {"t_us", fd.t_us}};
  if (fd.cluster) {
    j["cluster"] = cluster_to_json(*fd.cluster);
    j["range_m"] = *fd.range;
    j["radial_velocity_mps"] = *fd.radial_velocity;
    j["association_cost_px"] = *fd.association_cost;
  }
  return j;
}

FusedDetection fused_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"box", "t_us"},
             {"cluster", "range_m", "radial_velocity_mps", "association_cost_px"}, line);
  FusedDetection fd;
  if (!o.at("box").is_object()) field_error("box", "must be an object", line);
  fd.box = box_from_json(o.at("box"), line);
  fd.t_us = get_int(o, "t_us", line);
  if (o.contains("cluster")) {
    if (!o.contains("range_m") || !o.contains("radial_velocity_mps") ||
        !o.contains("association_cost_px")) {
      field_error("cluster", "requires range_m, radial_velocity_mps and association_cost_px",
                  line);
    }
    if (!o.at("cluster").is_object()) field_error("cluster", "must be an object", line);
    fd.cluster = cluster_from_json(o.at("cluster"), line);
    fd.range = get_double(o, "range_m", line);
    fd.radial_velocity = get_double(o, "radial_velocity_mps", line);
    fd.association_cost = get_double(o, "association_cost_px", line);
  } else if (o.contains("range_m") || o.contains("radial_velocity_mps") ||
             o.contains("association_cost_px")) {
    field_error("range_m", "requires a cluster", line);
  }
  return fd;
}

ojson track_to_json(const TrackSnapshot& t) {
  return ojson{{"id", t.id},
               {"status", to_string(t.status)},
               {"class", t.class_label},
               {"position_m", vec3_to_json(t.position)},
               {"velocity_mps", vec3_to_json(t.velocity)},
               {"hits", t.hits},
               {"misses", t.misses}};
}

TrackSnapshot track_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"id", "status", "class", "position_m", "velocity_mps", "hits", "misses"}, {},
             line);
  TrackSnapshot t;
  t.id = get_int(o, "id", line);
  try {
    t.status = track_status_from_string(get_string(o, "status", line));
  } catch (const Error& e) {
    field_error("status", e.what(), line);
  }
  t.class_label = get_string(o, "class", line);
  t.position = get_vec3(o, "position_m", line);
  t.velocity = get_vec3(o, "velocity_mps", line);
  t.hits = static_cast<int>(get_int(o, "hits", line));
  t.misses = static_cast<int>(get_int(o, "misses", line));
  return t;
}

ojson verdict_to_json(const ConsistencyVerdict& v) {
  ojson j{{"detection", v.detection_ref}, {"verdict", to_string(v.verdict)}};
  if (v.detail) {
    j["expected_height_px"] = v.detail->expected_height_px;
    j["observed_height_px"] = v.detail->observed_height_px;
  }
  return j;
}

ConsistencyVerdict verdict_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {"detection", "verdict"}, {"expected_height_px", "observed_height_px"}, line);
  ConsistencyVerdict v;
  v.detection_ref = static_cast<std::size_t>(get_int(o, "detection", line));
  try {
    v.verdict = verdict_from_string(get_string(o, "verdict", line));
  } catch (const Error& e) {
    field_error("verdict", e.what(), line);
  }
  const bool has_detail = o.contains("expected_height_px");
  if (has_detail != o.contains("observed_height_px")) {
    field_error("expected_height_px", "must appear together with observed_height_px", line);
  }
  if (v.verdict == Verdict::kSizeRangeMismatch) {
    if (!has_detail) field_error("verdict", "size_range_mismatch requires height detail", line);
    v.detail = SizeMismatchDetail{get_double(o, "expected_height_px", line),
                                  get_double(o, "observed_height_px", line)};
  } else if (has_detail) {
    field_error("expected_height_px", "only allowed for size_range_mismatch", line);
  }
  return v;
}

}  // namespace

std::string serialize_reports(const std::vector<FrameReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    ojson fused = ojson::array();
    for (const auto& fd : r.fused) fused.push_back(fused_to_json(fd));
    ojson tracks = ojson::array();
    for (const auto& t : r.tracks) tracks.push_back(track_to_json(t));
    ojson verdicts = ojson::array();
    for (const auto& v : r.verdicts) verdicts.push_back(verdict_to_json(v));
    ojson j{{"t_us", r.t_us},
            {"fused", std::move(fused)},
            {"tracks", std::move(tracks)},
            {"verdicts", std::move(verdicts)},
            {"unmatched_clusters", r.unmatched_clusters}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<FrameReport> parse_reports(const std::string& text) {
  std::vector<FrameReport> reports;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for_each_line(text, [&](const std::string& line, std::size_t lineno) {
    const ojson j = parse_object(line, lineno);
    check_keys(j, {"t_us", "fused", "tracks", "verdicts", "unmatched_clusters"}, {}, lineno);
    FrameReport r;
    r.t_us = get_int(j, "t_us", lineno);
    check_stream_order(r.t_us, prev, lineno);
    prev = r.t_us;
    for (const auto& fd : get_array(j, "fused", lineno)) {
      if (!fd.is_object()) field_error("fused", "must hold objects", lineno);
      r.fused.push_back(fused_from_json(fd, lineno));
    }
    for (const auto& t : get_array(j, "tracks", lineno)) {
      if (!t.is_object()) field_error("tracks", "must hold objects", lineno);
      r.tracks.push_back(track_from_json(t, lineno));
    }
    for (const auto& v : get_array(j, "verdicts", lineno)) {
      if (!v.is_object()) field_error("verdicts", "must hold objects", lineno);
      r.verdicts.push_back(verdict_from_json(v, lineno));
    }
    const std::int64_t unmatched = get_int(j, "unmatched_clusters", lineno);
    if (unmatched < 0) field_error("unmatched_clusters", "must be >= 0", lineno);
    r.unmatched_clusters = static_cast<std::size_t>(unmatched);
    reports.push_back(std::move(r));
  });
  return reports;
}

namespace {

ojson cluster_config_to_json(const ClusterConfig& c) {
  return ojson{{"eps_m", c.eps}, {"min_points", c.min_points}, {"max_range_m", c.max_range}};
}

ClusterConfig cluster_config_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {}, {"eps_m", "min_points", "max_range_m"}, line);
  ClusterConfig c;
  if (o.contains("eps_m")) c.eps = get_double(o, "eps_m", line);
  if (o.contains("min_points")) {
    const std::int64_t v = get_int(o, "min_points", line);
    if (v < 1) field_error("min_points", "must be >= 1", line);
    c.min_points = static_cast<std::size_t>(v);
  }
  if (o.contains("max_range_m")) c.max_range = get_double(o, "max_range_m", line);
  if (!(c.eps > 0.0)) field_error("eps_m", "must be > 0", line);
  if (!(c.max_range > 0.0)) field_error("max_range_m", "must be > 0", line);
  return c;
}

ojson association_config_to_json(const AssociationConfig& a) {
  return ojson{{"gate_px", a.gate_px}, {"allow_outside_box", a.allow_outside_box}};
}

AssociationConfig association_config_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {}, {"gate_px", "allow_outside_box"}, line);
  AssociationConfig a;
  if (o.contains("gate_px")) a.gate_px = get_double(o, "gate_px", line);
  if (o.contains("allow_outside_box")) a.allow_outside_box = get_bool(o, "allow_outside_box", line);
  if (!(a.gate_px > 0.0)) field_error("gate_px", "must be > 0", line);
  return a;
}

ojson tracker_config_to_json(const TrackerConfig& t) {
  return ojson{{"process_noise_accel", t.process_noise_accel},
               {"meas_noise_pos_m", t.meas_noise_pos},
               {"meas_noise_doppler_mps", t.meas_noise_doppler},
               {"gate_chi2", t.gate_chi2},
               {"confirm_hits", t.confirm_hits},
               {"lose_misses", t.lose_misses}};
}

TrackerConfig tracker_config_from_json(const ojson& o, std::size_t line) {
  check_keys(o, {},
             {"process_noise_accel", "meas_noise_pos_m", "meas_noise_doppler_mps", "gate_chi2",
              "confirm_hits", "lose_misses"},
             line);
  TrackerConfig t;
  if (o.contains("process_noise_accel")) t.process_noise_accel = get_double(o, "process_noise_accel", line);
  if (o.contains("meas_noise_pos_m")) t.meas_noise_pos = get_double(o, "meas_noise_pos_m", line);
  if (o.contains("meas_noise_doppler_mps"))
    t.meas_noise_doppler = get_double(o, "meas_noise_doppler_mps", line);
  if (o.contains("gate_chi2")) t.gate_chi2 = get_double(o, "gate_chi2", line);
  if (o.contains("confirm_hits")) t.confirm_hits = static_cast<int>(get_int(o, "confirm_hits", line));
  if (o.contains("lose_misses")) t.lose_misses = static_cast<int>(get_int(o, "lose_misses", line));
  if (!(t.process_noise_accel > 0.0)) field_error("process_noise_accel", "must be > 0", line);
  if (!(t.meas_noise_pos > 0.0)) field_error("meas_noise_pos_m", "must be > 0", line);
  if (!(t.meas_noise_doppler > 0.0)) field_error("meas_noise_doppler_mps", "must be > 0", line);
  if (!(t.gate_chi2 > 0.0)) field_error("gate_chi2", "must be > 0", line);
  if (t.confirm_hits < 1) field_error("confirm_hits", "must be >= 1", line);
  if (t.lose_misses < 1) field_error("lose_misses", "must be >= 1", line);
  return t;
}

}  // namespace

std::string serialize_pipeline_config(const PipelineConfig& cfg) {
  ojson models = ojson::array();
  for (const auto& m : cfg.size_models) {
    models.push_back(ojson{{"class", m.class_label},
                           {"nominal_height_m", m.nominal_height},
                           {"tolerance_factor", m.tolerance_factor}});
  }
  ojson j{{"sync_tolerance_us", cfg.sync_tolerance_us},
          {"cluster", cluster_config_to_json(cfg.cluster)},
          {"association", association_config_to_json(cfg.association)},
          {"tracker", tracker_config_to_json(cfg.tracker)},
          {"rig", rig_to_json(cfg.rig)},
          {"size_models", std::move(models)}};
  return j.dump(2) + "\n";
}

PipelineConfig parse_pipeline_config(const std::string& text) {
  const ojson j = parse_object(text, 1);
  check_keys(j, {},
             {"sync_tolerance_us", "cluster", "association", "tracker", "rig", "size_models"}, 1);
  PipelineConfig cfg;
  if (j.contains("sync_tolerance_us")) {
    cfg.sync_tolerance_us = get_int(j, "sync_tolerance_us", 1);
    if (cfg.sync_tolerance_us <= 0) field_error("sync_tolerance_us", "must be > 0", 1);
  }
  if (j.contains("cluster")) {
    if (!j.at("cluster").is_object()) field_error("cluster", "must be an object", 1);
    cfg.cluster = cluster_config_from_json(j.at("cluster"), 1);
  }
  if (j.contains("association")) {
    if (!j.at("association").is_object()) field_error("association", "must be an object", 1);
    cfg.association = association_config_from_json(j.at("association"), 1);
  }
  if (j.contains("tracker")) {
    if (!j.at("tracker").is_object()) field_error("tracker", "must be an object", 1);
    cfg.tracker = tracker_config_from_json(j.at("tracker"), 1);
  }
  if (j.contains("rig")) {
    if (!j.at("rig").is_object()) field_error("rig", "must be an object", 1);
    cfg.rig = rig_from_json(j.at("rig"), 1);
  }
  if (j.contains("size_models")) {
    for (const auto& o : get_array(j, "size_models", 1)) {
      if (!o.is_object()) field_error("size_models", "must hold objects", 1);
      check_keys(o, {"class", "nominal_height_m", "tolerance_factor"}, {}, 1);
      ClassSizeModel m;
      m.class_label = get_string(o, "class", 1);
      m.nominal_height = get_double(o, "nominal_height_m", 1);
      m.tolerance_factor = get_double(o, "tolerance_factor", 1);
      if (!(m.nominal_height > 0.0)) field_error("nominal_height_m", "must be > 0", 1);
      if (!(m.tolerance_factor > 1.0)) field_error("tolerance_factor", "must be > 1", 1);
      cfg.size_models.push_back(std::move(m));
    }
  }
  return cfg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error("failed to write file: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("failed to move " + tmp.string() + " into place: " + ec.message());
  }
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace radarcam::io
