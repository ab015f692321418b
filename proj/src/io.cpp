#include "panotrack/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "panotrack/errors.hpp"

namespace panotrack {
namespace {

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected a JSON object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view k : allowed) known = known || key == k;
    if (!known) throw InputError(where + ": unknown field '" + key + "'");
  }
}

template <class T>
const char* type_label() {
  if constexpr (std::is_same_v<T, bool>) {
    return "a boolean";
  } else if constexpr (std::is_integral_v<T>) {
    return "an integer";
  } else if constexpr (std::is_floating_point_v<T>) {
    return "a number";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return "a string";
  } else {
    return "a value of the documented shape";
  }
}

template <class T>
T as(const json& v, const std::string& where) {
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw InputError(where + ": expected " + type_label<T>());
  } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!v.is_number_integer()) throw InputError(where + ": expected " + type_label<T>());
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        throw InputError(where + ": expected a non-negative integer");
      }
    }
  }
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InputError(where + ": expected " + type_label<T>());
  }
}

template <class T>
void read(const json& j, std::string_view key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  out = as<T>(*it, where + "." + std::string(key));
}

const json& require(const json& j, std::string_view key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field '" + std::string(key) + "'");
  return *it;
}

std::array<double, 2> read_pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw InputError(where + ": expected [x, y]");
  return {as<double>(v[0], where + "[0]"), as<double>(v[1], where + "[1]")};
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json skeleton_to_json(const Skeleton& sk) {
  json joints = json::object();
  for (Joint j : kAllJoints) {
    if (const auto& kp = sk[j]) joints[std::string(joint_name(j))] = {kp->pt.x, kp->pt.y, kp->confidence};
  }
  return joints;
}

Skeleton skeleton_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  Skeleton sk;
  for (const auto& [name, value] : j.items()) {
    const auto joint = joint_from_name(name);
    const std::string at = where + "." + name;
    if (!joint) throw InputError(at + ": unknown joint name");
    if (!value.is_array() || (value.size() != 2 && value.size() != 3)) {
      throw InputError(at + ": expected [x, y, confidence]");
    }
    const double x = as<double>(value[0], at + "[0]");
    const double y = as<double>(value[1], at + "[1]");
    const double c = value.size() == 3 ? as<double>(value[2], at + "[2]") : 1.0;
    if (!std::isfinite(x) || !std::isfinite(y)) throw InputError(at + ": coordinates must be finite");
    if (!(c >= 0.0 && c <= 1.0)) throw InputError(at + ": confidence must be in [0, 1]");
    sk.set(*joint, {x, y}, c);
  }
  return sk;
}

json trajectory_to_json(const Trajectory& traj) {
  if (const auto* path = std::get_if<Polyline>(&traj)) {
    json pts = json::array();
    for (const auto& p : path->points) pts.push_back({p[0], p[1]});
    return {{"type", "polyline"}, {"points", pts}, {"speeds", path->speeds}};
  }
  const auto& c = std::get<Circle>(traj);
  return {{"type", "circle"},
          {"center", {c.center[0], c.center[1]}},
          {"radius", c.radius},
          {"angular_speed", c.angular_speed},
          {"phase", c.phase}};
}

Trajectory trajectory_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  const std::string type = as<std::string>(require(j, "type", where), where + ".type");
  if (type == "polyline") {
    check_keys(j, {"type", "points", "speeds"}, where);
    Polyline path;
    const json& pts = require(j, "points", where);
    if (!pts.is_array()) throw InputError(where + ".points: expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      path.points.push_back(read_pair(pts[i], where + ".points[" + std::to_string(i) + "]"));
    }
    if (j.contains("speeds")) {
      const json& sp = j["speeds"];
      if (sp.is_number()) {
        path.speeds = {as<double>(sp, where + ".speeds")};
      } else {
        path.speeds = as<std::vector<double>>(sp, where + ".speeds");
      }
    }
    return path;
  }
  if (type == "circle") {
    check_keys(j, {"type", "center", "radius", "angular_speed", "phase"}, where);
    Circle c;
    if (j.contains("center")) c.center = read_pair(j["center"], where + ".center");
    read(j, "radius", c.radius, where);
    read(j, "angular_speed", c.angular_speed, where);
    read(j, "phase", c.phase, where);
    return c;
  }
  throw InputError(where + ".type: expected \"polyline\" or \"circle\"");
}

json body_to_json(const Body& b) {
  return {{"height", b.height},
          {"ankle_height", b.ankle_height},
          {"shoulder_half_width", b.shoulder_half_width},
          {"hip_half_width", b.hip_half_width},
          {"neck_drop", b.neck_drop}};
}

Body body_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  check_keys(j, {"height", "ankle_height", "shoulder_half_width", "hip_half_width", "neck_drop"}, where);
  Body b;
  read(j, "height", b.height, where);
  read(j, "ankle_height", b.ankle_height, where);
  read(j, "shoulder_half_width", b.shoulder_half_width, where);
  read(j, "hip_half_width", b.hip_half_width, where);
  read(j, "neck_drop", b.neck_drop, where);
  return b;
}

template <class T>
T validated(T value, const std::string& where) {
  try {
    value.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return value;
}

}  // namespace

json parse_json(std::string_view text, const std::string& source_name) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << source_name << ":" << line << ":" << col << ": JSON syntax error";
    const std::string what = e.what();
    if (const auto pos = what.find("error while parsing"); pos != std::string::npos) {
      msg << " (" << what.substr(pos) << ")";
    }
    throw InputError(msg.str());
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

json camera_to_json(const CameraModel& cam) {
  return {{"image_width", cam.image_width},   {"image_height", cam.image_height},
          {"fov_h", cam.fov_h},               {"fov_v", cam.fov_v},
          {"mount_height", cam.mount_height}, {"ankle_height", cam.ankle_height}};
}

CameraModel camera_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  check_keys(j, {"image_width", "image_height", "fov_h", "fov_v", "mount_height", "ankle_height"}, where);
  CameraModel cam;
  read(j, "image_width", cam.image_width, where);
  read(j, "image_height", cam.image_height, where);
  read(j, "fov_h", cam.fov_h, where);
  read(j, "fov_v", cam.fov_v, where);
  read(j, "mount_height", cam.mount_height, where);
  read(j, "ankle_height", cam.ankle_height, where);
  return validated(cam, where);
}

json scenario_to_json(const Scenario& s) {
  json agents = json::array();
  for (const Agent& a : s.agents) {
    agents.push_back({{"id", a.id}, {"trajectory", trajectory_to_json(a.trajectory)}, {"body", body_to_json(a.body)}});
  }
  json j = {{"cam", camera_to_json(s.cam)},
            {"fps", s.fps},
            {"duration", s.duration},
            {"agents", agents},
            {"noise",
             {{"joint_sigma", s.noise.joint_sigma},
              {"miss_prob", s.noise.miss_prob},
              {"occlusion_enabled", s.noise.occlusion_enabled}}},
            {"detect_cfg", {{"min_person_pixels", s.detect_cfg.min_person_pixels}}},
            {"seed", s.seed},
            {"annotation_stride", s.annotation_stride}};
  if (s.camera_trajectory) j["camera_trajectory"] = trajectory_to_json(*s.camera_trajectory);
  return j;
}

Scenario scenario_from_json(const json& j) {
  const std::string where = "scenario";
  expect_object(j, where);
  check_keys(j, {"cam", "fps", "duration", "agents", "noise", "detect_cfg", "seed", "annotation_stride",
                 "camera_trajectory"},
             where);
  Scenario s;
  if (j.contains("cam")) s.cam = camera_from_json(j["cam"], where + ".cam");
  read(j, "fps", s.fps, where);
  read(j, "duration", s.duration, where);
  read(j, "seed", s.seed, where);
  read(j, "annotation_stride", s.annotation_stride, where);

  const json& agents = require(j, "agents", where);
  if (!agents.is_array()) throw InputError(where + ".agents: expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string at = where + ".agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    expect_object(a, at);
    check_keys(a, {"id", "trajectory", "body"}, at);
    Agent agent;
    agent.id = static_cast<int>(i);
    read(a, "id", agent.id, at);
    agent.trajectory = trajectory_from_json(require(a, "trajectory", at), at + ".trajectory");
    if (a.contains("body")) agent.body = body_from_json(a["body"], at + ".body");
    s.agents.push_back(std::move(agent));
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    expect_object(n, where + ".noise");
    check_keys(n, {"joint_sigma", "miss_prob", "occlusion_enabled"}, where + ".noise");
    read(n, "joint_sigma", s.noise.joint_sigma, where + ".noise");
    read(n, "miss_prob", s.noise.miss_prob, where + ".noise");
    read(n, "occlusion_enabled", s.noise.occlusion_enabled, where + ".noise");
  }
  if (j.contains("detect_cfg")) {
    const json& d = j["detect_cfg"];
    expect_object(d, where + ".detect_cfg");
    check_keys(d, {"min_person_pixels"}, where + ".detect_cfg");
    read(d, "min_person_pixels", s.detect_cfg.min_person_pixels, where + ".detect_cfg");
  }
  if (j.contains("camera_trajectory")) {
    s.camera_trajectory = trajectory_from_json(j["camera_trajectory"], where + ".camera_trajectory");
  }
  return validated(s, where);
}

Scenario load_scenario(const std::filesystem::path& path) {
  try {
    return scenario_from_json(load_json_file(path));
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw InputError(path.string() + ": " + what);
  }
}

json detections_frame_to_json(const DetectionsFrame& f) {
  json dets = json::array();
  for (const Detection& d : f.detections) {
    dets.push_back({{"joints", skeleton_to_json(d.skeleton)}, {"source", d.source}, {"scale", d.scale}});
  }
  return {{"frame", f.frame}, {"t", f.t}, {"detections", dets}};
}

DetectionsFrame detections_frame_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  DetectionsFrame f;
  f.frame = as<std::int64_t>(require(j, "frame", where), where + ".frame");
  read(j, "t", f.t, where);
  const json& dets = require(j, "detections", where);
  if (!dets.is_array()) throw InputError(where + ".detections: expected an array");
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string at = where + ".detections[" + std::to_string(i) + "]";
    expect_object(dets[i], at);
    Detection d;
    d.skeleton = skeleton_from_json(require(dets[i], "joints", at), at + ".joints");
    read(dets[i], "source", d.source, at);
    read(dets[i], "scale", d.scale, at);
    if (!(d.scale > 0.0 && d.scale <= 1.0)) throw InputError(at + ".scale: must be in (0, 1]");
    f.detections.push_back(std::move(d));
  }
  return f;
}

json ground_truth_to_json(const GroundTruthFrame& g) {
  json agents = json::array();
  for (const GroundTruthAgent& a : g.agents) {
    agents.push_back({{"id", a.id}, {"x", a.x}, {"y", a.y}, {"joints", skeleton_to_json(a.joints)},
                      {"is_target", a.is_target}});
  }
  return {{"frame", g.frame}, {"t", g.t}, {"agents", agents}};
}

GroundTruthFrame ground_truth_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  GroundTruthFrame g;
  g.frame = as<std::int64_t>(require(j, "frame", where), where + ".frame");
  read(j, "t", g.t, where);
  const json& agents = require(j, "agents", where);
  if (!agents.is_array()) throw InputError(where + ".agents: expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string at = where + ".agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    expect_object(a, at);
    GroundTruthAgent rec;
    read(a, "id", rec.id, at);
    rec.x = as<double>(require(a, "x", at), at + ".x");
    rec.y = as<double>(require(a, "y", at), at + ".y");
    if (a.contains("joints")) rec.joints = skeleton_from_json(a["joints"], at + ".joints");
    read(a, "is_target", rec.is_target, at);
    g.agents.push_back(std::move(rec));
  }
  return g;
}

json tracks_frame_to_json(const TracksFrame& f) {
  json tracks = json::array();
  for (const TrackRecord& r : f.tracks) {
    tracks.push_back({{"id", r.id},         {"x", r.x},         {"y", r.y},
                      {"h", r.h},           {"img_x", r.img_x}, {"img_y", r.img_y},
                      {"status", to_string(r.status)}, {"is_target", r.is_target}});
  }
  return {{"frame", f.frame}, {"t", f.t}, {"tracks", tracks}};
}

TracksFrame tracks_frame_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  TracksFrame f;
  f.frame = as<std::int64_t>(require(j, "frame", where), where + ".frame");
  read(j, "t", f.t, where);
  const json& tracks = require(j, "tracks", where);
  if (!tracks.is_array()) throw InputError(where + ".tracks: expected an array");
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const std::string at = where + ".tracks[" + std::to_string(i) + "]";
    const json& t = tracks[i];
    expect_object(t, at);
    TrackRecord r;
    r.id = as<std::uint64_t>(require(t, "id", at), at + ".id");
    r.x = as<double>(require(t, "x", at), at + ".x");
    r.y = as<double>(require(t, "y", at), at + ".y");
    read(t, "h", r.h, at);
    read(t, "img_x", r.img_x, at);
    read(t, "img_y", r.img_y, at);
    read(t, "is_target", r.is_target, at);
    if (t.contains("status")) {
      const std::string status = as<std::string>(t["status"], at + ".status");
      if (status == "tentative") {
        r.status = TrackStatus::tentative;
      } else if (status == "confirmed") {
        r.status = TrackStatus::confirmed;
      } else if (status == "lost") {
        r.status = TrackStatus::lost;
      } else {
        throw InputError(at + ".status: expected tentative, confirmed or lost");
      }
    }
    f.tracks.push_back(r);
  }
  return f;
}

json eval_report_to_json(const EvalReport& r) {
  json frames = json::array();
  for (const FrameMatch& m : r.matches) {
    json rec = {{"frame", m.frame}, {"matched", m.matched}, {"gt", {m.gt_pos.x, m.gt_pos.y}}};
    rec["track_id"] = m.track_id ? json(*m.track_id) : json(nullptr);
    rec["est"] = m.est_pos ? json{m.est_pos->x, m.est_pos->y} : json(nullptr);
    frames.push_back(std::move(rec));
  }
  json curve = json::array();
  for (const DistanceBin& b : r.error_vs_distance) {
    curve.push_back({{"bin_center_m", b.center},
                     {"mean_error_m", std::isnan(b.mean_error) ? json(nullptr) : json(b.mean_error)},
                     {"count", b.count},
                     {"total", b.total},
                     {"miss_rate", b.miss_rate}});
  }
  std::size_t matched = 0;
  for (const FrameMatch& m : r.matches) matched += m.matched ? 1 : 0;
  return {{"m1", r.m1},
          {"m2", r.m2},
          {"m3", r.m3 ? json(*r.m3) : json(nullptr)},
          {"fragments", r.fragments},
          {"frames", r.matches.size()},
          {"matched", matched},
          {"error_vs_distance", curve},
          {"per_frame", frames}};
}

void write_error_curve_csv(std::ostream& os, const std::vector<DistanceBin>& bins) {
  os << "bin_center_m,mean_error_m,count,miss_rate\n";
  for (const DistanceBin& b : bins) {
    os << fmt(b.center) << ',' << fmt(b.mean_error) << ',' << b.count << ',' << fmt(b.miss_rate) << '\n';
  }
}

void write_sensitivity_csv(std::ostream& os, const CameraModel& cam,
                           const std::vector<double>& distances,
                           const std::vector<double>& pixel_errors) {
  os << "pixel_error_px";
  for (double d : distances) os << ",d_" << fmt(d) << "m";
  os << '\n';
  for (double px : pixel_errors) {
    os << fmt(px);
    for (double d : distances) os << ',' << fmt(localization_sensitivity(d, px, cam));
    os << '\n';
  }
}

void write_jsonl_line(std::ostream& os, const json& j) { os << j.dump() << '\n'; }

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, const std::string& where)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(number);
    fn(parse_json(line, where), where);
  }
}

std::vector<GroundTruthFrame> load_ground_truth(const std::filesystem::path& path) {
  std::vector<GroundTruthFrame> out;
  for_each_jsonl(path, [&](const json& j, const std::string& where) { out.push_back(ground_truth_from_json(j, where)); });
  return out;
}

std::vector<TracksFrame> load_tracks(const std::filesystem::path& path) {
  std::vector<TracksFrame> out;
  for_each_jsonl(path, [&](const json& j, const std::string& where) { out.push_back(tracks_frame_from_json(j, where)); });
  return out;
}

std::vector<DetectionsFrame> load_detections(const std::filesystem::path& path) {
  std::vector<DetectionsFrame> out;
  for_each_jsonl(path, [&](const json& j, const std::string& where) {
    out.push_back(detections_frame_from_json(j, where));
  });
  return out;
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "config";
  expect_object(j, where);
  check_keys(j, {"camera", "strategy", "tiles", "roi", "sigma1", "tracker", "scenario", "detections", "out",
                 "seed", "fps"},
             where);
  RunConfig cfg;
  PipelineConfig& p = cfg.pipeline;
  if (j.contains("camera")) p.cam = camera_from_json(j["camera"], where + ".camera");
  p.tiles = default_tiles_config(p.cam);
  if (j.contains("strategy")) {
    const std::string name = as<std::string>(j["strategy"], where + ".strategy");
    const auto s = strategy_from_string(name);
    if (!s) throw InputError(where + ".strategy: expected tiles, roi or fullframe");
    p.strategy = *s;
  }
  if (j.contains("tiles")) {
    const json& t = j["tiles"];
    const std::string at = where + ".tiles";
    expect_object(t, at);
    check_keys(t, {"n_tiles", "overlap", "row_min", "row_max", "scale", "concurrent"}, at);
    read(t, "n_tiles", p.tiles.n_tiles, at);
    read(t, "overlap", p.tiles.overlap, at);
    read(t, "row_min", p.tiles.row_min, at);
    read(t, "row_max", p.tiles.row_max, at);
    read(t, "scale", p.tiles.scale, at);
    read(t, "concurrent", p.tiles.concurrent, at);
  }
  if (j.contains("roi")) {
    const json& r = j["roi"];
    const std::string at = where + ".roi";
    expect_object(r, at);
    check_keys(r, {"roi_width", "roi_height", "full_width", "full_height"}, at);
    read(r, "roi_width", p.roi.roi_width, at);
    read(r, "roi_height", p.roi.roi_height, at);
    read(r, "full_width", p.roi.full_width, at);
    read(r, "full_height", p.roi.full_height, at);
  }
  read(j, "sigma1", p.sigma1, where);
  if (j.contains("tracker")) {
    const json& t = j["tracker"];
    const std::string at = where + ".tracker";
    expect_object(t, at);
    check_keys(t, {"alpha", "beta", "kappa", "process_noise", "measurement_noise", "gate_px",
                   "innovation_gate_probability", "confirm_hits", "max_misses", "initial_position_var",
                   "initial_velocity_var", "initial_height_var", "duplicate_overlap", "duplicate_radius_px", "wrap_correction"},
               at);
    TrackerConfig& tc = p.tracker;
    read(t, "alpha", tc.ukf.alpha, at);
    read(t, "beta", tc.ukf.beta, at);
    read(t, "kappa", tc.ukf.kappa, at);
    if (t.contains("process_noise")) {
      const auto q = as<std::vector<double>>(t["process_noise"], at + ".process_noise");
      if (q.size() != tc.ukf.process_noise.size()) throw InputError(at + ".process_noise: expected 5 values");
      std::copy(q.begin(), q.end(), tc.ukf.process_noise.begin());
    }
    read(t, "measurement_noise", tc.ukf.measurement_noise, at);
    read(t, "gate_px", tc.gate_px, at);
    read(t, "innovation_gate_probability", tc.innovation_gate_probability, at);
    read(t, "confirm_hits", tc.confirm_hits, at);
    read(t, "max_misses", tc.max_misses, at);
    read(t, "initial_position_var", tc.initial_position_var, at);
    read(t, "initial_velocity_var", tc.initial_velocity_var, at);
    read(t, "initial_height_var", tc.initial_height_var, at);
    read(t, "duplicate_overlap", tc.duplicate_overlap, at);
    read(t, "duplicate_radius_px", tc.duplicate_radius_px, at);
    read(t, "wrap_correction", tc.wrap_correction, at);
  }
  auto path_field = [&](std::string_view key) -> std::optional<std::filesystem::path> {
    if (!j.contains(key)) return std::nullopt;
    std::filesystem::path path = as<std::string>(j[std::string(key)], where + "." + std::string(key));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return path;
  };
  cfg.scenario_path = path_field("scenario");
  cfg.detections_path = path_field("detections");
  cfg.out_dir = path_field("out");
  if (j.contains("seed")) cfg.seed = as<std::uint64_t>(j["seed"], where + ".seed");
  read(j, "fps", cfg.fps, where);
  if (!(cfg.fps > 0.0)) throw InputError(where + ".fps: must be positive");
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  const PipelineConfig& p = cfg.pipeline;
  const TrackerConfig& t = p.tracker;
  json j = {{"camera", camera_to_json(p.cam)},
            {"strategy", to_string(p.strategy)},
            {"tiles",
             {{"n_tiles", p.tiles.n_tiles},
              {"overlap", p.tiles.overlap},
              {"row_min", p.tiles.row_min},
              {"row_max", p.tiles.row_max},
              {"scale", p.tiles.scale},
              {"concurrent", p.tiles.concurrent}}},
            {"roi",
             {{"roi_width", p.roi.roi_width},
              {"roi_height", p.roi.roi_height},
              {"full_width", p.roi.full_width},
              {"full_height", p.roi.full_height}}},
            {"sigma1", p.sigma1},
            {"tracker",
             {{"alpha", t.ukf.alpha},
              {"beta", t.ukf.beta},
              {"kappa", t.ukf.kappa},
              {"process_noise", t.ukf.process_noise},
              {"measurement_noise", t.ukf.measurement_noise},
              {"gate_px", t.gate_px},
              {"innovation_gate_probability", t.innovation_gate_probability},
              {"confirm_hits", t.confirm_hits},
              {"max_misses", t.max_misses},
              {"initial_position_var", t.initial_position_var},
              {"initial_velocity_var", t.initial_velocity_var},
              {"initial_height_var", t.initial_height_var},
              {"duplicate_overlap", t.duplicate_overlap},
              {"duplicate_radius_px", t.duplicate_radius_px},
              {"wrap_correction", t.wrap_correction}}},
            {"fps", cfg.fps}};
  if (cfg.scenario_path) j["scenario"] = cfg.scenario_path->string();
  if (cfg.detections_path) j["detections"] = cfg.detections_path->string();
  if (cfg.out_dir) j["out"] = cfg.out_dir->string();
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

}  // namespace panotrack
