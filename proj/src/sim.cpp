#include "panotrack/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "panotrack/errors.hpp"

namespace panotrack {
namespace {

constexpr double kMinAgentRange = 0.3;
constexpr double kShoulderDrop = 0.05;   // shoulders below the neck, meters
constexpr double kHipFraction = 0.52;    // hip height as a fraction of body height
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Pose polyline_pose(const Polyline& path, double t) {
  const auto& pts = path.points;
  if (pts.size() == 1) return {pts[0][0], pts[0][1], 0.0};
  double remaining = t;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double dx = pts[i + 1][0] - pts[i][0];
    const double dy = pts[i + 1][1] - pts[i][1];
    const double len = std::hypot(dx, dy);
    const double speed = path.speeds.size() == 1 ? path.speeds[0] : path.speeds[i];
    const double heading = std::atan2(dy, dx);
    const double seg_time = len / speed;
    if (remaining <= seg_time || i + 2 == pts.size()) {
      const double f = seg_time > 0.0 ? std::min(remaining / seg_time, 1.0) : 1.0;
      return {pts[i][0] + f * dx, pts[i][1] + f * dy, heading};
    }
    remaining -= seg_time;
  }
  return {pts.back()[0], pts.back()[1], 0.0};
}

// Fraction of `a`'s azimuth interval hidden behind `b`.
double azimuth_overlap_fraction(double theta_a, double half_a, double theta_b, double half_b) {
  const double gap = std::abs(normalize_degrees(theta_a - theta_b));
  const double overlap = std::clamp(half_a + half_b - gap, 0.0, 2.0 * std::min(half_a, half_b));
  return half_a > 0.0 ? overlap / (2.0 * half_a) : 0.0;
}

double agent_range(const AgentState& a) { return std::hypot(a.x, a.y); }

}  // namespace

void Body::validate() const {
  if (!(height >= 1.4 && height <= 2.1)) throw ConfigError("body height must be in [1.4, 2.1] m");
  if (!(ankle_height >= 0.0 && neck_drop > 0.0 && neck_drop < height - ankle_height)) {
    throw ConfigError("body neck_drop/ankle_height inconsistent with height");
  }
  if (!(shoulder_half_width > 0.0 && hip_half_width > 0.0)) {
    throw ConfigError("body half-widths must be positive");
  }
}

void validate(const Trajectory& traj) {
  if (const auto* path = std::get_if<Polyline>(&traj)) {
    if (path->points.empty()) throw ConfigError("polyline needs at least one point");
    const std::size_t segments = path->points.size() - 1;
    if (path->speeds.size() != 1 && path->speeds.size() != segments) {
      throw ConfigError("polyline speeds must hold one value or one per segment");
    }
    for (double s : path->speeds) {
      if (!(s > 0.0)) throw ConfigError("polyline speeds must be positive");
    }
  } else {
    const auto& c = std::get<Circle>(traj);
    if (!(c.radius > 0.0)) throw ConfigError("circle radius must be positive");
    if (!(c.angular_speed != 0.0) || !std::isfinite(c.angular_speed)) {
      throw ConfigError("circle angular speed must be non-zero");
    }
  }
}

Pose pose_at(const Trajectory& traj, double t) {
  if (const auto* path = std::get_if<Polyline>(&traj)) return polyline_pose(*path, t);
  const auto& c = std::get<Circle>(traj);
  const double angle = c.phase + c.angular_speed * t;
  const double turn = c.angular_speed > 0.0 ? std::numbers::pi / 2.0 : -std::numbers::pi / 2.0;
  return {c.center[0] + c.radius * std::cos(angle), c.center[1] + c.radius * std::sin(angle), angle + turn};
}

void Scenario::validate() const {
  cam.validate();
  if (!(fps > 0.0)) throw ConfigError("fps must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (annotation_stride < 1) throw ConfigError("annotation_stride must be at least 1");
  if (!(noise.joint_sigma >= 0.0)) throw ConfigError("joint_sigma must be non-negative");
  if (!(noise.miss_prob >= 0.0 && noise.miss_prob <= 1.0)) throw ConfigError("miss_prob must be in [0, 1]");
  if (!(detect_cfg.min_person_pixels > 0.0)) throw ConfigError("min_person_pixels must be positive");
  for (const Agent& a : agents) {
    a.body.validate();
    panotrack::validate(a.trajectory);
  }
  if (camera_trajectory) panotrack::validate(*camera_trajectory);
}

std::int64_t Scenario::frame_count() const { return std::llround(duration * fps); }

double projected_body_pixels(const AgentState& agent, const CameraModel& cam) {
  const ImagePoint foot = world_to_image({agent.x, agent.y, 0.0}, cam);
  const ImagePoint head = world_to_image({agent.x, agent.y, agent.body.height}, cam);
  return foot.y - head.y;
}

Skeleton project_agent(const AgentState& agent, const CameraModel& cam) {
  if (!(agent_range(agent) > kMinAgentRange)) {
    throw SingularPointError("agent is too close to the camera axis");
  }
  const Body& b = agent.body;
  const double lx = -std::sin(agent.heading);
  const double ly = std::cos(agent.heading);
  const double width = cam.image_width;
  auto at = [&](double offset, double z) {
    return world_to_image({agent.x + offset * lx, agent.y + offset * ly, z}, cam);
  };
  auto mirror = [&](const ImagePoint& center, const ImagePoint& p) {
    return ImagePoint{wrap_column(center.x - signed_wrap_delta(center.x, p.x, width), width),
                      2.0 * center.y - p.y};
  };

  const double neck_z = b.height - b.neck_drop;
  const double shoulder_z = neck_z - kShoulderDrop;
  const double hip_z = kHipFraction * b.height;

  Skeleton sk;
  sk.set(Joint::neck, at(0.0, neck_z));
  const ImagePoint ankle_mid = at(0.0, b.ankle_height);
  const ImagePoint left_ankle = at(b.hip_half_width, b.ankle_height);
  sk.set(Joint::left_ankle, left_ankle);
  sk.set(Joint::right_ankle, mirror(ankle_mid, left_ankle));
  sk.set(Joint::left_shoulder, at(b.shoulder_half_width, shoulder_z));
  sk.set(Joint::right_shoulder, at(-b.shoulder_half_width, shoulder_z));
  sk.set(Joint::left_hip, at(b.hip_half_width, hip_z));
  sk.set(Joint::right_hip, at(-b.hip_half_width, hip_z));
  return sk;
}

std::mt19937_64 substream(std::uint64_t seed, std::int64_t frame, std::uint64_t viewport_index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(frame));
  h = splitmix64(h ^ viewport_index);
  return std::mt19937_64(h);
}

std::vector<Skeleton> synthetic_detect(const Viewport& viewport, const WorldSnapshot& world,
                                       const NoiseModel& noise, const DetectabilityConfig& detect_cfg,
                                       std::mt19937_64& rng) {
  const CameraModel& cam = world.cam;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Skeleton> out;
  for (const AgentState& agent : world.agents) {
    if (!(agent_range(agent) > kMinAgentRange)) continue;
    const Skeleton clean = project_agent(agent, cam);
    if (!viewport.contains_column(clean[Joint::neck]->pt.x, cam.image_width)) continue;
    const double pixels = projected_body_pixels(agent, cam) * viewport.scale;
    if (pixels < detect_cfg.min_person_pixels) continue;

    bool hidden = false;
    bool feet_hidden = false;
    if (noise.occlusion_enabled) {
      const double range = agent_range(agent);
      const double theta = std::atan2(agent.y, agent.x) * kRadToDeg;
      const double half = std::atan2(agent.body.shoulder_half_width, range) * kRadToDeg;
      for (const AgentState& other : world.agents) {
        const double other_range = agent_range(other);
        if (&other == &agent || !(other_range < range)) continue;
        const double other_theta = std::atan2(other.y, other.x) * kRadToDeg;
        const double other_half = std::atan2(other.body.shoulder_half_width, other_range) * kRadToDeg;
        const double frac = azimuth_overlap_fraction(theta, half, other_theta, other_half);
        if (frac > 0.5) hidden = true;
        if (frac > 0.0) feet_hidden = true;
      }
    }
    if (hidden) continue;

    const double confidence = std::clamp(pixels / (2.0 * detect_cfg.min_person_pixels), 0.05, 1.0);
    Skeleton sk;
    for (Joint j : kAllJoints) {
      ImagePoint local = viewport.to_local(clean[j]->pt, cam.image_width);
      if (noise.joint_sigma > 0.0) {
        local.x += noise.joint_sigma * gauss(rng);
        local.y += noise.joint_sigma * gauss(rng);
      }
      const bool dropped = noise.miss_prob > 0.0 && unit(rng) < noise.miss_prob;
      if (!dropped) sk.set(j, local, confidence);
    }
    if (feet_hidden) {
      sk.drop(Joint::left_ankle);
      sk.drop(Joint::right_ankle);
    }
    if (!sk.empty()) out.push_back(std::move(sk));
  }
  return out;
}

std::vector<Skeleton> SyntheticDetector::detect(const Frame& frame, const Viewport& viewport,
                                                std::size_t viewport_index) const {
  if (!frame.world) throw InputError("synthetic detector needs a world snapshot");
  std::mt19937_64 rng = substream(seed_, frame.index, viewport_index);
  return synthetic_detect(viewport, *frame.world, noise_, detect_cfg_, rng);
}

WorldSnapshot snapshot_at(const Scenario& s, std::int64_t frame) {
  WorldSnapshot w;
  w.frame = frame;
  w.t = static_cast<double>(frame) / s.fps;
  w.cam = s.cam;
  Pose camera{};
  if (s.camera_trajectory) camera = pose_at(*s.camera_trajectory, w.t);
  for (const Agent& a : s.agents) {
    const Pose p = pose_at(a.trajectory, w.t);
    w.agents.push_back({a.id, p.x - camera.x, p.y - camera.y, p.heading, a.body});
  }
  return w;
}

Frame make_frame(const Scenario& s, std::int64_t frame) {
  auto world = std::make_shared<const WorldSnapshot>(snapshot_at(s, frame));
  return {frame, world->t, std::move(world)};
}

GroundTruthFrame ground_truth(const WorldSnapshot& world) {
  GroundTruthFrame gt{world.frame, world.t, {}};
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    const AgentState& a = world.agents[i];
    GroundTruthAgent rec{a.id, a.x, a.y, {}, i == 0};
    try {
      rec.joints = project_agent(a, world.cam);
    } catch (const SingularPointError&) {
    }
    gt.agents.push_back(std::move(rec));
  }
  return gt;
}

ScenarioRun run_scenario(const Scenario& s) {
  s.validate();
  ScenarioRun run;
  const std::int64_t n = s.frame_count();
  run.frames.reserve(static_cast<std::size_t>(n));
  for (std::int64_t f = 0; f < n; ++f) {
    run.frames.push_back(make_frame(s, f));
    if (s.annotated(f)) run.ground_truth.push_back(ground_truth(*run.frames.back().world));
  }
  return run;
}

}  // namespace panotrack
