#pragma once

// Synthetic scenes: scripted people seen by the equirectangular camera,
// rendered into noisy skeleton detections. Frames are world snapshots, not
// images; the synthetic detector interprets them through the exact camera
// model and a minimum-pixel-height detectability rule.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "panotrack/detect.hpp"
#include "panotrack/geometry.hpp"
#include "panotrack/records.hpp"

namespace panotrack {

struct Body {
  double height = 1.7;
  double ankle_height = 0.10;
  double shoulder_half_width = 0.20;
  double hip_half_width = 0.15;
  double neck_drop = 0.25;  // below the top of the head

  void validate() const;
};

/// Piecewise-linear path. `speeds` holds one value for the whole path or one
/// per segment. A single point describes a person standing still.
struct Polyline {
  std::vector<std::array<double, 2>> points;
  std::vector<double> speeds{1.0};
};

struct Circle {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;
  double angular_speed = 0.5;  // rad/s, sign gives the direction
  double phase = 0.0;          // rad at t = 0
};

using Trajectory = std::variant<Polyline, Circle>;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // rad
};

Pose pose_at(const Trajectory& traj, double t);
void validate(const Trajectory& traj);

struct Agent {
  int id = 0;
  Trajectory trajectory;
  Body body;
};

struct NoiseModel {
  double joint_sigma = 0.0;  // pixels at the processed resolution
  double miss_prob = 0.0;
  bool occlusion_enabled = false;
};

// 48 px at 640x320 puts the cutoff for a 1.7 m person between 3 and 4 m.
inline constexpr double kDefaultMinPersonPixels = 48.0;

struct DetectabilityConfig {
  double min_person_pixels = kDefaultMinPersonPixels;
};

struct Scenario {
  CameraModel cam;
  double fps = 30.0;
  double duration = 10.0;
  std::vector<Agent> agents;
  NoiseModel noise;
  DetectabilityConfig detect_cfg;
  std::uint64_t seed = 0;
  // Ground-truth records are written every `annotation_stride` frames.
  int annotation_stride = 1;
  // Optional scripted camera path; agents are expressed relative to it.
  std::optional<Trajectory> camera_trajectory;

  void validate() const;
  std::int64_t frame_count() const;
  bool annotated(std::int64_t frame) const { return frame % annotation_stride == 0; }
};

struct AgentState {
  int id = 0;
  double x = 0.0;  // camera frame
  double y = 0.0;
  double heading = 0.0;
  Body body;
};

struct WorldSnapshot {
  std::int64_t frame = 0;
  double t = 0.0;
  CameraModel cam;
  std::vector<AgentState> agents;
};

/// Noise-free skeleton in full-image coordinates. The ankles sit symmetric in
/// the image about the projection of the ground point, so their midpoint
/// localizes back onto it. Throws SingularPointError within 0.3 m of the
/// camera axis.
Skeleton project_agent(const AgentState& agent, const CameraModel& cam);

/// Projected height from the ground to the top of the head, full resolution.
double projected_body_pixels(const AgentState& agent, const CameraModel& cam);

/// Deterministic substream for one (seed, frame, viewport) triple.
std::mt19937_64 substream(std::uint64_t seed, std::int64_t frame, std::uint64_t viewport_index);

/// Skeletons of the agents visible in `viewport`, in viewport-local
/// coordinates.
std::vector<Skeleton> synthetic_detect(const Viewport& viewport, const WorldSnapshot& world,
                                       const NoiseModel& noise, const DetectabilityConfig& detect_cfg,
                                       std::mt19937_64& rng);

class SyntheticDetector final : public DetectorPort {
 public:
  SyntheticDetector(NoiseModel noise, DetectabilityConfig detect_cfg, std::uint64_t seed)
      : noise_(noise), detect_cfg_(detect_cfg), seed_(seed) {}
  explicit SyntheticDetector(const Scenario& s) : SyntheticDetector(s.noise, s.detect_cfg, s.seed) {}

  std::vector<Skeleton> detect(const Frame& frame, const Viewport& viewport,
                               std::size_t viewport_index) const override;

 private:
  NoiseModel noise_;
  DetectabilityConfig detect_cfg_;
  std::uint64_t seed_;
};

WorldSnapshot snapshot_at(const Scenario& s, std::int64_t frame);
Frame make_frame(const Scenario& s, std::int64_t frame);

/// Agent 0 is the annotated target.
GroundTruthFrame ground_truth(const WorldSnapshot& world);

struct ScenarioRun {
  std::vector<Frame> frames;
  std::vector<GroundTruthFrame> ground_truth;  // annotated frames only
};

ScenarioRun run_scenario(const Scenario& s);

}  // namespace panotrack
