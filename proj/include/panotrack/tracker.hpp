#pragma once

// Multi-person tracker in ground-plane coordinates. Each track runs an
// unscented Kalman filter whose measurements are image points; the
// panorama's horizontal wrap-around is handled when sigma points straddle
// the image seam and when innovations are formed. Association is a gated
// global nearest neighbour on the wrap-aware image distance of the necks.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "panotrack/assignment.hpp"
#include "panotrack/detect.hpp"
#include "panotrack/geometry.hpp"
#include "panotrack/ukf.hpp"

namespace panotrack {

inline constexpr double kMinPersonHeight = 0.5;
inline constexpr double kMaxPersonHeight = 2.5;

struct TrackState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double h_n = 1.5;

  StateVector to_vector() const;
  static TrackState from_vector(const StateVector& v);
};

enum class TrackStatus { tentative, confirmed, lost };

const char* to_string(TrackStatus s);

struct Track {
  std::uint64_t id = 0;
  TrackState state;
  StateCovariance covariance = StateCovariance::Identity();
  TrackStatus status = TrackStatus::tentative;
  int frames_since_update = 0;
  int hits = 0;
  bool is_target = false;
  std::optional<BoundingBox> last_torso;
};

struct FullBody {
  ImagePoint ankle_mid;
  ImagePoint neck;
};

struct NeckOnly {
  ImagePoint neck;
};

struct Measurement {
  std::variant<FullBody, NeckOnly> value;
  double scale = 1.0;  // processing scale of the source viewport; widens the noise
};

/// Builds a measurement from a detection. Needs a neck; both ankles make it a
/// full-body measurement whose ankle midpoint is taken across the seam.
std::optional<Measurement> measurement_from(const Detection& det, double image_width);

struct TrackerConfig {
  UkfParams ukf;
  double gate_px = 150.0;
  double innovation_gate_probability = 0.999;
  int confirm_hits = 3;
  int max_misses = 15;
  double initial_position_var = 0.1;
  double initial_velocity_var = 1.0;
  double initial_height_var = 0.04;
  // Unmatched detections whose torso box overlaps a matched one at least this
  // much are treated as unfused duplicates and do not start tracks.
  double duplicate_overlap = 0.5;
  // Necks this close, in full-resolution pixels, also count as duplicates.
  // Side-on torsos are too thin for the box test to catch them.
  double duplicate_radius_px = 8.0;
  // Test hook: false turns off all seam handling (sigma-point shift, signed
  // innovations, wrap-aware association cost).
  bool wrap_correction = true;

  void validate() const;
};

struct PredictedMeasurement {
  ImagePoint ankle_mid;
  ImagePoint neck;
};

/// Constant-velocity propagation through sigma points plus process noise
/// scaled by dt. Throws FilterDivergenceError if the covariance cannot be
/// kept SPD.
Track predict(const Track& track, double dt, const UkfParams& params);

PredictedMeasurement project_to_image(const TrackState& state, const CameraModel& cam);

struct WrapCorrected {
  std::vector<ImagePoint> points;
  ImagePoint mean;
};

/// When the columns spread over more than half the image, points in the left
/// half move one image width to the right. The mean uses the shifted points
/// and is reduced back into [0, width).
WrapCorrected wrap_correct(std::span<const ImagePoint> points, double image_width);

struct UpdateResult {
  Track track;
  bool accepted = false;
  double mahalanobis_sq = 0.0;
};

/// Measurement update. A rejected update leaves the estimate untouched and
/// counts as a missed frame.
UpdateResult update(const Track& track, const Measurement& meas, const CameraModel& cam,
                    const TrackerConfig& cfg);

/// Unscented estimate of the neck image point. With `wrap_aware` the sigma
/// points are unwrapped across the seam first; without it they are averaged
/// as raw columns. Empty if the sigma points hit the camera axis.
std::optional<ImagePoint> predicted_neck(const Track& track, const CameraModel& cam,
                                         const UkfParams& params, bool wrap_aware = true);

/// Gated GNN over the predicted neck image points. Detections without a neck
/// can never be matched. Rows are tracks, columns detections. With
/// `wrap_aware` false the cost is the plain Euclidean pixel distance.
Assignment associate(std::span<const Track> tracks, std::span<const Detection> dets,
                     const CameraModel& cam, double gate, bool wrap_aware = true,
                     const UkfParams& params = {});

struct TrackReport {
  Track track;
  WorldPoint position;  // (x, y, neck height)
  ImagePoint neck;      // projection of the posterior
};

class Tracker {
 public:
  Tracker(CameraModel cam, TrackerConfig cfg);

  /// One frame: predict, associate, update, spawn, lifecycle, target upkeep.
  /// Returns every track touched this frame, including those lost in it.
  std::vector<TrackReport> step(std::span<const Detection> dets, double dt);

  /// Image point between the target's predicted neck and ankles, `dt`
  /// seconds ahead of the last step. Empty without a target.
  std::optional<ImagePoint> predicted_target_center(double dt) const;

  const std::vector<Track>& tracks() const { return tracks_; }
  const CameraModel& camera() const { return cam_; }
  std::uint64_t next_id() const { return next_id_; }

 private:
  void spawn(const Detection& det, std::vector<std::size_t>& spawned);
  void maintain_target(std::span<const std::size_t> spawned, std::span<const Detection> dets,
                       std::span<const std::size_t> spawn_sources);

  CameraModel cam_;
  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  std::uint64_t next_id_ = 1;
  bool started_ = false;
  bool ever_had_target_ = false;
};

}  // namespace panotrack
