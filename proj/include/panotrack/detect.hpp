#pragma once

// Viewport planning over the panorama (overlapping tiles, region of
// interest), the detector port, and fusion of duplicate detections that
// appear in the overlap of two viewports.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "panotrack/geometry.hpp"

namespace panotrack {

enum class Joint : std::uint8_t {
  neck,
  left_ankle,
  right_ankle,
  left_shoulder,
  right_shoulder,
  left_hip,
  right_hip,
};

inline constexpr std::size_t kJointCount = 7;
inline constexpr std::array<Joint, kJointCount> kAllJoints = {
    Joint::neck,          Joint::left_ankle, Joint::right_ankle, Joint::left_shoulder,
    Joint::right_shoulder, Joint::left_hip,  Joint::right_hip};

std::string_view joint_name(Joint j);
std::optional<Joint> joint_from_name(std::string_view name);

struct Keypoint {
  ImagePoint pt;
  double confidence = 1.0;
  bool operator==(const Keypoint&) const = default;
};

class Skeleton {
 public:
  const std::optional<Keypoint>& operator[](Joint j) const { return joints_[index(j)]; }
  std::optional<Keypoint>& operator[](Joint j) { return joints_[index(j)]; }

  void set(Joint j, ImagePoint pt, double confidence = 1.0) { joints_[index(j)] = Keypoint{pt, confidence}; }
  void drop(Joint j) { joints_[index(j)].reset(); }
  bool has(Joint j) const { return joints_[index(j)].has_value(); }

  std::size_t present_count() const;
  double mean_confidence() const;
  bool empty() const { return present_count() == 0; }

  /// Neck column when present, otherwise the mean column of present joints.
  double anchor_x() const;

  bool operator==(const Skeleton&) const = default;

 private:
  static std::size_t index(Joint j) { return static_cast<std::size_t>(j); }
  std::array<std::optional<Keypoint>, kJointCount> joints_{};
};

/// Axis-aligned box in the full-image frame. `x` is cyclic; a box may run
/// past the right edge and continue at column 0.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;
  double area() const { return w * h; }
};

struct Viewport {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double width = 0.0;
  double height = 0.0;
  double scale = 1.0;  // processing resolution relative to full resolution

  bool contains_column(double x, double image_width) const;
  ImagePoint to_local(const ImagePoint& full, double image_width) const;
  ImagePoint to_full(const ImagePoint& local, double image_width) const;
};

struct TileLayout {
  std::vector<Viewport> viewports;
  double overlap = 0.0;
  int n_tiles = 0;
};

struct Detection {
  Skeleton skeleton;
  std::size_t source = 0;  // index of the viewport that produced it
  double scale = 1.0;      // processing scale of that viewport
};

struct WorldSnapshot;

/// Opaque frame handle; only detector ports interpret its contents.
struct Frame {
  std::int64_t index = 0;
  double t = 0.0;
  std::shared_ptr<const WorldSnapshot> world;
};

/// Stand-in for a skeleton detector. Implementations must be safe to call
/// concurrently on the same frame and deterministic for a fixed
/// (frame, viewport, viewport index).
class DetectorPort {
 public:
  virtual ~DetectorPort() = default;
  /// Returns skeletons in viewport-local (processed) coordinates.
  virtual std::vector<Skeleton> detect(const Frame& frame, const Viewport& viewport,
                                       std::size_t viewport_index) const = 0;
};

struct ViewportFailure {
  std::size_t viewport = 0;
  std::string message;
};

struct DetectionResult {
  std::vector<Detection> detections;
  bool partial = false;
  std::vector<ViewportFailure> failures;
};

// Tile layout defaults: rows [160, 800) keep elevations within +-60 deg at
// 1920x960; 150 px is the width of a person one meter away.
inline constexpr double kDefaultOverlapPx = 150.0;
inline constexpr double kDefaultMergeThreshold = 0.9;

struct TilesConfig {
  int n_tiles = 3;
  double overlap = kDefaultOverlapPx;
  double row_min = 160.0;
  double row_max = 800.0;
  double scale = 1.0;
  bool concurrent = true;
};

struct RoiConfig {
  double roi_width = 576.0;
  double roi_height = 192.0;
  double full_width = 640.0;
  double full_height = 320.0;
};

/// Defaults rescaled to a camera whose width differs from 1920 px.
TilesConfig default_tiles_config(const CameraModel& cam);

TileLayout build_tiles(const CameraModel& cam, int n_tiles, double overlap,
                       std::pair<double, double> row_range, double scale = 1.0);

/// Tight box over neck, shoulders and hips. Wrap-aware; sides are at least
/// one pixel. Throws DegenerateSkeletonError without a neck plus at least one
/// shoulder or hip.
BoundingBox torso_bbox(const Skeleton& sk, double image_width);

/// Intersection over the smaller area, with wrap-aware intersection in x.
double merge_score(const BoundingBox& b1, const BoundingBox& b2, double image_width);

/// Collapses detections from cyclically adjacent viewports whose torso boxes
/// score at least `sigma1`; groups are closed transitively. The survivor of a
/// group has the most joints, then the highest mean confidence. Output is
/// ordered by (source viewport, anchor column).
std::vector<Detection> fuse_duplicates(std::vector<Detection> dets, std::size_t n_viewports,
                                       double sigma1, double image_width);

struct TileDispatch {
  bool concurrent = true;
  // Optional dispatch order over tile indices; empty means natural order.
  std::vector<std::size_t> order;
};

DetectionResult run_tiles(const Frame& frame, const DetectorPort& detector,
                          const TileLayout& layout, double sigma1, const CameraModel& cam,
                          const TileDispatch& dispatch = {});

Viewport full_frame_viewport(const CameraModel& cam, double processed_width);
Viewport roi_viewport(const ImagePoint& center, const CameraModel& cam, const RoiConfig& cfg);

/// Downscaled full-frame pass, plus a full-resolution ROI pass around the
/// predicted target when one is available.
DetectionResult run_roi(const Frame& frame, const DetectorPort& detector,
                        const std::optional<ImagePoint>& target_prediction,
                        const CameraModel& cam, const RoiConfig& cfg, double sigma1);

DetectionResult run_fullframe(const Frame& frame, const DetectorPort& detector,
                              const CameraModel& cam, const RoiConfig& cfg);

/// Largest torso box wins; ties go to the smallest box column.
Detection select_target(std::span<const Detection> dets, double image_width);

}  // namespace panotrack
