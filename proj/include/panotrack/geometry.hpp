#pragma once

// Equirectangular camera model: pixel <-> polar <-> ground-plane world
// mappings for a camera mounted orthogonal to the ground at a fixed height.
//
// Conventions:
//  * image column x grows to the right, row y grows downward;
//  * theta (azimuth) is 0 at the image center column, positive to the left,
//    normalized to (-180, 180];
//  * phi (elevation) is positive above the horizon;
//  * the world frame has its origin at the camera foot, z up, and the x axis
//    looking through the image center.
// Angles cross the interface in degrees and are converted internally.

#include <limits>

namespace panotrack {

struct CameraModel {
  double image_width = 1920.0;   // pixels
  double image_height = 960.0;   // pixels
  double fov_h = 360.0;          // degrees
  double fov_v = 180.0;          // degrees
  double mount_height = 1.2;     // meters
  double ankle_height = 0.10;    // meters, average ankle height of a person

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double deg_per_px_x() const { return fov_h / image_width; }
  double deg_per_px_y() const { return fov_v / image_height; }

  bool operator==(const CameraModel&) const = default;
};

struct ImagePoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const ImagePoint&) const = default;
};

struct PolarDirection {
  double theta = 0.0;  // degrees, (-180, 180]
  double phi = 0.0;    // degrees, [-90, 90]
};

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const WorldPoint&) const = default;
};

/// Sentinel returned by localization_sensitivity when the perturbed ankle
/// row reaches the horizon and the range diverges.
inline constexpr double kUnboundedError = std::numeric_limits<double>::infinity();

double normalize_degrees(double angle);

/// Reduces a column into [0, width).
double wrap_column(double x, double width);

/// Signed shortest horizontal offset from `from` to `to`, in (-width/2, width/2].
double signed_wrap_delta(double from, double to, double width);

/// Column x is taken modulo the image width; rows outside [0, height] and
/// non-finite coordinates throw DomainError.
PolarDirection image_to_polar(const ImagePoint& p, const CameraModel& cam);

/// Horizontal distance to a ground contact seen at elevation `phi` (< 0).
/// The depression angle is used so the result is positive; phi = -90 gives 0.
double ground_range(double phi, const CameraModel& cam);

double estimate_height(double phi_neck, double rho, const CameraModel& cam);

/// Ground position of a person from the ankle midpoint, with the neck height
/// in z. The neck is assumed to be vertically above the ankle midpoint.
WorldPoint localize(const ImagePoint& ankle_mid, const ImagePoint& neck, const CameraModel& cam);

ImagePoint world_to_image(const WorldPoint& w, const CameraModel& cam);

/// Image distance between two points, honoring horizontal wrap-around.
double wrap_distance(const ImagePoint& p1, const ImagePoint& p2, double image_width);

/// Ground-range error caused by shifting the ankle row `pixel_error` pixels
/// toward the horizon for a person standing `distance` meters away.
double localization_sensitivity(double distance, double pixel_error, const CameraModel& cam);

}  // namespace panotrack
