#include "panotrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "panotrack/errors.hpp"

namespace panotrack {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Columns repeat every 360 degrees of azimuth, which equals the image width
// for a full panorama.
double column_period(const CameraModel& cam) { return 360.0 / cam.deg_per_px_x(); }

double row_to_phi(double y, const CameraModel& cam) { return 90.0 - cam.deg_per_px_y() * y; }

double phi_to_row(double phi, const CameraModel& cam) { return (90.0 - phi) / cam.deg_per_px_y(); }

}  // namespace

void CameraModel::validate() const {
  std::ostringstream why;
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    why << "image size must be positive (got " << image_width << "x" << image_height << ")";
  } else if (!(fov_h > 0.0 && fov_h <= 360.0)) {
    why << "fov_h must be in (0, 360], got " << fov_h;
  } else if (!(fov_v > 0.0 && fov_v <= 180.0)) {
    why << "fov_v must be in (0, 180], got " << fov_v;
  } else if (!(ankle_height >= 0.0) || !(mount_height > ankle_height)) {
    why << "require mount_height > ankle_height >= 0 (got " << mount_height << ", "
        << ankle_height << ")";
  } else {
    return;
  }
  throw ConfigError("camera: " + why.str());
}

double normalize_degrees(double angle) {
  double a = std::fmod(angle, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double wrap_column(double x, double width) {
  double w = std::fmod(x, width);
  if (w < 0.0) w += width;
  // fmod of a tiny negative value can round up to exactly `width`.
  if (w >= width) w = 0.0;
  return w;
}

double signed_wrap_delta(double from, double to, double width) {
  double d = wrap_column(to - from, width);
  if (d > width / 2.0) d -= width;
  return d;
}

PolarDirection image_to_polar(const ImagePoint& p, const CameraModel& cam) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.y < 0.0 || p.y > cam.image_height) {
    std::ostringstream msg;
    msg << "image point (" << p.x << ", " << p.y << ") outside the image";
    throw DomainError(msg.str());
  }
  const double x = wrap_column(p.x, column_period(cam));
  return {normalize_degrees(180.0 - cam.deg_per_px_x() * x), row_to_phi(p.y, cam)};
}

double ground_range(double phi, const CameraModel& cam) {
  if (!(phi < 0.0)) {
    std::ostringstream msg;
    msg << "ankle elevation " << phi << " deg is not below the horizon";
    throw AboveHorizonError(msg.str());
  }
  if (phi < -90.0) {
    throw DomainError("elevation below -90 deg");
  }
  if (phi == -90.0) return 0.0;
  return (cam.mount_height - cam.ankle_height) / std::tan(-phi * kDegToRad);
}

double estimate_height(double phi_neck, double rho, const CameraModel& cam) {
  if (!(rho > 0.0)) throw DomainError("range must be positive");
  return cam.mount_height + rho * std::tan(phi_neck * kDegToRad);
}

WorldPoint localize(const ImagePoint& ankle_mid, const ImagePoint& neck, const CameraModel& cam) {
  const PolarDirection ankle = image_to_polar(ankle_mid, cam);
  const PolarDirection head = image_to_polar(neck, cam);
  const double rho = ground_range(ankle.phi, cam);
  const double theta = ankle.theta * kDegToRad;
  const double height = rho > 0.0 ? estimate_height(head.phi, rho, cam) : cam.mount_height;
  return {rho * std::cos(theta), rho * std::sin(theta), height};
}

ImagePoint world_to_image(const WorldPoint& w, const CameraModel& cam) {
  const double r = std::hypot(w.x, w.y);
  if (!(r > 0.0)) throw SingularPointError("world point lies on the camera axis");
  const double theta = std::atan2(w.y, w.x) * kRadToDeg;
  const double phi = std::atan2(w.z - cam.mount_height, r) * kRadToDeg;
  return {wrap_column((180.0 - theta) / cam.deg_per_px_x(), column_period(cam)),
          phi_to_row(phi, cam)};
}

double wrap_distance(const ImagePoint& p1, const ImagePoint& p2, double image_width) {
  double dx = wrap_column(std::abs(p1.x - p2.x), image_width);
  dx = std::min(dx, image_width - dx);
  return std::hypot(dx, p1.y - p2.y);
}

double localization_sensitivity(double distance, double pixel_error, const CameraModel& cam) {
  if (!(distance > 0.0)) throw DomainError("distance must be positive");
  if (!(pixel_error >= 0.0)) throw DomainError("pixel error must be non-negative");
  if (pixel_error == 0.0) return 0.0;
  const ImagePoint ankle = world_to_image({distance, 0.0, cam.ankle_height}, cam);
  const double phi = row_to_phi(ankle.y - pixel_error, cam);
  if (phi >= 0.0) return kUnboundedError;
  return std::abs(ground_range(phi, cam) - distance);
}

}  // namespace panotrack
