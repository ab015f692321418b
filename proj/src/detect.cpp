#include "panotrack/detect.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <tuple>

#include "panotrack/errors.hpp"

namespace panotrack {
namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "neck", "left_ankle", "right_ankle", "left_shoulder", "right_shoulder", "left_hip", "right_hip"};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller root wins so the representative is stable.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool adjacent(std::size_t a, std::size_t b, std::size_t n) {
  if (n < 2 || a == b) return false;
  return (a + 1) % n == b || (b + 1) % n == a;
}

double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

struct TileOutput {
  std::vector<Detection> detections;
  std::optional<std::string> error;
};

TileOutput detect_in_viewport(const Frame& frame, const DetectorPort& detector,
                              const Viewport& vp, std::size_t index, double image_width) {
  TileOutput out;
  try {
    for (Skeleton& sk : detector.detect(frame, vp, index)) {
      for (Joint j : kAllJoints) {
        if (auto& kp = sk[j]) kp->pt = vp.to_full(kp->pt, image_width);
      }
      out.detections.push_back({std::move(sk), index, vp.scale});
    }
  } catch (const std::exception& e) {
    out.detections.clear();
    out.error = e.what();
  }
  return out;
}

DetectionResult dispatch_viewports(const Frame& frame, const DetectorPort& detector,
                                   std::span<const Viewport> viewports, double image_width,
                                   const TileDispatch& dispatch) {
  const std::size_t n = viewports.size();
  std::vector<std::size_t> order = dispatch.order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  } else {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted.size() != n || sorted[i] != i) throw ConfigError("dispatch order is not a permutation of the tiles");
    }
  }

  std::vector<TileOutput> outputs(n);
  if (dispatch.concurrent && n > 1) {
    std::vector<std::pair<std::size_t, std::future<TileOutput>>> pending;
    pending.reserve(n);
    for (std::size_t i : order) {
      pending.emplace_back(i, std::async(std::launch::async, detect_in_viewport, std::cref(frame),
                                         std::cref(detector), std::cref(viewports[i]), i,
                                         image_width));
    }
    for (auto& [i, fut] : pending) outputs[i] = fut.get();
  } else {
    for (std::size_t i : order) outputs[i] = detect_in_viewport(frame, detector, viewports[i], i, image_width);
  }

  DetectionResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (outputs[i].error) {
      result.partial = true;
      result.failures.push_back({i, *outputs[i].error});
    }
    for (Detection& d : outputs[i].detections) result.detections.push_back(std::move(d));
  }
  return result;
}

}  // namespace

std::string_view joint_name(Joint j) { return kJointNames[static_cast<std::size_t>(j)]; }

std::optional<Joint> joint_from_name(std::string_view name) {
  for (Joint j : kAllJoints) {
    if (joint_name(j) == name) return j;
  }
  return std::nullopt;
}

std::size_t Skeleton::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(joints_.begin(), joints_.end(), [](const auto& k) { return k.has_value(); }));
}

double Skeleton::mean_confidence() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& k : joints_) {
    if (k) {
      sum += k->confidence;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double Skeleton::anchor_x() const {
  if (const auto& neck = (*this)[Joint::neck]) return neck->pt.x;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& k : joints_) {
    if (k) {
      sum += k->pt.x;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

bool Viewport::contains_column(double x, double image_width) const {
  return wrap_column(x - origin_x, image_width) < width;
}

ImagePoint Viewport::to_local(const ImagePoint& full, double image_width) const {
  return {wrap_column(full.x - origin_x, image_width) * scale, (full.y - origin_y) * scale};
}

ImagePoint Viewport::to_full(const ImagePoint& local, double image_width) const {
  return {wrap_column(origin_x + local.x / scale, image_width), origin_y + local.y / scale};
}

TilesConfig default_tiles_config(const CameraModel& cam) {
  TilesConfig cfg;
  const double sx = cam.image_width / 1920.0;
  const double sy = cam.image_height / 960.0;
  cfg.overlap *= sx;
  cfg.row_min *= sy;
  cfg.row_max *= sy;
  return cfg;
}

TileLayout build_tiles(const CameraModel& cam, int n_tiles, double overlap,
                       std::pair<double, double> row_range, double scale) {
  if (n_tiles < 2) throw ConfigError("at least two tiles are required");
  const double stride = cam.image_width / n_tiles;
  if (!(overlap >= 0.0) || !(overlap < stride)) {
    std::ostringstream msg;
    msg << "tile overlap " << overlap << " must be in [0, " << stride << ")";
    throw ConfigError(msg.str());
  }
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("tile scale must be in (0, 1]");
  const double top = std::clamp(row_range.first, 0.0, cam.image_height);
  const double bottom = std::clamp(row_range.second, 0.0, cam.image_height);
  if (!(bottom > top)) throw ConfigError("tile row range is empty");

  TileLayout layout;
  layout.overlap = overlap;
  layout.n_tiles = n_tiles;
  for (int i = 0; i < n_tiles; ++i) {
    layout.viewports.push_back({i * stride, top, stride + overlap, bottom - top, scale});
  }
  return layout;
}

BoundingBox torso_bbox(const Skeleton& sk, double image_width) {
  static constexpr std::array kTorso = {Joint::neck, Joint::left_shoulder, Joint::right_shoulder,
                                        Joint::left_hip, Joint::right_hip};
  if (!sk.has(Joint::neck)) throw DegenerateSkeletonError("torso box needs a neck joint");

  std::vector<ImagePoint> pts;
  for (Joint j : kTorso) {
    if (const auto& kp = sk[j]) pts.push_back({wrap_column(kp->pt.x, image_width), kp->pt.y});
  }
  if (pts.size() < 2) throw DegenerateSkeletonError("torso box needs a shoulder or hip joint");

  auto [xmin_it, xmax_it] = std::minmax_element(
      pts.begin(), pts.end(), [](const ImagePoint& a, const ImagePoint& b) { return a.x < b.x; });
  if (xmax_it->x - xmin_it->x > image_width / 2.0) {
    for (ImagePoint& p : pts) {
      if (p.x < image_width / 2.0) p.x += image_width;
    }
  }
  double x0 = pts.front().x, x1 = x0, y0 = pts.front().y, y1 = y0;
  for (const ImagePoint& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return {wrap_column(x0, image_width), y0, std::max(x1 - x0, 1.0), std::max(y1 - y0, 1.0)};
}

double merge_score(const BoundingBox& b1, const BoundingBox& b2, double image_width) {
  const double x1 = wrap_column(b1.x, image_width);
  const double x2 = wrap_column(b2.x, image_width);
  double ix = 0.0;
  for (int k = -1; k <= 1; ++k) {
    const double shift = k * image_width;
    ix += interval_overlap(x1, x1 + b1.w, x2 + shift, x2 + shift + b2.w);
  }
  ix = std::min({ix, b1.w, b2.w});
  const double iy = interval_overlap(b1.y, b1.y + b1.h, b2.y, b2.y + b2.h);
  const double smaller = std::min(b1.area(), b2.area());
  if (!(smaller > 0.0)) return 0.0;
  return std::clamp(ix * iy / smaller, 0.0, 1.0);
}

std::vector<Detection> fuse_duplicates(std::vector<Detection> dets, std::size_t n_viewports,
                                       double sigma1, double image_width) {
  const std::size_t n = dets.size();
  std::vector<std::optional<BoundingBox>> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      boxes[i] = torso_bbox(dets[i].skeleton, image_width);
    } catch (const DegenerateSkeletonError&) {
      // No torso box: the detection cannot be matched and is kept as is.
    }
  }

  DisjointSets groups(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!boxes[i] || !boxes[j] || !adjacent(dets[i].source, dets[j].source, n_viewports)) continue;
      if (merge_score(*boxes[i], *boxes[j], image_width) >= sigma1) groups.unite(i, j);
    }
  }

  std::vector<std::optional<std::size_t>> best(n);
  auto better = [&](std::size_t a, std::size_t b) {
    const auto ca = dets[a].skeleton.present_count();
    const auto cb = dets[b].skeleton.present_count();
    if (ca != cb) return ca > cb;
    const double ma = dets[a].skeleton.mean_confidence();
    const double mb = dets[b].skeleton.mean_confidence();
    if (ma != mb) return ma > mb;
    return a < b;
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto& slot = best[groups.find(i)];
    if (!slot || better(i, *slot)) slot = i;
  }

  std::vector<std::size_t> keep;
  for (const auto& slot : best) {
    if (slot) keep.push_back(*slot);
  }
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(dets[a].source, dets[a].skeleton.anchor_x(), a) <
           std::make_tuple(dets[b].source, dets[b].skeleton.anchor_x(), b);
  });

  std::vector<Detection> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(std::move(dets[i]));
  return out;
}

DetectionResult run_tiles(const Frame& frame, const DetectorPort& detector,
                          const TileLayout& layout, double sigma1, const CameraModel& cam,
                          const TileDispatch& dispatch) {
  DetectionResult result =
      dispatch_viewports(frame, detector, layout.viewports, cam.image_width, dispatch);
  result.detections = fuse_duplicates(std::move(result.detections), layout.viewports.size(),
                                      sigma1, cam.image_width);
  return result;
}

Viewport full_frame_viewport(const CameraModel& cam, double processed_width) {
  if (!(processed_width > 0.0)) throw ConfigError("processed width must be positive");
  const double scale = std::min(1.0, processed_width / cam.image_width);
  return {0.0, 0.0, cam.image_width, cam.image_height, scale};
}

Viewport roi_viewport(const ImagePoint& center, const CameraModel& cam, const RoiConfig& cfg) {
  if (!(cfg.roi_width > 0.0) || !(cfg.roi_height > 0.0)) throw ConfigError("roi size must be positive");
  const double w = std::min(cfg.roi_width, cam.image_width);
  const double h = std::min(cfg.roi_height, cam.image_height);
  const double top = std::clamp(center.y - h / 2.0, 0.0, cam.image_height - h);
  return {wrap_column(center.x - w / 2.0, cam.image_width), top, w, h, 1.0};
}

DetectionResult run_roi(const Frame& frame, const DetectorPort& detector,
                        const std::optional<ImagePoint>& target_prediction,
                        const CameraModel& cam, const RoiConfig& cfg, double sigma1) {
  std::vector<Viewport> viewports{full_frame_viewport(cam, cfg.full_width)};
  if (target_prediction) viewports.push_back(roi_viewport(*target_prediction, cam, cfg));
  DetectionResult result =
      dispatch_viewports(frame, detector, viewports, cam.image_width, {.concurrent = false, .order = {}});
  result.detections = fuse_duplicates(std::move(result.detections), viewports.size(), sigma1,
                                      cam.image_width);
  return result;
}

DetectionResult run_fullframe(const Frame& frame, const DetectorPort& detector,
                              const CameraModel& cam, const RoiConfig& cfg) {
  const std::array viewports{full_frame_viewport(cam, cfg.full_width)};
  return dispatch_viewports(frame, detector, viewports, cam.image_width, {.concurrent = false, .order = {}});
}

Detection select_target(std::span<const Detection> dets, double image_width) {
  if (dets.empty()) throw NoTargetError("no detections to promote as target");
  auto key = [&](const Detection& d) {
    try {
      const BoundingBox b = torso_bbox(d.skeleton, image_width);
      return std::make_pair(b.area(), b.x);
    } catch (const DegenerateSkeletonError&) {
      return std::make_pair(0.0, d.skeleton.anchor_x());
    }
  };
  std::size_t best = 0;
  auto best_key = key(dets[0]);
  for (std::size_t i = 1; i < dets.size(); ++i) {
    const auto k = key(dets[i]);
    if (k.first > best_key.first || (k.first == best_key.first && k.second < best_key.second)) {
      best = i;
      best_key = k;
    }
  }
  return dets[best];
}

}  // namespace panotrack
