#include "panotrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <boost/math/distributions/chi_squared.hpp>

#include "panotrack/errors.hpp"

namespace panotrack {
namespace {

template <int M>
using MeasVector = Eigen::Matrix<double, M, 1>;
template <int M>
using MeasSigma = Eigen::Matrix<double, M, kSigmaCount>;

ImagePoint wrap_midpoint(const ImagePoint& a, const ImagePoint& b, double width) {
  return {wrap_column(a.x + signed_wrap_delta(a.x, b.x, width) / 2.0, width), (a.y + b.y) / 2.0};
}

// Shifts the left-half columns of a row when the row straddles the seam.
template <int M>
void shift_split_row(MeasSigma<M>& z, int row, double width) {
  const double lo = z.row(row).minCoeff();
  const double hi = z.row(row).maxCoeff();
  if (hi - lo <= width / 2.0) return;
  for (int i = 0; i < kSigmaCount; ++i) {
    if (z(row, i) < width / 2.0) z(row, i) += width;
  }
}

double chi_square_bound(int dof, double probability) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, probability);
}

template <int M>
MeasVector<M> measure(const StateVector& s, const CameraModel& cam) {
  const PredictedMeasurement p = project_to_image(TrackState::from_vector(s), cam);
  MeasVector<M> z;
  if constexpr (M == 4) {
    z << p.ankle_mid.x, p.ankle_mid.y, p.neck.x, p.neck.y;
  } else {
    z << p.neck.x, p.neck.y;
  }
  return z;
}

// Rows holding image columns in the measurement vector.
template <int M>
constexpr std::array<int, M / 2> column_rows() {
  if constexpr (M == 4) {
    return {0, 2};
  } else {
    return {0};
  }
}

template <int M>
UpdateResult update_impl(const Track& track, const MeasVector<M>& observed, double scale,
                         const CameraModel& cam, const TrackerConfig& cfg) {
  const double width = cam.image_width;
  const SigmaWeights w = sigma_weights(cfg.ukf);
  const StateVector mean = track.state.to_vector();
  const SigmaPoints sigma = make_sigma_points(mean, track.covariance, w);

  MeasSigma<M> z;
  try {
    for (int i = 0; i < kSigmaCount; ++i) z.col(i) = measure<M>(sigma.col(i), cam);
  } catch (const SingularPointError&) {
    throw FilterDivergenceError("sigma point reached the camera axis");
  }
  if (cfg.wrap_correction) {
    for (int row : column_rows<M>()) shift_split_row<M>(z, row, width);
  }

  MeasVector<M> z_mean = MeasVector<M>::Zero();
  for (int i = 0; i < kSigmaCount; ++i) z_mean += w.mean[i] * z.col(i);

  Eigen::Matrix<double, M, M> s = Eigen::Matrix<double, M, M>::Zero();
  Eigen::Matrix<double, kStateDim, M> cross = Eigen::Matrix<double, kStateDim, M>::Zero();
  for (int i = 0; i < kSigmaCount; ++i) {
    const MeasVector<M> dz = z.col(i) - z_mean;
    const StateVector dx = sigma.col(i) - mean;
    s += w.cov[i] * dz * dz.transpose();
    cross += w.cov[i] * dx * dz.transpose();
  }
  const double noise = cfg.ukf.measurement_noise / (scale * scale);
  s.diagonal().array() += noise;

  MeasVector<M> innovation = observed - z_mean;
  if (cfg.wrap_correction) {
    for (int row : column_rows<M>()) innovation(row) = signed_wrap_delta(z_mean(row), observed(row), width);
  }

  Eigen::LLT<Eigen::Matrix<double, M, M>> llt(s);
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    throw FilterDivergenceError("innovation covariance is not positive definite");
  }

  UpdateResult result{track, false, 0.0};
  result.mahalanobis_sq = innovation.dot(llt.solve(innovation));
  if (!std::isfinite(result.mahalanobis_sq) ||
      result.mahalanobis_sq > chi_square_bound(M, cfg.innovation_gate_probability)) {
    result.track.frames_since_update += 1;
    return result;
  }

  const Eigen::Matrix<double, kStateDim, M> gain = llt.solve(cross.transpose()).transpose();
  StateVector posterior = mean + gain * innovation;
  StateCovariance cov = track.covariance - gain * s * gain.transpose();
  repair_covariance(cov);

  posterior(4) = std::clamp(posterior(4), kMinPersonHeight, kMaxPersonHeight);
  if (!posterior.allFinite()) throw FilterDivergenceError("state became non-finite");

  result.track.state = TrackState::from_vector(posterior);
  result.track.covariance = cov;
  result.track.frames_since_update = 0;
  result.accepted = true;
  return result;
}

}  // namespace

StateVector TrackState::to_vector() const {
  StateVector v;
  v << x, y, vx, vy, h_n;
  return v;
}

TrackState TrackState::from_vector(const StateVector& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::tentative:
      return "tentative";
    case TrackStatus::confirmed:
      return "confirmed";
    case TrackStatus::lost:
      return "lost";
  }
  return "unknown";
}

void TrackerConfig::validate() const {
  sigma_weights(ukf);
  for (double q : ukf.process_noise) {
    if (!(q >= 0.0)) throw ConfigError("process noise must be non-negative");
  }
  if (!(ukf.measurement_noise > 0.0)) throw ConfigError("measurement noise must be positive");
  if (!(gate_px > 0.0)) throw ConfigError("association gate must be positive");
  if (!(innovation_gate_probability > 0.0 && innovation_gate_probability < 1.0)) {
    throw ConfigError("innovation gate probability must be in (0, 1)");
  }
  if (!(duplicate_overlap > 0.0 && duplicate_overlap <= 1.0)) {
    throw ConfigError("duplicate overlap must be in (0, 1]");
  }
  if (!(duplicate_radius_px >= 0.0)) throw ConfigError("duplicate radius must be non-negative");
  if (confirm_hits < 1 || max_misses < 1) throw ConfigError("lifecycle counts must be at least 1");
  if (!(initial_position_var > 0.0 && initial_velocity_var > 0.0 && initial_height_var > 0.0)) {
    throw ConfigError("initial variances must be positive");
  }
}

std::optional<Measurement> measurement_from(const Detection& det, double image_width) {
  const Skeleton& sk = det.skeleton;
  if (!sk.has(Joint::neck)) return std::nullopt;
  const ImagePoint neck = sk[Joint::neck]->pt;
  if (sk.has(Joint::left_ankle) && sk.has(Joint::right_ankle)) {
    const ImagePoint mid =
        wrap_midpoint(sk[Joint::left_ankle]->pt, sk[Joint::right_ankle]->pt, image_width);
    return Measurement{FullBody{mid, neck}, det.scale};
  }
  return Measurement{NeckOnly{neck}, det.scale};
}

Track predict(const Track& track, double dt, const UkfParams& params) {
  if (!(dt > 0.0)) throw DomainError("predict needs dt > 0");
  const SigmaWeights w = sigma_weights(params);
  const SigmaPoints sigma = make_sigma_points(track.state.to_vector(), track.covariance, w);

  SigmaPoints moved = sigma;
  moved.row(0) += dt * sigma.row(2);
  moved.row(1) += dt * sigma.row(3);

  StateVector mean = StateVector::Zero();
  for (int i = 0; i < kSigmaCount; ++i) mean += w.mean[i] * moved.col(i);
  StateCovariance cov = StateCovariance::Zero();
  for (int i = 0; i < kSigmaCount; ++i) {
    const StateVector d = moved.col(i) - mean;
    cov += w.cov[i] * d * d.transpose();
  }
  for (int k = 0; k < kStateDim; ++k) cov(k, k) += params.process_noise[k] * dt;
  repair_covariance(cov);

  Track out = track;
  out.state = TrackState::from_vector(mean);
  out.covariance = cov;
  return out;
}

PredictedMeasurement project_to_image(const TrackState& state, const CameraModel& cam) {
  return {world_to_image({state.x, state.y, cam.ankle_height}, cam),
          world_to_image({state.x, state.y, state.h_n}, cam)};
}

WrapCorrected wrap_correct(std::span<const ImagePoint> points, double image_width) {
  WrapCorrected out{{points.begin(), points.end()}, {}};
  if (points.empty()) return out;
  const auto [lo, hi] = std::minmax_element(
      points.begin(), points.end(), [](const ImagePoint& a, const ImagePoint& b) { return a.x < b.x; });
  if (hi->x - lo->x > image_width / 2.0) {
    for (ImagePoint& p : out.points) {
      if (p.x < image_width / 2.0) p.x += image_width;
    }
  }
  double sx = 0.0, sy = 0.0;
  for (const ImagePoint& p : out.points) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(out.points.size());
  out.mean = {wrap_column(sx / n, image_width), sy / n};
  return out;
}

UpdateResult update(const Track& track, const Measurement& meas, const CameraModel& cam,
                    const TrackerConfig& cfg) {
  if (track.status == TrackStatus::lost) throw DomainError("cannot update a lost track");
  if (!(meas.scale > 0.0)) throw DomainError("measurement scale must be positive");
  if (const auto* full = std::get_if<FullBody>(&meas.value)) {
    MeasVector<4> z;
    z << full->ankle_mid.x, full->ankle_mid.y, full->neck.x, full->neck.y;
    return update_impl<4>(track, z, meas.scale, cam, cfg);
  }
  const auto& neck = std::get<NeckOnly>(meas.value).neck;
  MeasVector<2> z;
  z << neck.x, neck.y;
  return update_impl<2>(track, z, meas.scale, cam, cfg);
}

std::optional<ImagePoint> predicted_neck(const Track& track, const CameraModel& cam,
                                         const UkfParams& params, bool wrap_aware) {
  const SigmaWeights w = sigma_weights(params);
  const SigmaPoints sigma = make_sigma_points(track.state.to_vector(), track.covariance, w);
  MeasSigma<2> z;
  try {
    for (int i = 0; i < kSigmaCount; ++i) z.col(i) = measure<2>(sigma.col(i), cam);
  } catch (const SingularPointError&) {
    return std::nullopt;
  }
  if (wrap_aware) shift_split_row<2>(z, 0, cam.image_width);
  MeasVector<2> mean = MeasVector<2>::Zero();
  for (int i = 0; i < kSigmaCount; ++i) mean += w.mean[i] * z.col(i);
  if (wrap_aware) mean(0) = wrap_column(mean(0), cam.image_width);
  return ImagePoint{mean(0), mean(1)};
}

Assignment associate(std::span<const Track> tracks, std::span<const Detection> dets,
                     const CameraModel& cam, double gate, bool wrap_aware, const UkfParams& params) {
  constexpr double kForbidden = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(tracks.size(), std::vector<double>(dets.size(), kForbidden));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    std::optional<ImagePoint> predicted;
    try {
      predicted = predicted_neck(tracks[i], cam, params, wrap_aware);
    } catch (const FilterDivergenceError&) {
    }
    if (!predicted) continue;
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (const auto& neck = dets[j].skeleton[Joint::neck]) {
        cost[i][j] = wrap_aware ? wrap_distance(*predicted, neck->pt, cam.image_width)
                                : std::hypot(predicted->x - neck->pt.x, predicted->y - neck->pt.y);
      }
    }
  }
  return solve_assignment(cost, gate);
}

Tracker::Tracker(CameraModel cam, TrackerConfig cfg) : cam_(cam), cfg_(std::move(cfg)) {
  cam_.validate();
  cfg_.validate();
}

void Tracker::spawn(const Detection& det, std::vector<std::size_t>& spawned) {
  const auto meas = measurement_from(det, cam_.image_width);
  if (!meas) return;
  const auto* full = std::get_if<FullBody>(&meas->value);
  if (!full) return;
  WorldPoint where;
  try {
    where = localize(full->ankle_mid, full->neck, cam_);
  } catch (const DomainError&) {
    return;
  }
  if (!(std::hypot(where.x, where.y) > 0.0)) return;

  Track t;
  t.id = next_id_++;
  t.state = {where.x, where.y, 0.0, 0.0, std::clamp(where.z, kMinPersonHeight, kMaxPersonHeight)};
  t.covariance = StateCovariance::Zero();
  t.covariance.diagonal() << cfg_.initial_position_var, cfg_.initial_position_var,
      cfg_.initial_velocity_var, cfg_.initial_velocity_var, cfg_.initial_height_var;
  t.status = TrackStatus::tentative;
  t.hits = 1;
  try {
    t.last_torso = torso_bbox(det.skeleton, cam_.image_width);
  } catch (const DegenerateSkeletonError&) {
  }
  tracks_.push_back(std::move(t));
  spawned.push_back(tracks_.size() - 1);
}

void Tracker::maintain_target(std::span<const std::size_t> spawned, std::span<const Detection> dets,
                              std::span<const std::size_t> spawn_sources) {
  for (const Track& t : tracks_) {
    if (t.is_target && t.status != TrackStatus::lost) return;
  }

  // The first person ever seen becomes the target at once; later
  // re-acquisitions only consider confirmed tracks.
  if (!ever_had_target_ && !spawned.empty()) {
    std::vector<Detection> candidates;
    for (std::size_t src : spawn_sources) candidates.push_back(dets[src]);
    const Detection chosen = select_target(candidates, cam_.image_width);
    for (std::size_t k = 0; k < spawned.size(); ++k) {
      if (dets[spawn_sources[k]].skeleton == chosen.skeleton) {
        Track& t = tracks_[spawned[k]];
        t.status = TrackStatus::confirmed;
        t.is_target = true;
        ever_had_target_ = true;
        return;
      }
    }
  }

  Track* best = nullptr;
  auto area = [](const Track& t) { return t.last_torso ? t.last_torso->area() : 0.0; };
  auto column = [](const Track& t) { return t.last_torso ? t.last_torso->x : 0.0; };
  for (Track& t : tracks_) {
    if (t.status != TrackStatus::confirmed) continue;
    if (!best || area(t) > area(*best) || (area(t) == area(*best) && column(t) < column(*best))) best = &t;
  }
  if (best) {
    best->is_target = true;
    ever_had_target_ = true;
  }
}

std::vector<TrackReport> Tracker::step(std::span<const Detection> dets, double dt) {
  if (!(dt > 0.0)) throw DomainError("tracker step needs dt > 0");

  if (started_) {
    for (Track& t : tracks_) {
      try {
        t = predict(t, dt, cfg_.ukf);
      } catch (const FilterDivergenceError&) {
        t.status = TrackStatus::lost;
      }
    }
  }
  started_ = true;

  std::vector<Track> live;
  std::vector<std::size_t> live_index;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].status != TrackStatus::lost) {
      live.push_back(tracks_[i]);
      live_index.push_back(i);
    }
  }
  const Assignment assignment = associate(live, dets, cam_, cfg_.gate_px, cfg_.wrap_correction, cfg_.ukf);

  std::vector<bool> updated(tracks_.size(), false);
  std::vector<bool> det_used(dets.size(), false);
  for (const auto& [row, col] : assignment.pairs) {
    Track& t = tracks_[live_index[row]];
    det_used[col] = true;
    const auto meas = measurement_from(dets[col], cam_.image_width);
    if (!meas) continue;
    try {
      UpdateResult r = update(t, *meas, cam_, cfg_);
      if (r.accepted) {
        t = std::move(r.track);
        t.hits += 1;
        try {
          t.last_torso = torso_bbox(dets[col].skeleton, cam_.image_width);
        } catch (const DegenerateSkeletonError&) {
        }
        updated[live_index[row]] = true;
      }
    } catch (const FilterDivergenceError&) {
      t.status = TrackStatus::lost;
    }
  }

  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& t = tracks_[i];
    if (t.status == TrackStatus::lost) continue;
    if (updated[i]) {
      t.frames_since_update = 0;
      if (t.status == TrackStatus::tentative && t.hits >= cfg_.confirm_hits) t.status = TrackStatus::confirmed;
      continue;
    }
    t.frames_since_update += 1;
    if (t.status == TrackStatus::tentative || t.frames_since_update >= cfg_.max_misses) {
      t.status = TrackStatus::lost;
    }
  }

  // Detections already explaining a track this frame; an unmatched detection
  // close to one of them is a duplicate that fusion missed.
  std::vector<const Detection*> taken;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (det_used[j]) taken.push_back(&dets[j]);
  }
  auto duplicate_of_taken = [&](const Detection& d) {
    const auto& neck = d.skeleton[Joint::neck];
    std::optional<BoundingBox> box;
    try {
      box = torso_bbox(d.skeleton, cam_.image_width);
    } catch (const DegenerateSkeletonError&) {
    }
    for (const Detection* other : taken) {
      const auto& other_neck = other->skeleton[Joint::neck];
      if (neck && other_neck &&
          wrap_distance(neck->pt, other_neck->pt, cam_.image_width) <= cfg_.duplicate_radius_px) {
        return true;
      }
      if (!box) continue;
      try {
        const BoundingBox m = torso_bbox(other->skeleton, cam_.image_width);
        if (merge_score(*box, m, cam_.image_width) >= cfg_.duplicate_overlap) return true;
      } catch (const DegenerateSkeletonError&) {
      }
    }
    return false;
  };

  std::vector<std::size_t> spawned;
  std::vector<std::size_t> spawn_sources;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (det_used[j] || duplicate_of_taken(dets[j])) continue;
    const std::size_t before = spawned.size();
    spawn(dets[j], spawned);
    if (spawned.size() > before) {
      spawn_sources.push_back(j);
      taken.push_back(&dets[j]);
    }
  }

  maintain_target(spawned, dets, spawn_sources);

  std::vector<TrackReport> reports;
  reports.reserve(tracks_.size());
  for (Track& t : tracks_) {
    ImagePoint neck{};
    try {
      neck = project_to_image(t.state, cam_).neck;
    } catch (const SingularPointError&) {
      t.status = TrackStatus::lost;
    }
    if (t.status == TrackStatus::lost) t.is_target = false;
    reports.push_back({t, {t.state.x, t.state.y, t.state.h_n}, neck});
  }
  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::lost; });
  return reports;
}

std::optional<ImagePoint> Tracker::predicted_target_center(double dt) const {
  for (const Track& t : tracks_) {
    if (!t.is_target) continue;
    TrackState ahead = t.state;
    ahead.x += ahead.vx * dt;
    ahead.y += ahead.vy * dt;
    try {
      const PredictedMeasurement p = project_to_image(ahead, cam_);
      return wrap_midpoint(p.neck, p.ankle_mid, cam_.image_width);
    } catch (const SingularPointError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace panotrack
