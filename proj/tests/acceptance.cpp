// Acceptance suite. One line per criterion; exit status is non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "panotrack/io.hpp"
#include "panotrack/metrics.hpp"
#include "panotrack/pipeline.hpp"
#include "panotrack/sim.hpp"

using namespace panotrack;

namespace {

// Pinned tolerances.
constexpr double kRoundTripRelTol = 1e-6;
constexpr double kRoundTripSeconds = 1.0;
constexpr int kRoundTripPoses = 10000;
constexpr double kSigma1 = 0.9;
constexpr int kIdempotenceSets = 1000;
constexpr int kSeamSeeds = 20;
constexpr int kAssignmentInstances = 500;
constexpr double kSensitivityRef = 0.08;
constexpr double kSensitivityTol = 0.20;
constexpr double kFarNearRatio = 5.0;
constexpr double kFullframeFarM1 = 0.5;
constexpr double kStrategyNearM1 = 0.95;
constexpr double kZeroNoiseM3 = 1e-3;
constexpr double kNoisyM3 = 0.3;
constexpr double kLatencyMedianSeconds = 1e-3;
constexpr int kLatencyTracks = 10;

constexpr double kW = 1920.0;
constexpr double kDeg = std::numbers::pi / 180.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct RunResult {
  EvalReport report;
  std::string detections_jsonl;
  std::string tracks_jsonl;
  std::vector<double> step_seconds;
};

RunResult run_pipeline(const Scenario& s, PipelineConfig cfg) {
  cfg.cam = s.cam;
  const SyntheticDetector det(s);
  Pipeline p(cfg, det);
  std::vector<GroundTruthFrame> gt;
  std::vector<TracksFrame> tracks;
  std::ostringstream dets, trk;
  RunResult r;
  for (std::int64_t f = 0; f < s.frame_count(); ++f) {
    const Frame fr = make_frame(s, f);
    if (s.annotated(f)) gt.push_back(ground_truth(*fr.world));
    const FrameOutput out = p.process(fr, 1.0 / s.fps);
    write_jsonl_line(dets, detections_frame_to_json(out.detections));
    write_jsonl_line(trk, tracks_frame_to_json(out.tracks));
    tracks.push_back(out.tracks);
    r.step_seconds.push_back(out.tracker_seconds);
  }
  r.report = evaluate(gt, tracks);
  r.detections_jsonl = dets.str();
  r.tracks_jsonl = trk.str();
  return r;
}

Scenario single_walker(Trajectory traj, double duration, double sigma, std::uint64_t seed) {
  Scenario s;
  s.duration = duration;
  s.seed = seed;
  s.noise.joint_sigma = sigma;
  Agent a;
  a.trajectory = std::move(traj);
  s.agents = {a};
  return s;
}

std::array<double, 2> at_column(double column, double range) {
  const double theta = (180.0 - column * 360.0 / kW) * kDeg;
  return {range * std::cos(theta), range * std::sin(theta)};
}

// 1. world -> image -> world on random poses.
Outcome geometry_round_trip() {
  const CameraModel cam;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> range(0.5, 15.0), azimuth(-std::numbers::pi, std::numbers::pi),
      neck(0.8, 2.2);
  std::vector<WorldPoint> poses(kRoundTripPoses);
  for (WorldPoint& p : poses) {
    const double r = range(rng), a = azimuth(rng);
    p = {r * std::cos(a), r * std::sin(a), neck(rng)};
  }
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const WorldPoint& p : poses) {
    const ImagePoint ankle = world_to_image({p.x, p.y, cam.ankle_height}, cam);
    const ImagePoint nk = world_to_image(p, cam);
    const WorldPoint back = localize(ankle, nk, cam);
    const double r = std::hypot(p.x, p.y);
    const double err = std::sqrt(std::pow(back.x - p.x, 2) + std::pow(back.y - p.y, 2) + std::pow(back.z - p.z, 2));
    worst = std::max(worst, err / r);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << kRoundTripPoses << " poses, max relative error " << worst << ", " << secs << " s";
  return {worst < kRoundTripRelTol && secs < kRoundTripSeconds, d.str()};
}

Skeleton torso(double x, double y, double w, double h, double conf) {
  Skeleton sk;
  sk.set(Joint::neck, {wrap_column(x + w / 2, kW), y}, conf);
  sk.set(Joint::left_shoulder, {wrap_column(x, kW), y + h / 4}, conf);
  sk.set(Joint::right_shoulder, {wrap_column(x + w, kW), y + h / 4}, conf);
  sk.set(Joint::left_hip, {wrap_column(x + w / 4, kW), y + h}, conf);
  sk.set(Joint::right_hip, {wrap_column(x + 3 * w / 4, kW), y + h}, conf);
  return sk;
}

// 2. Overlap-zone duplicates fuse; fusion is idempotent.
Outcome fusion() {
  const CameraModel cam;
  const TileLayout layout = build_tiles(cam, 3, kDefaultOverlapPx, {160, 800});
  std::size_t frames = 0, exact = 0;
  // One person walking through each overlap: tiles 0/1 around column 715
  // and the seam pair around column 0.
  for (double column : {715.0, 1355.0, 0.0}) {
    for (double range : {1.5, 2.5, 4.0, 6.0}) {
      const auto c = at_column(column, range);
      const double tangent = (column + 90.0) * 360.0 / kW * kDeg;
      Scenario s = single_walker(
          Polyline{{{c[0] - 0.3 * std::cos(tangent), c[1] - 0.3 * std::sin(tangent)},
                    {c[0] + 0.3 * std::cos(tangent), c[1] + 0.3 * std::sin(tangent)}},
                   {0.3}},
          2.0, 0.0, 3);
      const SyntheticDetector det(s);
      for (std::int64_t f = 0; f < s.frame_count(); ++f) {
        const DetectionResult r = run_tiles(make_frame(s, f), det, layout, kSigma1, cam, {false, {}});
        ++frames;
        exact += r.detections.size() == 1 ? 1 : 0;
      }
    }
  }

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> xs(0, kW), ys(200, 600), size(15, 120), jitter(-3, 3), conf(0.1, 1.0);
  std::uniform_int_distribution<int> count(0, 10);
  std::uniform_int_distribution<std::size_t> src(0, 2);
  int idempotent = 0;
  for (int i = 0; i < kIdempotenceSets; ++i) {
    std::vector<Detection> dets(count(rng));
    const double bx = xs(rng), by = ys(rng), bw = size(rng);
    for (Detection& d : dets) {
      const bool dup = std::bernoulli_distribution(0.5)(rng);
      d.skeleton = dup ? torso(bx + jitter(rng), by + jitter(rng), bw, bw * 1.5, conf(rng))
                       : torso(xs(rng), ys(rng), bw, bw * 1.5, conf(rng));
      d.source = src(rng);
    }
    const auto once = fuse_duplicates(dets, 3, kSigma1, kW);
    const auto twice = fuse_duplicates(once, 3, kSigma1, kW);
    bool same = once.size() == twice.size();
    for (std::size_t k = 0; same && k < once.size(); ++k) {
      same = once[k].skeleton == twice[k].skeleton && once[k].source == twice[k].source;
    }
    idempotent += same ? 1 : 0;
  }
  std::ostringstream d;
  d << exact << "/" << frames << " overlap frames with exactly one detection, " << idempotent << "/"
    << kIdempotenceSets << " sets idempotent";
  return {exact == frames && idempotent == kIdempotenceSets, d.str()};
}

// 3. Seam crossing with and without the wrap-around correction.
Outcome wrap_around() {
  // Walking away behind the camera at 1 m/s, drifting across the seam.
  const Polyline away{{{-1.5, -0.25}, {-7.5, 0.25}}, {1.0}};
  int on_ok = 0, off_ok = 0;
  double worst_on = 1.0, worst_off = 0.0;
  for (int seed = 0; seed < kSeamSeeds; ++seed) {
    const Scenario s = single_walker(away, 6.0, 1.0, seed);
    PipelineConfig cfg;
    const double on = run_pipeline(s, cfg).report.m2;
    cfg.tracker.wrap_correction = false;
    const double off = run_pipeline(s, cfg).report.m2;
    on_ok += on == 1.0 ? 1 : 0;
    off_ok += off <= 0.5 ? 1 : 0;
    worst_on = std::min(worst_on, on);
    worst_off = std::max(worst_off, off);
  }
  std::ostringstream d;
  d << "corrected M2 = 1 on " << on_ok << "/" << kSeamSeeds << " seeds (min " << worst_on
    << "), uncorrected M2 <= 0.5 on " << off_ok << "/" << kSeamSeeds << " (max " << worst_off << ")";
  return {on_ok == kSeamSeeds && off_ok == kSeamSeeds, d.str()};
}

struct Best {
  std::size_t pairs = 0;
  double cost = 0.0;
};

void enumerate(const std::vector<std::vector<double>>& c, double gate, std::size_t row, std::vector<bool>& used,
               std::size_t pairs, double cost, Best& best) {
  if (row == c.size()) {
    if (pairs > best.pairs || (pairs == best.pairs && cost < best.cost)) best = {pairs, cost};
    return;
  }
  enumerate(c, gate, row + 1, used, pairs, cost, best);
  for (std::size_t j = 0; j < c[row].size(); ++j) {
    if (used[j] || !(c[row][j] <= gate)) continue;
    used[j] = true;
    enumerate(c, gate, row + 1, used, pairs + 1, cost + c[row][j], best);
    used[j] = false;
  }
}

// 4. GNN against exhaustive enumeration.
Outcome gnn() {
  const CameraModel cam;
  const double gate = 150.0;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> col(0, kW), seam(-100, 100), rows(300, 500), range(1.0, 8.0);
  std::bernoulli_distribution near_seam(0.6);
  int agree = 0;
  for (int i = 0; i < kAssignmentInstances; ++i) {
    std::vector<Track> tracks(dim(rng));
    for (Track& t : tracks) {
      const double c = near_seam(rng) ? wrap_column(seam(rng), kW) : col(rng);
      const auto p = at_column(c, range(rng));
      t.state = {p[0], p[1], 0.0, 0.0, 1.45};
      t.covariance = StateCovariance::Identity() * 0.01;
    }
    std::vector<Detection> dets(dim(rng));
    for (Detection& d : dets) {
      d.skeleton.set(Joint::neck, {near_seam(rng) ? wrap_column(seam(rng), kW) : col(rng), rows(rng)});
    }
    std::vector<std::vector<double>> cost(tracks.size(), std::vector<double>(dets.size()));
    for (std::size_t r = 0; r < tracks.size(); ++r) {
      const ImagePoint p = *predicted_neck(tracks[r], cam, {});
      for (std::size_t c = 0; c < dets.size(); ++c) {
        const ImagePoint q = dets[c].skeleton[Joint::neck]->pt;
        const double dx = std::abs(p.x - q.x);
        cost[r][c] = std::hypot(std::min(dx, kW - dx), p.y - q.y);
      }
    }
    Best best;
    std::vector<bool> used(dets.size(), false);
    enumerate(cost, gate, 0, used, 0, 0.0, best);
    const Assignment a = associate(tracks, dets, cam, gate);
    if (a.pairs.size() == best.pairs && std::abs(a.total_cost - best.cost) <= 1e-9 * (1.0 + best.cost)) ++agree;
  }
  std::ostringstream d;
  d << agree << "/" << kAssignmentInstances << " instances equal the brute-force optimum";
  return {agree == kAssignmentInstances, d.str()};
}

// Ground-range error from a row shift, evaluated directly.
double sensitivity_oracle(double d, double px) {
  const double h = 1.2, k = 0.1;
  const double row = 480.0 + std::atan((h - k) / d) / kDeg / 0.1875;
  const double phi = (480.0 - (row - px)) * 0.1875 * kDeg;
  return std::abs((h - k) / std::tan(-phi) - d);
}

// 5. Pixel-error sensitivity.
Outcome sensitivity() {
  const CameraModel cam;
  const double at2 = localization_sensitivity(2.0, 5.0, cam);
  const double at7 = localization_sensitivity(7.0, 5.0, cam);
  const bool oracle_ok = std::abs(at2 - sensitivity_oracle(2.0, 5.0)) < 1e-9;
  const bool near_ref = std::abs(at2 - kSensitivityRef) <= kSensitivityTol * kSensitivityRef;
  bool increasing = true;
  double prev = 0.0;
  for (double d = 1.0; d <= 8.0 + 1e-9; d += 0.25) {
    const double e = localization_sensitivity(d, 5.0, cam);
    increasing = increasing && e > prev;
    prev = e;
  }
  std::ostringstream d;
  d << "error(2 m, 5 px) = " << at2 << " m, error(7 m, 5 px) = " << at7 << " m, ratio " << at7 / at2
    << (increasing ? ", strictly increasing" : ", NOT increasing");
  return {oracle_ok && near_ref && increasing && at7 >= kFarNearRatio * at2, d.str()};
}

// 6. Range sweep per strategy.
Outcome range_sweep() {
  // From 1 m to 8.5 m along the 30 degree bearing.
  const double c = std::cos(30 * kDeg), s = std::sin(30 * kDeg);
  const Polyline out{{{c, s}, {8.5 * c, 8.5 * s}}, {1.0}};
  bool ok = true;
  std::ostringstream d;
  for (Strategy st : {Strategy::fullframe, Strategy::tiles, Strategy::roi}) {
    double worst_far = 0.0, worst_near = 1.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Scenario sc = single_walker(out, 7.5, 1.0, seed);
      PipelineConfig cfg;
      cfg.strategy = st;
      const EvalReport r = run_pipeline(sc, cfg).report;
      for (const DistanceBin& b : r.error_vs_distance) {
        const double bin_m1 = 1.0 - b.miss_rate;
        const double lower = b.center - 0.25;
        if (lower >= 4.0) worst_far = std::max(worst_far, bin_m1);
        if (lower < 7.0) worst_near = std::min(worst_near, bin_m1);
      }
    }
    if (st == Strategy::fullframe) {
      ok = ok && worst_far < kFullframeFarM1;
      d << "fullframe max M1 beyond 4 m " << worst_far << "; ";
    } else {
      ok = ok && worst_near >= kStrategyNearM1;
      d << to_string(st) << " min M1 up to 7 m " << worst_near << "; ";
    }
  }
  std::string text = d.str();
  text.resize(text.size() - 2);
  return {ok, text};
}

// 7. End-to-end consistency.
Outcome consistency() {
  const Circle circle{{0, 0}, 2.0, 0.5, 0.0};
  bool ok = true;
  std::ostringstream d;
  for (Strategy st : {Strategy::tiles, Strategy::roi}) {
    Scenario clean = single_walker(circle, 10.0, 0.0, 7);
    PipelineConfig cfg;
    cfg.strategy = st;
    // Detector noise is zero, so the filter is told the measurements are
    // nearly exact.
    cfg.tracker.ukf.measurement_noise = 0.01;
    const EvalReport r = run_pipeline(clean, cfg).report;
    const double m3v = r.m3.value_or(std::numeric_limits<double>::infinity());
    ok = ok && r.m1 == 1.0 && r.m2 == 1.0 && m3v < kZeroNoiseM3;
    d << to_string(st) << " zero noise M1 " << r.m1 << " M2 " << r.m2 << " M3 " << m3v << "; ";
  }
  const Scenario noisy = single_walker(circle, 10.0, 1.0, 7);
  const EvalReport r = run_pipeline(noisy, PipelineConfig{}).report;
  const double m3v = r.m3.value_or(std::numeric_limits<double>::infinity());
  ok = ok && m3v <= kNoisyM3;
  d << "1 px noise M3 " << m3v;
  return {ok, d.str()};
}

// 8. Tracker latency with ten people.
Outcome latency() {
  Scenario s;
  s.duration = 10.0;
  s.seed = 8;
  s.noise.joint_sigma = 1.0;
  for (int i = 0; i < kLatencyTracks; ++i) {
    Agent a;
    a.id = i;
    const double r = 1.5 + 0.35 * i;
    a.trajectory = Circle{{0, 0}, r, (i % 2 ? 0.3 : -0.3) / r * 2, i * 0.63};
    s.agents.push_back(a);
  }
  RunResult res = run_pipeline(s, PipelineConfig{});
  std::size_t max_tracks = 0;
  {
    std::istringstream in(res.tracks_jsonl);
    std::string line;
    while (std::getline(in, line)) {
      const json frame = json::parse(line);
      std::size_t live = 0;
      for (const json& t : frame["tracks"]) live += t["status"] != "lost" ? 1 : 0;
      max_tracks = std::max(max_tracks, live);
    }
  }
  std::vector<double> t = res.step_seconds;
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  const double median = t[t.size() / 2];
  std::ostringstream d;
  d << "median tracker step " << median * 1e3 << " ms over " << res.step_seconds.size() << " frames, up to "
    << max_tracks << " live tracks";
  return {median <= kLatencyMedianSeconds && max_tracks <= static_cast<std::size_t>(kLatencyTracks), d.str()};
}

// 9. Determinism across runs and tile dispatch modes.
Outcome determinism() {
  Scenario s;
  s.duration = 5.0;
  s.seed = 99;
  s.noise = {1.0, 0.05, true};
  for (int i = 0; i < 4; ++i) {
    Agent a;
    a.id = i;
    a.trajectory = Circle{{0.2 * i, -0.1 * i}, 1.8 + i, 0.4 - 0.2 * i, 1.1 * i};
    s.agents.push_back(a);
  }
  auto fingerprint = [&](Strategy st, bool concurrent) {
    PipelineConfig cfg;
    cfg.strategy = st;
    cfg.tiles.concurrent = concurrent;
    const RunResult r = run_pipeline(s, cfg);
    return r.detections_jsonl + r.tracks_jsonl + eval_report_to_json(r.report).dump();
  };
  bool ok = true;
  int compared = 0;
  for (Strategy st : {Strategy::tiles, Strategy::roi, Strategy::fullframe}) {
    const std::string a = fingerprint(st, true);
    const std::string b = fingerprint(st, true);
    const std::string c = fingerprint(st, false);
    ok = ok && a == b && a == c;
    compared += 2;
  }
  std::ostringstream d;
  d << compared << " repeated runs byte-identical across dispatch modes";
  if (!ok) d.str("outputs differ between runs");
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 geometry round-trip", geometry_round_trip},
      {"2 duplicate fusion", fusion},
      {"3 wrap-around tracking", wrap_around},
      {"4 GNN optimality", gnn},
      {"5 pixel-error sensitivity", sensitivity},
      {"6 range sweep by strategy", range_sweep},
      {"7 end-to-end consistency", consistency},
      {"8 tracker latency", latency},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
