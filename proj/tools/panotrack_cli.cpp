// panotrack command-line tool: simulate scenes, run detection + tracking,
// evaluate target metrics, and tabulate localization sensitivity.
//
// Exit codes: 0 success, 2 input error, 3 runtime / filter divergence.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "panotrack/errors.hpp"
#include "panotrack/io.hpp"
#include "panotrack/metrics.hpp"
#include "panotrack/pipeline.hpp"
#include "panotrack/sim.hpp"

namespace fs = std::filesystem;
using namespace panotrack;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Fixed 1 us buckets up to 20 ms so memory does not grow with the stream.
class LatencyHistogram {
 public:
  void add(double seconds) {
    const auto us = static_cast<std::size_t>(seconds * 1e6);
    buckets_[std::min(us, buckets_.size() - 1)] += 1;
    ++count_;
  }

  double percentile_ms(double p) const {
    if (count_ == 0) return 0.0;
    const auto rank = static_cast<std::uint64_t>(p * static_cast<double>(count_ - 1)) + 1;
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
      seen += buckets_[i];
      if (seen >= rank) return static_cast<double>(i + 1) / 1000.0;
    }
    return static_cast<double>(buckets_.size()) / 1000.0;
  }

  std::uint64_t count() const { return count_; }

 private:
  std::array<std::uint64_t, 20000> buckets_{};
  std::uint64_t count_ = 0;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError(path.string() + ": cannot open for writing");
  return os;
}

RunConfig load_run_config(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config.empty()) {
    const fs::path path(flags.config);
    cfg = run_config_from_json(load_json_file(path), path.parent_path());
  } else {
    cfg.pipeline.tiles = default_tiles_config(cfg.pipeline.cam);
  }
  if (!flags.strategy.empty()) {
    const auto s = strategy_from_string(flags.strategy);
    if (!s) throw InputError("--strategy: expected tiles, roi or fullframe");
    cfg.pipeline.strategy = *s;
  }
  if (flags.seed) cfg.seed = flags.seed;
  if (!flags.out.empty()) cfg.out_dir = fs::path(flags.out);
  return cfg;
}

Scenario scenario_for_run(const RunConfig& cfg) {
  Scenario s = load_scenario(*cfg.scenario_path);
  if (cfg.seed) s.seed = *cfg.seed;
  return s;
}

void report_failures(const FrameOutput& out) {
  for (const ViewportFailure& f : out.failures) {
    std::cerr << "warning: frame " << out.detections.frame << ": viewport " << f.viewport
              << " failed: " << f.message << "\n";
  }
}

int cmd_simulate(const CommonFlags& flags, const std::string& scenario_arg) {
  RunConfig cfg = load_run_config(flags);
  if (!scenario_arg.empty()) cfg.scenario_path = fs::path(scenario_arg);
  if (!cfg.scenario_path) throw InputError("simulate: a scenario file is required");
  if (!cfg.out_dir) throw InputError("simulate: --out is required");

  const Scenario scenario = scenario_for_run(cfg);
  cfg.pipeline.cam = scenario.cam;
  fs::create_directories(*cfg.out_dir);

  {
    std::ofstream snap = open_output(*cfg.out_dir / "scenario.json");
    snap << scenario_to_json(scenario).dump(2) << '\n';
  }
  std::ofstream gt = open_output(*cfg.out_dir / "ground_truth.jsonl");
  std::ofstream dets = open_output(*cfg.out_dir / "detections.jsonl");

  SyntheticDetector detector(scenario);
  Pipeline pipeline(cfg.pipeline, detector);
  const double dt = 1.0 / scenario.fps;
  const std::int64_t n = scenario.frame_count();
  for (std::int64_t f = 0; f < n; ++f) {
    const Frame frame = make_frame(scenario, f);
    if (scenario.annotated(f)) write_jsonl_line(gt, ground_truth_to_json(ground_truth(*frame.world)));
    const FrameOutput out = pipeline.process(frame, dt);
    report_failures(out);
    write_jsonl_line(dets, detections_frame_to_json(out.detections));
  }
  std::cerr << "simulate: " << n << " frames written to " << cfg.out_dir->string() << "\n";
  return 0;
}

int cmd_track(const CommonFlags& flags, const std::string& scenario_arg, const std::string& detections_arg) {
  RunConfig cfg = load_run_config(flags);
  if (!scenario_arg.empty()) cfg.scenario_path = fs::path(scenario_arg);
  if (!detections_arg.empty()) cfg.detections_path = fs::path(detections_arg);
  if (cfg.scenario_path.has_value() == cfg.detections_path.has_value()) {
    throw InputError("track: give exactly one of --scenario or --detections");
  }
  if (!cfg.out_dir) throw InputError("track: --out is required");
  fs::create_directories(*cfg.out_dir);

  LatencyHistogram latency;
  std::ofstream tracks = open_output(*cfg.out_dir / "tracks.jsonl");

  if (cfg.scenario_path) {
    const Scenario scenario = scenario_for_run(cfg);
    cfg.pipeline.cam = scenario.cam;
    {
      std::ofstream used = open_output(*cfg.out_dir / "config.json");
      used << run_config_to_json(cfg).dump(2) << '\n';
    }
    std::ofstream gt = open_output(*cfg.out_dir / "ground_truth.jsonl");
    std::ofstream dets = open_output(*cfg.out_dir / "detections.jsonl");
    SyntheticDetector detector(scenario);
    Pipeline pipeline(cfg.pipeline, detector);
    const double dt = 1.0 / scenario.fps;
    for (std::int64_t f = 0; f < scenario.frame_count(); ++f) {
      const Frame frame = make_frame(scenario, f);
      if (scenario.annotated(f)) write_jsonl_line(gt, ground_truth_to_json(ground_truth(*frame.world)));
      const FrameOutput out = pipeline.process(frame, dt);
      report_failures(out);
      latency.add(out.tracker_seconds);
      write_jsonl_line(dets, detections_frame_to_json(out.detections));
      write_jsonl_line(tracks, tracks_frame_to_json(out.tracks));
    }
  } else {
    {
      std::ofstream used = open_output(*cfg.out_dir / "config.json");
      used << run_config_to_json(cfg).dump(2) << '\n';
    }
    Tracker tracker(cfg.pipeline.cam, cfg.pipeline.tracker);
    std::optional<double> last_t;
    for_each_jsonl(*cfg.detections_path, [&](const json& j, const std::string& where) {
      const DetectionsFrame frame = detections_frame_from_json(j, where);
      double dt = 1.0 / cfg.fps;
      if (last_t && frame.t > *last_t) dt = frame.t - *last_t;
      last_t = frame.t;
      const auto start = std::chrono::steady_clock::now();
      const auto reports = tracker.step(frame.detections, dt);
      latency.add(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      write_jsonl_line(tracks, tracks_frame_to_json(make_tracks_frame(frame.frame, frame.t, reports)));
    });
  }

  std::fprintf(stderr, "track: %llu frames, tracker latency p50 %.3f ms, p90 %.3f ms, p99 %.3f ms\n",
               static_cast<unsigned long long>(latency.count()), latency.percentile_ms(0.5),
               latency.percentile_ms(0.9), latency.percentile_ms(0.99));
  return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& gt_path, const std::string& tracks_path,
             double match_radius, double bin_width) {
  if (flags.out.empty()) throw InputError("eval: --out is required");
  const fs::path out_dir(flags.out);
  const auto gt = load_ground_truth(gt_path);
  const auto tracks = load_tracks(tracks_path);
  const EvalReport report = evaluate(gt, tracks, match_radius, bin_width);

  fs::create_directories(out_dir);
  {
    std::ofstream os = open_output(out_dir / "report.json");
    os << eval_report_to_json(report).dump(2) << '\n';
  }
  {
    std::ofstream os = open_output(out_dir / "error_vs_distance.csv");
    write_error_curve_csv(os, report.error_vs_distance);
  }
  std::printf("M1 %.4f  M2 %.4f  M3 %s  fragments %zu  frames %zu\n", report.m1, report.m2,
              report.m3 ? std::to_string(*report.m3).c_str() : "undefined", report.fragments,
              report.matches.size());
  return 0;
}

int cmd_sensitivity(const CommonFlags& flags, const std::vector<double>& distances,
                    const std::vector<double>& pixel_errors) {
  CameraModel cam;
  if (!flags.config.empty()) {
    const json j = load_json_file(flags.config);
    if (j.contains("camera")) {
      cam = camera_from_json(j["camera"]);
    } else {
      cam = camera_from_json(j);
    }
  }
  if (flags.out.empty()) {
    write_sensitivity_csv(std::cout, cam, distances, pixel_errors);
    return 0;
  }
  fs::path out(flags.out);
  if (fs::is_directory(out) || out.extension().empty()) {
    fs::create_directories(out);
    out /= "sensitivity.csv";
  }
  std::ofstream os = open_output(out);
  write_sensitivity_csv(os, cam, distances, pixel_errors);
  return 0;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_strategy) {
  cmd->add_option("--config", flags.config, "JSON run configuration");
  if (with_strategy) {
    cmd->add_option("--strategy", flags.strategy, "Detection strategy: tiles, roi or fullframe");
    cmd->add_option("--seed", flags.seed, "Override the scenario seed");
  }
  cmd->add_option("--out", flags.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Panoramic people detection and tracking toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string scenario_arg;
  std::string detections_arg;
  std::string gt_path;
  std::string tracks_path;
  double match_radius = kDefaultMatchRadius;
  double bin_width = 0.5;
  std::vector<double> distances{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> pixel_errors{0, 1, 2, 5, 10};

  auto* simulate = app.add_subcommand("simulate", "Generate ground truth and detections from a scenario");
  add_common(simulate, flags, true);
  simulate->add_option("scenario", scenario_arg, "Scenario JSON file");

  auto* track = app.add_subcommand("track", "Run a detection strategy and the tracker");
  add_common(track, flags, true);
  track->add_option("--scenario", scenario_arg, "Scenario JSON file");
  track->add_option("--detections", detections_arg, "Detections JSONL file");

  auto* eval = app.add_subcommand("eval", "Compute M1/M2/M3 and error-vs-distance curves");
  add_common(eval, flags, false);
  eval->add_option("--gt", gt_path, "Ground-truth JSONL")->required();
  eval->add_option("--tracks", tracks_path, "Tracks JSONL")->required();
  eval->add_option("--match-radius", match_radius, "Tracked-frame radius in meters");
  eval->add_option("--bin-width", bin_width, "Distance bin width in meters");

  auto* sens = app.add_subcommand("sensitivity", "Localization error vs distance for pixel errors");
  add_common(sens, flags, false);
  sens->add_option("--distances", distances, "Distances in meters")->delimiter(',');
  sens->add_option("--pixel-errors", pixel_errors, "Pixel errors")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*simulate) return cmd_simulate(flags, scenario_arg);
    if (*track) return cmd_track(flags, scenario_arg, detections_arg);
    if (*eval) return cmd_eval(flags, gt_path, tracks_path, match_radius, bin_width);
    if (*sens) return cmd_sensitivity(flags, distances, pixel_errors);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
