#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "panotrack/errors.hpp"
#include "panotrack/io.hpp"

using namespace panotrack;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "panotrack_test_io";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Scenario sample_scenario() {
  Scenario s;
  s.fps = 15;
  s.duration = 4;
  s.seed = 1234567890123ULL;
  s.annotation_stride = 3;
  s.noise = {1.25, 0.05, true};
  s.detect_cfg.min_person_pixels = 40;
  Agent a;
  a.id = 0;
  a.trajectory = Circle{{0.5, -0.5}, 2.0, -0.4, 1.0};
  a.body.height = 1.82;
  Agent b;
  b.id = 3;
  b.trajectory = Polyline{{{1, 1}, {4, 1}, {4, -2}}, {0.8, 1.3}};
  s.agents = {a, b};
  s.camera_trajectory = Polyline{{{0, 0}, {1, 0}}, {0.2}};
  return s;
}

}  // namespace

TEST_CASE("scenario round-trips through JSON") {
  const Scenario s = sample_scenario();
  const json j = scenario_to_json(s);
  const Scenario back = scenario_from_json(j);
  CHECK(scenario_to_json(back) == j);
  CHECK(back.seed == s.seed);
  CHECK(back.agents.size() == 2);
  CHECK(std::get<Polyline>(back.agents[1].trajectory).speeds[1] == 1.3);
  CHECK(back.camera_trajectory.has_value());
  CHECK(back.noise.occlusion_enabled);
}

TEST_CASE("scenario parsing reports bad input") {
  json j = scenario_to_json(sample_scenario());
  j["agents"][0]["trajectory"]["type"] = "spiral";
  CHECK_THROWS_AS(scenario_from_json(j), InputError);

  j = scenario_to_json(sample_scenario());
  j["fps"] = -1;
  CHECK_THROWS_AS(scenario_from_json(j), ConfigError);

  j = scenario_to_json(sample_scenario());
  j["colour"] = "blue";
  CHECK_THROWS_AS(scenario_from_json(j), InputError);

  j = scenario_to_json(sample_scenario());
  j["agents"][0]["body"]["height"] = "tall";
  CHECK_THROWS_AS(scenario_from_json(j), InputError);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_json("{\n  \"a\": 1,\n  oops\n}", "cfg.json");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).rfind("cfg.json:3:", 0) == 0);
  }
  CHECK_THROWS_AS(load_json_file("/nonexistent/panotrack.json"), InputError);
}

TEST_CASE("detections frames round-trip") {
  DetectionsFrame f{12, 0.4, {}};
  Detection d;
  d.skeleton.set(Joint::neck, {1919.5, 400.25}, 0.75);
  d.skeleton.set(Joint::left_ankle, {3.0, 700.0}, 0.5);
  d.source = 2;
  d.scale = 1.0 / 3.0;
  f.detections = {d};
  const json j = detections_frame_to_json(f);
  CHECK(j["detections"][0]["joints"]["neck"][0] == 1919.5);
  const DetectionsFrame back = detections_frame_from_json(j, "x");
  REQUIRE(back.detections.size() == 1);
  CHECK(back.detections[0].skeleton == d.skeleton);
  CHECK(back.detections[0].source == 2);
  CHECK(back.detections[0].scale == Approx(1.0 / 3.0));

  json bad = j;
  bad["detections"][0]["joints"]["elbow"] = {1, 2, 0.5};
  CHECK_THROWS_AS(detections_frame_from_json(bad, "x"), InputError);
  bad = j;
  bad["detections"][0]["joints"]["neck"] = {1, 2, 1.5};
  CHECK_THROWS_AS(detections_frame_from_json(bad, "x"), InputError);
}

TEST_CASE("ground truth and tracks round-trip") {
  GroundTruthFrame g{3, 0.1, {}};
  GroundTruthAgent a{0, 1.5, -2.0, {}, true};
  a.joints.set(Joint::neck, {10, 20});
  g.agents = {a};
  const GroundTruthFrame gb = ground_truth_from_json(ground_truth_to_json(g), "g");
  REQUIRE(gb.agents.size() == 1);
  CHECK(gb.agents[0].is_target);
  CHECK(gb.agents[0].y == -2.0);
  CHECK(gb.agents[0].joints == a.joints);

  TracksFrame t{3, 0.1, {{9, 1.0, 2.0, 1.45, 100.0, 200.0, TrackStatus::lost, false}}};
  const TracksFrame tb = tracks_frame_from_json(tracks_frame_to_json(t), "t");
  REQUIRE(tb.tracks.size() == 1);
  CHECK(tb.tracks[0].id == 9);
  CHECK(tb.tracks[0].status == TrackStatus::lost);
  CHECK(tb.tracks[0].h == 1.45);
}

TEST_CASE("jsonl reading skips blank lines and locates errors") {
  std::ostringstream os;
  write_jsonl_line(os, tracks_frame_to_json({0, 0.0, {}}));
  os << "\n";
  write_jsonl_line(os, tracks_frame_to_json({1, 0.1, {}}));
  const fs::path ok = temp_file("ok.jsonl", os.str());
  CHECK(load_tracks(ok).size() == 2);

  const fs::path broken = temp_file("broken.jsonl", os.str() + "{\"frame\": 2, \"t\": 0.2, \"tracks\": [}\n");
  try {
    load_tracks(broken);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("broken.jsonl:4") != std::string::npos);
  }
  CHECK_THROWS_AS(load_tracks("/nonexistent/tracks.jsonl"), InputError);
}

TEST_CASE("csv writers") {
  std::ostringstream os;
  write_sensitivity_csv(os, {}, {2.0, 7.0}, {0.0, 5.0});
  std::istringstream in(os.str());
  std::string header, zero, five;
  std::getline(in, header);
  std::getline(in, zero);
  std::getline(in, five);
  CHECK(header == "pixel_error_px,d_2m,d_7m");
  CHECK(zero == "0,0,0");
  CHECK(five.rfind("5,0.0798", 0) == 0);

  std::ostringstream curve;
  write_error_curve_csv(curve, {{2.25, 0.125, 4, 5, 0.2}, {7.75, std::nan(""), 0, 3, 1.0}});
  CHECK(curve.str() == "bin_center_m,mean_error_m,count,miss_rate\n2.25,0.125,4,0.2\n7.75,nan,0,1\n");
}

TEST_CASE("run config") {
  RunConfig cfg;
  cfg.pipeline.strategy = Strategy::roi;
  cfg.pipeline.tracker.gate_px = 120;
  cfg.scenario_path = "scenes/a.json";
  cfg.seed = 5;
  const json j = run_config_to_json(cfg);
  const RunConfig back = run_config_from_json(j);
  CHECK(back.pipeline.strategy == Strategy::roi);
  CHECK(back.pipeline.tracker.gate_px == 120);
  CHECK(back.seed == 5u);
  CHECK(run_config_to_json(back) == j);

  const RunConfig rel = run_config_from_json(json{{"scenario", "s.json"}}, "/base");
  CHECK(*rel.scenario_path == fs::path("/base/s.json"));

  CHECK_THROWS_AS(run_config_from_json(json{{"stratgey", "tiles"}}), InputError);
  CHECK_THROWS_AS(run_config_from_json(json{{"strategy", "mosaic"}}), InputError);
  CHECK_THROWS_AS(run_config_from_json(json{{"sigma1", 1.5}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"tracker", {{"gate_px", -3}}}}), ConfigError);
}

TEST_CASE("eval report json") {
  EvalReport r;
  r.m1 = 0.5;
  r.m2 = 1.0;
  r.fragments = 1;
  r.matches = {{0, true, 4, {2, 0, 0}, WorldPoint{2.1, 0, 1.4}}, {1, false, std::nullopt, {2, 0, 0}, std::nullopt}};
  r.m3 = 0.1;
  r.error_vs_distance = error_vs_distance(r.matches, 0.5);
  const json j = eval_report_to_json(r);
  CHECK(j["m1"] == 0.5);
  CHECK(j["m3"] == 0.1);
  CHECK(j["per_frame"].size() == 2);
  r.m3.reset();
  CHECK(eval_report_to_json(r)["m3"].is_null());
}
