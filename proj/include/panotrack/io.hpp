#pragma once

// JSON / JSONL / CSV encodings of cameras, scenarios, run configs and the
// per-frame record streams. Field names follow the documented schemas.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "panotrack/metrics.hpp"
#include "panotrack/pipeline.hpp"
#include "panotrack/records.hpp"
#include "panotrack/sim.hpp"

namespace panotrack {

using nlohmann::json;

/// Parses JSON text; syntax errors become InputError with "name:line:col".
json parse_json(std::string_view text, const std::string& source_name);
json load_json_file(const std::filesystem::path& path);

json camera_to_json(const CameraModel& cam);
CameraModel camera_from_json(const json& j, const std::string& where = "camera");

json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);
Scenario load_scenario(const std::filesystem::path& path);

json detections_frame_to_json(const DetectionsFrame& f);
DetectionsFrame detections_frame_from_json(const json& j, const std::string& where);

json ground_truth_to_json(const GroundTruthFrame& g);
GroundTruthFrame ground_truth_from_json(const json& j, const std::string& where);

json tracks_frame_to_json(const TracksFrame& f);
TracksFrame tracks_frame_from_json(const json& j, const std::string& where);

json eval_report_to_json(const EvalReport& r);
void write_error_curve_csv(std::ostream& os, const std::vector<DistanceBin>& bins);

/// One row per pixel error, one column per distance.
void write_sensitivity_csv(std::ostream& os, const CameraModel& cam,
                           const std::vector<double>& distances,
                           const std::vector<double>& pixel_errors);

/// Serializes `j` on one line, newline-terminated.
void write_jsonl_line(std::ostream& os, const json& j);

/// Calls `fn` for each non-blank line; errors carry "path:line".
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, const std::string& where)>& fn);

std::vector<GroundTruthFrame> load_ground_truth(const std::filesystem::path& path);
std::vector<TracksFrame> load_tracks(const std::filesystem::path& path);
std::vector<DetectionsFrame> load_detections(const std::filesystem::path& path);

/// Run configuration for the command line: pipeline settings plus exactly one
/// input source.
struct RunConfig {
  PipelineConfig pipeline;
  std::optional<std::filesystem::path> scenario_path;
  std::optional<std::filesystem::path> detections_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  double fps = 30.0;  // frame rate assumed for detection files without timestamps
};

/// Missing keys keep their defaults; relative paths resolve against `base_dir`.
RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir = {});
json run_config_to_json(const RunConfig& cfg);

}  // namespace panotrack
