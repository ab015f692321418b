#pragma once

// Per-frame records exchanged through the JSONL files.

#include <cstdint>
#include <vector>

#include "panotrack/detect.hpp"
#include "panotrack/tracker.hpp"

namespace panotrack {

struct DetectionsFrame {
  std::int64_t frame = 0;
  double t = 0.0;
  std::vector<Detection> detections;
};

struct GroundTruthAgent {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  Skeleton joints;
  bool is_target = false;
};

struct GroundTruthFrame {
  std::int64_t frame = 0;
  double t = 0.0;
  std::vector<GroundTruthAgent> agents;
};

struct TrackRecord {
  std::uint64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
  double img_x = 0.0;
  double img_y = 0.0;
  TrackStatus status = TrackStatus::tentative;
  bool is_target = false;
};

struct TracksFrame {
  std::int64_t frame = 0;
  double t = 0.0;
  std::vector<TrackRecord> tracks;
};

TracksFrame make_tracks_frame(std::int64_t frame, double t, const std::vector<TrackReport>& reports);

}  // namespace panotrack
