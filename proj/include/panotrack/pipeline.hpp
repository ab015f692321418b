#pragma once

// Per-frame detection strategy plus tracker.

#include <optional>
#include <string_view>
#include <vector>

#include "panotrack/detect.hpp"
#include "panotrack/records.hpp"
#include "panotrack/tracker.hpp"

namespace panotrack {

enum class Strategy { tiles, roi, fullframe };

const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view name);

struct PipelineConfig {
  CameraModel cam;
  Strategy strategy = Strategy::tiles;
  TilesConfig tiles;
  RoiConfig roi;
  double sigma1 = kDefaultMergeThreshold;
  TrackerConfig tracker;

  void validate() const;
};

struct FrameOutput {
  DetectionsFrame detections;
  TracksFrame tracks;
  std::vector<ViewportFailure> failures;
  double tracker_seconds = 0.0;
};

/// Runs the detection strategy selected in the config for a frame.
DetectionResult detect_frame(const PipelineConfig& cfg, const TileLayout& layout,
                             const Frame& frame, const DetectorPort& detector,
                             const std::optional<ImagePoint>& target_prediction);

class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, const DetectorPort& detector);

  /// `dt` is the time since the previous frame.
  FrameOutput process(const Frame& frame, double dt);

  const Tracker& tracker() const { return tracker_; }
  const TileLayout& layout() const { return layout_; }

 private:
  PipelineConfig cfg_;
  const DetectorPort& detector_;
  TileLayout layout_;
  Tracker tracker_;
};

}  // namespace panotrack
