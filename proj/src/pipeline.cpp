#include "panotrack/pipeline.hpp"

#include <chrono>

#include "panotrack/errors.hpp"

namespace panotrack {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::tiles:
      return "tiles";
    case Strategy::roi:
      return "roi";
    case Strategy::fullframe:
      return "fullframe";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::tiles, Strategy::roi, Strategy::fullframe}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  cam.validate();
  tracker.validate();
  if (!(sigma1 > 0.0 && sigma1 <= 1.0)) throw ConfigError("sigma1 must be in (0, 1]");
  if (!(roi.full_width > 0.0 && roi.full_height > 0.0 && roi.roi_width > 0.0 && roi.roi_height > 0.0)) {
    throw ConfigError("roi sizes must be positive");
  }
  build_tiles(cam, tiles.n_tiles, tiles.overlap, {tiles.row_min, tiles.row_max}, tiles.scale);
}

DetectionResult detect_frame(const PipelineConfig& cfg, const TileLayout& layout,
                             const Frame& frame, const DetectorPort& detector,
                             const std::optional<ImagePoint>& target_prediction) {
  switch (cfg.strategy) {
    case Strategy::tiles:
      return run_tiles(frame, detector, layout, cfg.sigma1, cfg.cam,
                       {.concurrent = cfg.tiles.concurrent, .order = {}});
    case Strategy::roi:
      return run_roi(frame, detector, target_prediction, cfg.cam, cfg.roi, cfg.sigma1);
    case Strategy::fullframe:
      return run_fullframe(frame, detector, cfg.cam, cfg.roi);
  }
  throw ConfigError("unknown strategy");
}

Pipeline::Pipeline(PipelineConfig cfg, const DetectorPort& detector)
    : cfg_(std::move(cfg)),
      detector_(detector),
      layout_(build_tiles(cfg_.cam, cfg_.tiles.n_tiles, cfg_.tiles.overlap,
                          {cfg_.tiles.row_min, cfg_.tiles.row_max}, cfg_.tiles.scale)),
      tracker_(cfg_.cam, cfg_.tracker) {
  cfg_.validate();
}

FrameOutput Pipeline::process(const Frame& frame, double dt) {
  const auto prediction = tracker_.predicted_target_center(dt);
  DetectionResult dets = detect_frame(cfg_, layout_, frame, detector_, prediction);

  const auto start = std::chrono::steady_clock::now();
  const std::vector<TrackReport> reports = tracker_.step(dets.detections, dt);
  const auto stop = std::chrono::steady_clock::now();

  FrameOutput out;
  out.tracker_seconds = std::chrono::duration<double>(stop - start).count();
  out.tracks = make_tracks_frame(frame.index, frame.t, reports);
  out.detections = {frame.index, frame.t, std::move(dets.detections)};
  out.failures = std::move(dets.failures);
  return out;
}

}  // namespace panotrack
