#pragma once

// Target-centric tracking metrics: normalized detection time (M1), tracking
// turnover (M2), localization error (M3), and error binned by distance.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "panotrack/geometry.hpp"
#include "panotrack/records.hpp"

namespace panotrack {

inline constexpr double kDefaultMatchRadius = 0.5;

struct FrameMatch {
  std::int64_t frame = 0;
  bool matched = false;
  std::optional<std::uint64_t> track_id;
  WorldPoint gt_pos;
  std::optional<WorldPoint> est_pos;
};

/// A ground-truth frame is matched when a live target-flagged track lies
/// within `match_radius` meters of the annotated target. Every annotated
/// frame must appear in the track stream.
std::vector<FrameMatch> match_frames(std::span<const GroundTruthFrame> gt,
                                     std::span<const TracksFrame> tracks,
                                     double match_radius = kDefaultMatchRadius);

double m1(std::span<const FrameMatch> matches);

/// 1 / number of distinct target ids over matched frames; 0 when nothing matched.
double m2(std::span<const FrameMatch> matches);

std::size_t fragments(std::span<const FrameMatch> matches);

/// Mean planar error over matched frames. Throws UndefinedMetricError when
/// no frame matched.
double m3(std::span<const FrameMatch> matches);

struct DistanceBin {
  double center = 0.0;
  double mean_error = 0.0;  // NaN when the bin has no matched frame
  std::size_t count = 0;    // matched frames
  std::size_t total = 0;    // annotated frames
  double miss_rate = 0.0;
};

/// Bins frames by ground-truth range [k * bin_width, (k + 1) * bin_width).
std::vector<DistanceBin> error_vs_distance(std::span<const FrameMatch> matches, double bin_width);

struct EvalReport {
  double m1 = 0.0;
  double m2 = 0.0;
  std::optional<double> m3;
  std::size_t fragments = 0;
  std::vector<FrameMatch> matches;
  std::vector<DistanceBin> error_vs_distance;
};

EvalReport evaluate(std::span<const GroundTruthFrame> gt, std::span<const TracksFrame> tracks,
                    double match_radius = kDefaultMatchRadius, double bin_width = 0.5);

}  // namespace panotrack
