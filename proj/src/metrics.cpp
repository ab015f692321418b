#include "panotrack/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "panotrack/errors.hpp"

namespace panotrack {

TracksFrame make_tracks_frame(std::int64_t frame, double t, const std::vector<TrackReport>& reports) {
  TracksFrame out{frame, t, {}};
  for (const TrackReport& r : reports) {
    out.tracks.push_back({r.track.id, r.position.x, r.position.y, r.position.z, r.neck.x, r.neck.y,
                          r.track.status, r.track.is_target});
  }
  return out;
}

std::vector<FrameMatch> match_frames(std::span<const GroundTruthFrame> gt,
                                     std::span<const TracksFrame> tracks, double match_radius) {
  if (!(match_radius > 0.0)) throw InputError("match radius must be positive");
  std::unordered_map<std::int64_t, const TracksFrame*> by_frame;
  for (const TracksFrame& tf : tracks) by_frame[tf.frame] = &tf;

  std::vector<FrameMatch> out;
  for (const GroundTruthFrame& g : gt) {
    const GroundTruthAgent* target = nullptr;
    for (const GroundTruthAgent& a : g.agents) {
      if (a.is_target) {
        target = &a;
        break;
      }
    }
    if (!target) continue;
    const auto it = by_frame.find(g.frame);
    if (it == by_frame.end()) {
      std::ostringstream msg;
      msg << "frame " << g.frame << " is annotated but missing from the track stream";
      throw InputError(msg.str());
    }

    FrameMatch m;
    m.frame = g.frame;
    m.gt_pos = {target->x, target->y, 0.0};
    for (const TrackRecord& r : it->second->tracks) {
      if (!r.is_target || r.status == TrackStatus::lost) continue;
      m.track_id = r.id;
      m.est_pos = WorldPoint{r.x, r.y, r.h};
      m.matched = std::hypot(r.x - target->x, r.y - target->y) <= match_radius;
      break;
    }
    out.push_back(m);
  }
  return out;
}

double m1(std::span<const FrameMatch> matches) {
  if (matches.empty()) throw UndefinedMetricError("M1 needs at least one annotated frame");
  std::size_t tracked = 0;
  for (const FrameMatch& m : matches) tracked += m.matched ? 1 : 0;
  return static_cast<double>(tracked) / static_cast<double>(matches.size());
}

std::size_t fragments(std::span<const FrameMatch> matches) {
  std::set<std::uint64_t> ids;
  for (const FrameMatch& m : matches) {
    if (m.matched) ids.insert(*m.track_id);
  }
  return ids.size();
}

double m2(std::span<const FrameMatch> matches) {
  if (matches.empty()) throw UndefinedMetricError("M2 needs at least one annotated frame");
  const std::size_t frag = fragments(matches);
  return frag == 0 ? 0.0 : 1.0 / static_cast<double>(frag);
}

double m3(std::span<const FrameMatch> matches) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const FrameMatch& m : matches) {
    if (!m.matched) continue;
    sum += std::hypot(m.est_pos->x - m.gt_pos.x, m.est_pos->y - m.gt_pos.y);
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("M3 is undefined without matched frames");
  return sum / static_cast<double>(n);
}

std::vector<DistanceBin> error_vs_distance(std::span<const FrameMatch> matches, double bin_width) {
  if (!(bin_width > 0.0)) throw InputError("bin width must be positive");
  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t total = 0;
  };
  std::map<std::int64_t, Acc> bins;
  for (const FrameMatch& m : matches) {
    const double range = std::hypot(m.gt_pos.x, m.gt_pos.y);
    Acc& acc = bins[static_cast<std::int64_t>(std::floor(range / bin_width))];
    acc.total += 1;
    if (m.matched) {
      acc.sum += std::hypot(m.est_pos->x - m.gt_pos.x, m.est_pos->y - m.gt_pos.y);
      acc.count += 1;
    }
  }
  std::vector<DistanceBin> out;
  for (const auto& [k, acc] : bins) {
    DistanceBin b;
    b.center = (static_cast<double>(k) + 0.5) * bin_width;
    b.count = acc.count;
    b.total = acc.total;
    b.mean_error = acc.count > 0 ? acc.sum / static_cast<double>(acc.count)
                                 : std::numeric_limits<double>::quiet_NaN();
    b.miss_rate = static_cast<double>(acc.total - acc.count) / static_cast<double>(acc.total);
    out.push_back(b);
  }
  return out;
}

EvalReport evaluate(std::span<const GroundTruthFrame> gt, std::span<const TracksFrame> tracks,
                    double match_radius, double bin_width) {
  EvalReport r;
  r.matches = match_frames(gt, tracks, match_radius);
  r.m1 = m1(r.matches);
  r.m2 = m2(r.matches);
  r.fragments = fragments(r.matches);
  try {
    r.m3 = m3(r.matches);
  } catch (const UndefinedMetricError&) {
    r.m3.reset();
  }
  r.error_vs_distance = error_vs_distance(r.matches, bin_width);
  return r;
}

}  // namespace panotrack
