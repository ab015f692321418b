#include <cmath>

#include "doctest.h"
#include "panotrack/errors.hpp"
#include "panotrack/metrics.hpp"

using namespace panotrack;
using doctest::Approx;

namespace {

GroundTruthFrame gt_frame(std::int64_t f, double x, double y) {
  GroundTruthFrame g{f, f / 30.0, {}};
  g.agents.push_back({0, x, y, {}, true});
  g.agents.push_back({1, -x, -y, {}, false});
  return g;
}

TracksFrame tracks_frame(std::int64_t f, std::vector<TrackRecord> recs) { return {f, f / 30.0, std::move(recs)}; }

TrackRecord target(std::uint64_t id, double x, double y) {
  TrackRecord r;
  r.id = id;
  r.x = x;
  r.y = y;
  r.status = TrackStatus::confirmed;
  r.is_target = true;
  return r;
}

FrameMatch hit(std::int64_t f, std::uint64_t id, double err = 0.0, double range = 2.0) {
  return {f, true, id, {range, 0, 0}, WorldPoint{range + err, 0, 0}};
}

FrameMatch miss(std::int64_t f, double range = 2.0) { return {f, false, std::nullopt, {range, 0, 0}, std::nullopt}; }

}  // namespace

TEST_CASE("match_frames") {
  std::vector<GroundTruthFrame> gt;
  std::vector<TracksFrame> perfect, none, off;
  for (int f = 0; f < 10; ++f) {
    gt.push_back(gt_frame(f, 2.0, 0.1 * f));
    perfect.push_back(tracks_frame(f, {target(1, 2.0, 0.1 * f)}));
    none.push_back(tracks_frame(f, {}));
    off.push_back(tracks_frame(f, {target(1, 2.6, 0.1 * f)}));
  }
  auto m = match_frames(gt, perfect);
  CHECK(m.size() == 10);
  for (const auto& x : m) CHECK(x.matched);
  for (const auto& x : match_frames(gt, none)) CHECK_FALSE(x.matched);
  for (const auto& x : match_frames(gt, off, 0.5)) CHECK_FALSE(x.matched);
  for (const auto& x : match_frames(gt, off, 0.7)) CHECK(x.matched);

  // the non-target track sitting on the target does not count
  std::vector<TracksFrame> wrong{tracks_frame(0, {TrackRecord{5, 2.0, 0.0, 1.5, 0, 0, TrackStatus::confirmed, false}})};
  CHECK_FALSE(match_frames(std::span(gt).first(1), wrong)[0].matched);

  // lost tracks do not count either
  TrackRecord lost = target(1, 2.0, 0.0);
  lost.status = TrackStatus::lost;
  std::vector<TracksFrame> gone{tracks_frame(0, {lost})};
  CHECK_FALSE(match_frames(std::span(gt).first(1), gone)[0].matched);

  std::vector<TracksFrame> short_stream(perfect.begin(), perfect.begin() + 5);
  CHECK_THROWS_AS(match_frames(gt, short_stream), InputError);
  CHECK_THROWS_AS(match_frames(gt, perfect, 0.0), InputError);
}

TEST_CASE("M1") {
  std::vector<FrameMatch> all{hit(0, 1), hit(1, 1), hit(2, 1)};
  CHECK(m1(all) == 1.0);
  std::vector<FrameMatch> half;
  for (int f = 0; f < 10; ++f) half.push_back(f < 5 ? hit(f, 1) : miss(f));
  CHECK(m1(half) == Approx(0.5));
  std::vector<FrameMatch> nothing{miss(0), miss(1)};
  CHECK(m1(nothing) == 0.0);
  CHECK_THROWS_AS(m1(std::vector<FrameMatch>{}), UndefinedMetricError);
}

TEST_CASE("M2") {
  CHECK(m2(std::vector<FrameMatch>{hit(0, 4), hit(1, 4), miss(2), hit(3, 4)}) == 1.0);
  CHECK(m2(std::vector<FrameMatch>{hit(0, 4), hit(1, 9)}) == Approx(0.5));
  CHECK(m2(std::vector<FrameMatch>{hit(0, 4), hit(1, 9), hit(2, 11), hit(3, 4)}) == Approx(1.0 / 3.0));
  CHECK(fragments(std::vector<FrameMatch>{hit(0, 4), hit(1, 9), hit(2, 11)}) == 3);
  CHECK(m2(std::vector<FrameMatch>{miss(0)}) == 0.0);
}

TEST_CASE("M3") {
  CHECK(m3(std::vector<FrameMatch>{hit(0, 1), hit(1, 1)}) == 0.0);
  CHECK(m3(std::vector<FrameMatch>{hit(0, 1, 0.3), hit(1, 1, -0.3)}) == Approx(0.3));
  CHECK(m3(std::vector<FrameMatch>{hit(0, 1, 0.1), hit(1, 1, 0.3), miss(2)}) == Approx(0.2));
  CHECK_THROWS_AS(m3(std::vector<FrameMatch>{miss(0)}), UndefinedMetricError);
}

TEST_CASE("error_vs_distance") {
  std::vector<FrameMatch> at2{hit(0, 1, 0.1, 2.1), hit(1, 1, 0.3, 2.2)};
  auto bins = error_vs_distance(at2, 0.5);
  REQUIRE(bins.size() == 1);
  CHECK(bins[0].center == Approx(2.25));
  CHECK(bins[0].mean_error == Approx(0.2));
  CHECK(bins[0].miss_rate == 0.0);

  std::vector<FrameMatch> mixed{hit(0, 1, 0.1, 1.2), miss(1, 1.3), miss(2, 5.1), miss(3, 5.2)};
  bins = error_vs_distance(mixed, 1.0);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].center == Approx(1.5));
  CHECK(bins[0].count == 1);
  CHECK(bins[0].total == 2);
  CHECK(bins[0].miss_rate == Approx(0.5));
  CHECK(bins[1].center == Approx(5.5));
  CHECK(std::isnan(bins[1].mean_error));
  CHECK(bins[1].miss_rate == 1.0);
  CHECK_THROWS_AS(error_vs_distance(mixed, 0.0), InputError);
}

TEST_CASE("evaluate leaves M3 empty when nothing matched") {
  std::vector<GroundTruthFrame> gt{gt_frame(0, 2, 0), gt_frame(1, 2, 0)};
  std::vector<TracksFrame> tr{tracks_frame(0, {}), tracks_frame(1, {})};
  const EvalReport r = evaluate(gt, tr);
  CHECK(r.m1 == 0.0);
  CHECK(r.m2 == 0.0);
  CHECK_FALSE(r.m3.has_value());
  CHECK(r.fragments == 0);
}

TEST_CASE("make_tracks_frame copies the reports") {
  TrackReport rep;
  rep.track.id = 7;
  rep.track.status = TrackStatus::confirmed;
  rep.track.is_target = true;
  rep.position = {1.0, 2.0, 1.5};
  rep.neck = {100, 200};
  const TracksFrame f = make_tracks_frame(3, 0.1, {rep});
  REQUIRE(f.tracks.size() == 1);
  CHECK(f.frame == 3);
  CHECK(f.tracks[0].id == 7);
  CHECK(f.tracks[0].x == 1.0);
  CHECK(f.tracks[0].h == 1.5);
  CHECK(f.tracks[0].img_y == 200.0);
  CHECK(f.tracks[0].is_target);
}
