#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/segmenter.hpp"
#include "gaitpipe/simulator.hpp"
#include "oracles.hpp"

using namespace gaitpipe;

namespace {

std::vector<Eigen::Vector2d> pts(std::initializer_list<std::pair<double, double>> xy) {
  std::vector<Eigen::Vector2d> out;
  for (auto [x, y] : xy) out.emplace_back(x, y);
  return out;
}

Track track_through(const std::vector<Eigen::Vector2d>& corners, double spacing, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  Track t;
  t.id = 1;
  double time = 0.0;
  for (std::size_t c = 0; c + 1 < corners.size(); ++c) {
    const Eigen::Vector2d a = corners[c], b = corners[c + 1];
    const int n = std::max(1, static_cast<int>(std::round((b - a).norm() / spacing)));
    for (int i = (c == 0 ? 0 : 1); i <= n; ++i) {
      const Eigen::Vector2d p = a + (b - a) * (static_cast<double>(i) / n);
      t.states.push_back({time, p.x() + g(rng), p.y() + g(rng), {}});
      time += 0.1;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("rdp examples") {
  CHECK(rdp_decimate(pts({{0, 0}, {0, 1}, {0, 2}}), 0.5) == std::vector<std::size_t>{0, 2});
  CHECK(rdp_decimate(pts({{0, 0}, {0, 2}, {2, 2}}), 0.5) == std::vector<std::size_t>{0, 1, 2});
  CHECK(rdp_decimate(pts({{0, 0}, {1, 1}}), 0.5) == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(rdp_decimate(pts({{0, 0}}), 0.5), DegenerateInputError);
  CHECK_THROWS_AS(rdp_decimate(pts({{0, 0}, {1, 0}}), 0.0), DegenerateInputError);
}

TEST_CASE("rdp: every dropped vertex is within epsilon of its enclosing segment") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> step(0.0, 0.3);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<Eigen::Vector2d> poly{{0.0, 3.0}};
    const std::size_t n = 2 + rng() % 150;
    while (poly.size() < n) poly.push_back(poly.back() + Eigen::Vector2d(step(rng), step(rng)));
    const double eps = 0.05 + 0.1 * static_cast<double>(rng() % 8);
    const auto kept = rdp_decimate(poly, eps);
    REQUIRE(kept.front() == 0);
    REQUIRE(kept.back() == n - 1);
    for (std::size_t s = 0; s + 1 < kept.size(); ++s) {
      CHECK(kept[s] < kept[s + 1]);
      for (std::size_t i = kept[s] + 1; i < kept[s + 1]; ++i)
        CHECK(oracle::point_segment_distance(poly[i], poly[kept[s]], poly[kept[s + 1]]) <= eps);
    }
  }
}

TEST_CASE("straight track is one segment") {
  const Track t = track_through(pts({{0.0, 6.0}, {0.0, 2.0}}), 0.1, 0.0, 1);
  const auto segs = split_track(t, SegmenterConfig{});
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].states.size() == t.states.size());
  CHECK(segs[0].valid);
}

TEST_CASE("three interior corners give four segments") {
  // zig-zag through a room like the decimation figure
  const auto corners = pts({{-2.0, 6.0}, {1.0, 6.0}, {1.0, 3.0}, {-1.5, 2.0}, {-1.5, 0.8}});
  const Track t = track_through(corners, 0.1, 0.03, 3);
  const auto segs = split_track(t, SegmenterConfig{});
  REQUIRE(segs.size() == 4);
  for (std::size_t s = 0; s + 1 < segs.size(); ++s) {
    CHECK(segs[s].states.back().t == segs[s + 1].states.front().t);  // shared boundary state
    CHECK(segs[s].seg_index == s);
  }
  CHECK(segs.front().states.front().t == t.states.front().t);
  CHECK(segs.back().states.back().t == t.states.back().t);
}

TEST_CASE("geometry examples") {
  auto g = segment_geometry(0.0, 2.0, 0.0, 5.0);
  CHECK(g.r_start == 2.0);
  CHECK(g.r_end == 5.0);
  CHECK(g.d == 3.0);
  REQUIRE(g.theta_deg);
  CHECK(*g.theta_deg == 0.0);

  g = segment_geometry(0.0, 2.0, 3.0, 2.0);
  CHECK(g.d == 3.0);
  CHECK(g.r_end == doctest::Approx(std::sqrt(13.0)));
  const double hand = std::acos((13.0 + 9.0 - 4.0) / (2.0 * 3.0 * std::sqrt(13.0))) * 180.0 / std::numbers::pi;
  CHECK(*g.theta_deg == doctest::Approx(hand).epsilon(1e-12));
  CHECK(*g.theta_deg == doctest::Approx(33.690067525979785).epsilon(1e-12));
  CHECK(std::abs(*g.theta_deg - oracle::radial_angle_deg(0.0, 2.0, 3.0, 2.0)) < 1e-9);

  g = segment_geometry(1.0, 1.0, 1.0, 1.0);
  CHECK(g.d == 0.0);
  CHECK(!g.theta_deg);
  CHECK(!classify(g, 2.0, 15.0));
}

TEST_CASE("theta agrees with the vector-angle oracle and is rotation invariant") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(-5.0, 5.0), uy(0.5, 8.0), ua(-std::numbers::pi, std::numbers::pi);
  for (int rep = 0; rep < 2000; ++rep) {
    const double x0 = ux(rng), y0 = uy(rng), x1 = ux(rng), y1 = uy(rng);
    if (std::hypot(x1 - x0, y1 - y0) < 0.1) continue;
    const auto g = segment_geometry(x0, y0, x1, y1);
    REQUIRE(g.theta_deg);
    CHECK(*g.theta_deg >= 0.0);
    CHECK(*g.theta_deg <= 180.0);
    CHECK(std::abs(*g.theta_deg - oracle::radial_angle_deg(x0, y0, x1, y1)) < 1e-9);

    const double a = ua(rng), c = std::cos(a), s = std::sin(a);
    const auto r = segment_geometry(c * x0 - s * y0, s * x0 + c * y0, c * x1 - s * y1, s * x1 + c * y1);
    CHECK(std::abs(r.d - g.d) < 1e-9);
    CHECK(std::abs(*r.theta_deg - *g.theta_deg) < 1e-9);
  }
}

TEST_CASE("classify examples and monotonicity") {
  CHECK(classify({0, 0, 2.5, 10.0}, 2.0, 15.0));
  CHECK_FALSE(classify({0, 0, 1.9, 0.0}, 2.0, 15.0));
  CHECK_FALSE(classify({0, 0, 4.0, 15.1}, 2.0, 15.0));
  CHECK(classify({0, 0, 2.0, 15.0}, 2.0, 15.0));
  for (double d = 0.0; d < 5.0; d += 0.25) {
    for (double th = 0.0; th < 40.0; th += 1.0) {
      if (classify({0, 0, d, th}, 2.0, 15.0)) {
        CHECK(classify({0, 0, d + 0.5, th}, 2.0, 15.0));
        CHECK(classify({0, 0, d, std::max(0.0, th - 1.0)}, 2.0, 15.0));
      }
    }
  }
}

TEST_CASE("simulated L-shaped walk splits near the true corner") {
  const Simulation sim = simulate(scenario("home_L_shape", 4));
  const auto tracks = track_frames(sim.session, TrackerConfig{});
  REQUIRE(tracks.size() == 1);
  const auto segs = split_track(tracks[0], SegmenterConfig{});
  REQUIRE(segs.size() == 2);
  const TrackState& corner = segs[0].states.back();
  CHECK(std::hypot(corner.x - 0.3, corner.y - 5.5) < 0.3);
}

TEST_CASE("walk log round trip and validation") {
  WalkLog log;
  log.entries.push_back({"P1", 0, WalkType::control, 2.0, 0.55});
  log.entries.push_back({"P1", 1, WalkType::fast, 32.0, std::nullopt});
  std::stringstream buf;
  write_walklog(log, buf);
  const WalkLog back = parse_walklog(buf);
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].reference_step_length == 0.55);
  CHECK(!back.entries[1].reference_step_length);
  CHECK(back.entries[1].walk_type == WalkType::fast);
  CHECK(back.g_s == log.g_s);

  std::stringstream dup;
  dup << R"({"format":"gaitpipe-walklog","version":1,"g_s":[0,6.03],"g_e":[0,2.03]})" << '\n'
      << R"({"participant":"P1","walk_index":0,"walk_type":"control","t_start":2.0})" << '\n'
      << R"({"participant":"P1","walk_index":1,"walk_type":"control","t_start":2.0})" << '\n';
  CHECK_THROWS_AS(parse_walklog(dup), FormatError);
}

TEST_CASE("clinic matching: a single walk along the walkway") {
  Track t = track_through(pts({{0.0, 6.0}, {0.0, 2.1}}), 0.1, 0.0, 1);
  for (auto& s : t.states) s.t += 5.0;
  WalkLog log;
  log.entries.push_back({"P1", 0, WalkType::control, 5.0, std::nullopt});
  const auto m = match_clinic_walks(std::span<const Track>(&t, 1), log, SegmenterConfig{});
  REQUIRE(m.size() == 1);
  REQUIRE(m[0].segment);
  CHECK(m[0].segment->parent_track == 1);
  CHECK(m[0].segment->valid);
}

TEST_CASE("clinic matching: repeated walks and the assistant") {
  const Simulation sim = simulate(scenario("clinic_with_assistant", 6));
  const auto tracks = track_frames(sim.session, TrackerConfig{});
  const auto m = match_clinic_walks(tracks, *sim.walklog, SegmenterConfig{});
  REQUIRE(m.size() == 2);
  REQUIRE(m[0].segment);
  REQUIRE(m[1].segment);
  CHECK(m[0].segment->parent_track != m[1].segment->parent_track);
  for (const auto& match : m) {
    CHECK(std::abs(match.segment->t_start() - match.walk.t_start) < 3.0);
    // participant walks on x ~ 0; the assistant is 1.5 m to the side
    for (const TrackState& s : match.segment->states) CHECK(std::abs(s.x) < 0.6);
  }
}

TEST_CASE("clinic matching: no candidate means unmatched") {
  const Track t = track_through(pts({{3.0, 6.0}, {3.0, 2.0}}), 0.1, 0.0, 1);
  WalkLog log;
  log.entries.push_back({"P1", 0, WalkType::control, 0.0, std::nullopt});
  const auto m = match_clinic_walks(std::span<const Track>(&t, 1), log, SegmenterConfig{});
  REQUIRE(m.size() == 1);
  CHECK(!m[0].segment);
}
