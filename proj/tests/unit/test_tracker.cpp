#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

#include "gaitpipe/simulator.hpp"
#include "gaitpipe/tracker.hpp"
#include "oracles.hpp"

using namespace gaitpipe;

namespace {

std::vector<RadarPoint> blob(std::mt19937_64& rng, double cx, double cy, int n, double spread) {
  std::normal_distribution<double> g(0.0, spread);
  std::vector<RadarPoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back({cx + g(rng), cy + g(rng), g(rng), 0.0});
  return pts;
}

std::vector<RadarPoint> random_frame(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(0.5, 7.0), uz(-1.0, 1.0);
  std::vector<RadarPoint> pts;
  // a few dense blobs plus uniform clutter, coarsely quantised so that
  // exact distance ties actually happen
  const std::size_t blobs = rng() % 5;
  for (std::size_t b = 0; b < blobs && pts.size() < n; ++b) {
    auto more = blob(rng, ux(rng), uy(rng), static_cast<int>(rng() % 40), 0.2);
    pts.insert(pts.end(), more.begin(), more.end());
  }
  while (pts.size() < n) pts.push_back({ux(rng), uy(rng), uz(rng), 0.0});
  pts.resize(n);
  for (auto& p : pts) {
    p.x = std::round(p.x * 20.0) / 20.0;
    p.y = std::round(p.y * 20.0) / 20.0;
    p.z = std::round(p.z * 20.0) / 20.0;
  }
  return pts;
}

}  // namespace

TEST_CASE("dbscan on an empty frame gives no detections") {
  CHECK(dbscan(std::vector<RadarPoint>{}, 0.0, DbscanConfig{}).empty());
  CHECK(dbscan_labels(std::vector<RadarPoint>{}, 0.4, 3).empty());
}

TEST_CASE("two groups far apart give two detections") {
  std::mt19937_64 rng(1);
  auto pts = blob(rng, 0.0, 3.0, 10, 0.05);
  auto other = blob(rng, 3.0, 3.0, 10, 0.05);
  pts.insert(pts.end(), other.begin(), other.end());
  const auto dets = dbscan(pts, 1.5, DbscanConfig{0.5, 4, 5});
  REQUIRE(dets.size() == 2);
  for (const Detection& d : dets) {
    CHECK(d.points.size() == 10);
    CHECK(d.t == 1.5);
    double mx = 0.0, my = 0.0;
    for (const auto& p : d.points) {
      mx += p.x;
      my += p.y;
    }
    CHECK(d.centroid_x == doctest::Approx(mx / 10.0));
    CHECK(d.centroid_y == doctest::Approx(my / 10.0));
  }
}

TEST_CASE("small clusters are dropped as clutter") {
  std::mt19937_64 rng(2);
  const auto pet = blob(rng, 1.0, 2.0, 3, 0.02);
  CHECK(dbscan_labels(pet, 0.4, 3) == std::vector<int>{0, 0, 0});
  CHECK(dbscan(pet, 0.0, DbscanConfig{0.4, 3, 5}).empty());
}

TEST_CASE("dbscan labels match the naive reference") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const auto pts = random_frame(rng, rng() % 200);
    const double eps = 0.2 + 0.1 * static_cast<double>(rng() % 4);
    const std::size_t min_pts = 1 + rng() % 5;
    CHECK(oracle::same_partition(dbscan_labels(pts, eps, min_pts), oracle::naive_dbscan(pts, eps, min_pts)));
  }
}

TEST_CASE("dbscan partition does not depend on point order") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto pts = random_frame(rng, 120);
    const auto labels = dbscan_labels(pts, 0.4, 3);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<RadarPoint> shuffled;
    for (std::size_t i : perm) shuffled.push_back(pts[i]);
    const auto shuffled_labels = dbscan_labels(shuffled, 0.4, 3);
    std::vector<int> back(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) back[perm[i]] = shuffled_labels[i];
    CHECK(oracle::same_partition(labels, back));
  }
}

TEST_CASE("hungarian total equals the exhaustive minimum") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    CostMatrix cost(r, c);
    std::vector<std::vector<double>> plain(r, std::vector<double>(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) cost(i, j) = plain[i][j] = static_cast<double>(rng() % 4096) / 1024.0;
    const auto a = solve_assignment(cost);
    CHECK(std::count_if(a.begin(), a.end(), [](int x) { return x >= 0; }) == static_cast<long>(std::min(r, c)));
    std::vector<int> used(c, 0);
    for (int x : a)
      if (x >= 0) CHECK(++used[x] == 1);
    CHECK(assignment_cost(cost, a) == oracle::brute_force_assignment(plain));
  }
}

TEST_CASE("association examples") {
  Detection d{0.0, 3.1, 0.0, {{0.0, 3.1, 0.0, 0.0}}};
  const std::vector<Eigen::Vector2d> one{{0.0, 3.0}};
  auto r = associate(one, std::span<const Detection>(&d, 1), 1.0);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});

  std::vector<Detection> many(3, d);
  r = associate(std::vector<Eigen::Vector2d>{}, many, 1.0);
  CHECK(r.matches.empty());
  CHECK(r.unmatched_detections == std::vector<std::size_t>{0, 1, 2});

  // outside the gate
  const std::vector<Eigen::Vector2d> far{{0.0, 5.0}};
  r = associate(far, std::span<const Detection>(&d, 1), 1.0);
  CHECK(r.matches.empty());
  CHECK(r.unmatched_tracks == std::vector<std::size_t>{0});
  CHECK(r.unmatched_detections == std::vector<std::size_t>{0});
}

TEST_CASE("association prefers more matches, then lower cost, then lexicographic order") {
  // track 0 can reach both detections, track 1 only detection 0
  std::vector<Detection> dets{{0.0, 3.0, 0.0, {}}, {0.0, 3.8, 0.0, {}}};
  const std::vector<Eigen::Vector2d> tracks{{0.0, 3.1}, {0.0, 2.5}};
  auto r = associate(tracks, dets, 1.0);
  REQUIRE(r.matches.size() == 2);
  CHECK(r.matches[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(r.matches[1] == std::pair<std::size_t, std::size_t>{1, 0});

  // symmetric tie: both assignments cost the same
  std::vector<Detection> tie{{-1.0, 3.0, 0.0, {}}, {1.0, 3.0, 0.0, {}}};
  const std::vector<Eigen::Vector2d> mid{{0.0, 3.0}, {0.0, 3.0}};
  r = associate(mid, tie, 2.0);
  REQUIRE(r.matches.size() == 2);
  CHECK(r.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(r.matches[1] == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("kalman: stationary detections converge") {
  KalmanCv kf(0.5, 2.5, 2.0, 0.15);
  for (int i = 0; i < 200; ++i) {
    kf.predict(0.1);
    kf.update(1.0, 3.0);
  }
  CHECK(kf.position().x() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(kf.position().y() == doctest::Approx(3.0).epsilon(1e-6));
  const KalmanCv::Cov p = kf.covariance();
  CHECK((p - p.transpose()).norm() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<KalmanCv::Cov>(p).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("kalman: a missed frame advances by velocity times dt") {
  Track t;
  KalmanCv kf(0.0, 0.0, 2.0, 0.15);
  KalmanCv::State s;
  s << 1.0, 2.0, 0.5, -1.0;
  kf.set_state(s);
  t.states.push_back({1.0, 1.0, 2.0, {}});
  kalman_step(t, kf, nullptr, 1.25);
  REQUIRE(t.states.size() == 2);
  CHECK(t.states[1].t == 1.25);
  CHECK(t.states[1].x == 1.0 + 0.5 * 0.25);
  CHECK(t.states[1].y == 2.0 - 1.0 * 0.25);
  CHECK(t.states[1].points.empty());
}

TEST_CASE("kalman: filtered error is below the injected measurement noise") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.15);
  KalmanCv kf(0.0, 6.0, 2.0, 0.15);
  double se = 0.0;
  int count = 0;
  for (int k = 1; k <= 80; ++k) {
    const double t = 0.1 * k;
    const double tx = 0.2 * t, ty = 6.0 - 1.0 * t;
    kf.predict(0.1);
    kf.update(tx + noise(rng), ty + noise(rng));
    if (k > 20) {
      se += (kf.position() - Eigen::Vector2d(tx, ty)).squaredNorm() / 2.0;
      ++count;
    }
  }
  CHECK(std::sqrt(se / count) < 0.15);
}

TEST_CASE("empty session gives no tracks") {
  CHECK(track_frames(Session{}, TrackerConfig{}).empty());
}

TEST_CASE("one simulated walker gives one confirmed track covering the walk") {
  const Simulation sim = simulate(scenario("home_L_shape", 21));
  const auto tracks = track_frames(sim.session, TrackerConfig{});
  REQUIRE(tracks.size() == 1);
  const WalkerTruth& w = sim.truth.walkers.at(0);
  const double covered = tracks[0].states.back().t - tracks[0].states.front().t;
  CHECK(covered >= 0.9 * (w.t_end - w.t_start));
  CHECK(tracks[0].status != TrackStatus::tentative);
  for (std::size_t i = 1; i < tracks[0].states.size(); ++i)
    CHECK(tracks[0].states[i].t > tracks[0].states[i - 1].t);
}

TEST_CASE("two separated walkers keep their identities") {
  const Simulation sim = simulate(scenario("two_residents", 8));
  const auto tracks = track_frames(sim.session, TrackerConfig{});
  REQUIRE(tracks.size() == 2);
  std::map<std::string, std::map<long, Eigen::Vector2d>> truth;
  for (const auto& row : sim.truth.rows) truth[row.walker_id][std::lround(row.t * 10)] = {row.x, row.y};
  for (const Track& t : tracks) {
    // own walker = nearest at the first state
    std::string own;
    double best = 1e9;
    for (const auto& [id, path] : truth) {
      auto it = path.find(std::lround(t.states.front().t * 10));
      if (it == path.end()) continue;
      const double d = (it->second - Eigen::Vector2d(t.states.front().x, t.states.front().y)).norm();
      if (d < best) best = d, own = id;
    }
    REQUIRE(!own.empty());
    double worst = 0.0;
    for (const TrackState& s : t.states) {
      auto it = truth[own].find(std::lround(s.t * 10));
      if (it != truth[own].end()) worst = std::max(worst, (it->second - Eigen::Vector2d(s.x, s.y)).norm());
    }
    CHECK(worst < 0.5);
  }
}

TEST_CASE("tracking is deterministic") {
  const Simulation sim = simulate(scenario("home_with_pet", 2));
  const auto a = track_frames(sim.session, TrackerConfig{});
  const auto b = track_frames(sim.session, TrackerConfig{});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].states.size() == b[i].states.size());
    for (std::size_t j = 0; j < a[i].states.size(); ++j) {
      CHECK(a[i].states[j].x == b[i].states[j].x);
      CHECK(a[i].states[j].y == b[i].states[j].y);
    }
  }
}

TEST_CASE("limb fragments next to a track do not spawn a second track") {
  Session s;
  for (int k = 0; k < 30; ++k) {
    Frame f;
    f.t = 0.1 * k;
    const double y = 6.0 - 0.1 * k;
    for (int i = 0; i < 6; ++i) f.points.push_back({0.02 * i, y, 0.0, -1.0});        // torso
    for (int i = 0; i < 5; ++i) f.points.push_back({0.25 + 0.02 * i, y, -0.9, -1.5});  // legs, split off in z
    s.frames.push_back(f);
  }
  REQUIRE(dbscan(s.frames[0].points, 0.0, DbscanConfig{}).size() == 2);
  const auto tracks = track_frames(s, TrackerConfig{});
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].states.front().points.size() == 11);

  TrackerConfig tight;
  tight.absorb_radius = 0.1;
  CHECK(track_frames(s, tight).size() == 2);
}
