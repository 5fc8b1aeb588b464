#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/simulator.hpp"

using namespace gaitpipe;

namespace {

SceneSpec boresight_scene(double amplitude) {
  SceneSpec scene;
  scene.name = "boresight";
  scene.duration = 8.0;
  scene.seed = 77;
  scene.clutter_per_frame = 0.0;
  WalkerSpec w;
  w.path = {{0.0, 6.0}, {0.0, 2.0}};
  w.start_time = 0.5;
  w.base_speed = 1.0;
  w.step_period = 0.55;
  w.speed_amplitude = amplitude;
  w.arm_points = 0;
  w.leg_points = 0;
  w.dropout = 0.0;
  scene.walkers.push_back(w);
  return scene;
}

std::string session_text(const Simulation& sim) {
  std::ostringstream out;
  write_session(sim.session, out);
  return out.str();
}

}  // namespace

TEST_CASE("every preset validates and simulates") {
  const auto names = scenario_names();
  CHECK(names.size() == 8);
  for (const std::string& name : names) {
    CAPTURE(name);
    const SceneSpec scene = scenario(name, 1);
    const Simulation sim = simulate(scene);
    CHECK(!sim.session.frames.empty());
    for (const auto& w : scene.walkers) CHECK(w.true_step_length() <= 1.0);
    if (name.rfind("clinic", 0) == 0) {
      REQUIRE(sim.walklog);
      CHECK(sim.walklog->g_s == Eigen::Vector2d(0.0, 6.03));
      CHECK(sim.walklog->g_e == Eigen::Vector2d(0.0, 2.03));
      CHECK(sim.session.site == Site::clinic);
    }
  }
  CHECK_THROWS_AS(scenario("no_such_scene", 1), ConfigError);
}

TEST_CASE("clinic control walk covers the walkway with ramps at both ends") {
  const SceneSpec scene = scenario("clinic_control", 4);
  const WalkerSpec& w = scene.walkers.at(0);
  const double len = (w.path.back() - w.path.front()).norm();
  CHECK(len >= 4.0);
  CHECK(w.ramp_distance > 0.0);
  CHECK(w.ramp_floor < 1.0);
  CHECK(w.base_speed >= 0.6);
  CHECK(w.base_speed <= 1.3);
  CHECK(w.step_period >= 0.45);
  CHECK(w.step_period <= 0.7);
  WalkerKinematics kin(w);
  CHECK(kin.speed_at(w.start_time + 0.01) < 0.6 * (w.base_speed + w.speed_amplitude));
}

TEST_CASE("fixed seed gives a byte-identical session") {
  const SceneSpec scene = scenario("home_with_pet", 42);
  const Simulation a = simulate(scene);
  const Simulation b = simulate(scene);
  CHECK(session_text(a) == session_text(b));
  CHECK(format_ground_truth(a.truth) == format_ground_truth(b.truth));
  const Simulation c = simulate(scenario("home_with_pet", 43));
  CHECK(session_text(a) != session_text(c));
}

TEST_CASE("mirrored scene negates x and nothing else") {
  SceneSpec scene = scenario("home_L_shape", 5);
  const Simulation a = simulate(scene);
  scene.mirror_x = true;
  const Simulation b = simulate(scene);
  REQUIRE(a.session.frames.size() == b.session.frames.size());
  for (std::size_t f = 0; f < a.session.frames.size(); ++f) {
    const auto& pa = a.session.frames[f].points;
    const auto& pb = b.session.frames[f].points;
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pb[i].x == -pa[i].x);
      CHECK(pb[i].y == pa[i].y);
      CHECK(pb[i].s == pa[i].s);
    }
  }
}

TEST_CASE("step length is v0 T and the event count follows the walk duration") {
  SceneSpec scene = boresight_scene(0.2);
  const Simulation sim = simulate(scene);
  const WalkerTruth& w = sim.truth.walkers.at(0);
  CHECK(w.step_length == doctest::Approx(0.55).epsilon(1e-15));
  const double duration = w.t_end - w.t_start;
  CHECK(w.step_events.size() == static_cast<std::size_t>(std::floor(duration / 0.55)));
  std::size_t flagged = 0;
  for (const auto& row : sim.truth.rows) flagged += row.is_step_peak;
  CHECK(flagged == w.step_events.size());
}

TEST_CASE("distance between speed peaks is v0 T away from the ramps") {
  WalkerSpec w;
  w.path = {{0.0, 8.0}, {0.0, 0.5}};
  w.base_speed = 0.9;
  w.step_period = 0.6;
  w.speed_amplitude = 0.25;
  const WalkerKinematics kin(w);
  const auto events = kin.step_events();
  int checked = 0;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const double s0 = kin.distance_at(events[i]), s1 = kin.distance_at(events[i + 1]);
    if (s0 < w.ramp_distance || s1 > kin.path_length() - w.ramp_distance) continue;
    CHECK(s1 - s0 == doctest::Approx(0.54).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("without oscillation the torso doppler equals the walking speed") {
  const SceneSpec scene = boresight_scene(0.0);
  const Simulation sim = simulate(scene);
  const WalkerKinematics kin(scene.walkers[0]);
  int frames = 0;
  for (const Frame& f : sim.session.frames) {
    if (!kin.active(f.t)) continue;
    double sum = 0.0;
    int n = 0;
    for (const RadarPoint& p : f.points) {
      if (std::abs(p.z) > 0.25) continue;
      sum += p.s;
      ++n;
    }
    if (n == 0) continue;
    const double mean = sum / n;
    // approaching: Doppler is negative
    CHECK(std::abs(-mean - kin.speed_at(f.t)) <= 5.0 * 0.05 / std::sqrt(n) + 0.01);
    ++frames;
  }
  CHECK(frames > 20);
}

TEST_CASE("invalid specs are rejected") {
  SceneSpec scene = boresight_scene(0.2);
  scene.walkers[0].speed_amplitude = 1.5;
  CHECK_THROWS_AS(validate(scene), ConfigError);
  scene = boresight_scene(0.2);
  scene.walkers[0].path.resize(1);
  CHECK_THROWS_AS(simulate(scene), ConfigError);
  scene = boresight_scene(0.2);
  scene.frame_rate = 0.0;
  CHECK_THROWS_AS(simulate(scene), ConfigError);
}

TEST_CASE("home day scenes are deterministic and vary by day") {
  HomeProfile p;
  p.home_id = "H01";
  const SceneSpec a = home_day_scene(p, 3, 1);
  const SceneSpec b = home_day_scene(p, 3, 1);
  const SceneSpec c = home_day_scene(p, 4, 1);
  CHECK(a.walkers[0].base_speed == b.walkers[0].base_speed);
  CHECK(a.walkers[0].base_speed != c.walkers[0].base_speed);
  CHECK(session_text(simulate(a)) == session_text(simulate(b)));
}
