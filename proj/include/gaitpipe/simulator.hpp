#pragma once

// Synthetic radar scenes with known gait ground truth.
//
// Walker model: the torso moves along a waypoint polyline with forward speed
//
//   v(t) = g(s) * (v0 + A cos(2 pi (t - t0) / T_step))
//
// so speed peaks fall on t0 + k T_step and the distance covered between
// consecutive peaks is v0 T_step wherever g = 1. g(s) is a smoothstep ramp
// from `ramp_floor` to 1 over the first and last `ramp_distance` meters of
// the path (start/stop acceleration). Each frame emits torso, arm and leg
// scatterers whose Doppler is the radial projection of the scatterer
// velocity plus Gaussian noise.
//
// Randomness: std::mt19937_64 seeded with the scene seed; uniforms are the
// top 53 bits scaled to [0, 1); normals use Box-Muller (cosine branch only).
// Outputs are quantised to the 6-decimal session grid.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitpipe/pointcloud.hpp"
#include "gaitpipe/segmenter.hpp"

namespace gaitpipe {

struct WalkerSpec {
  std::string id = "W1";
  std::vector<Eigen::Vector2d> path;
  double start_time = 0.0;
  double base_speed = 1.0;        // v0, m/s
  double step_period = 0.55;      // T_step, s
  double speed_amplitude = 0.2;   // A, m/s
  double torso_z_low = -0.2;      // torso band relative to the radar, m
  double torso_z_high = 0.2;
  int torso_points = 8;           // expected scatterers per frame
  int arm_points = 4;
  int leg_points = 4;
  bool arm_counterphase = true;   // arms swing against each other (one moves backwards)
  double body_radius = 0.10;      // horizontal spread of torso scatterers, m
  double noise_sigma_pos = 0.03;  // m
  double noise_sigma_doppler = 0.05;  // m/s
  double dropout = 0.05;          // per-scatterer miss probability
  double ramp_distance = 0.75;    // m
  double ramp_floor = 0.5;        // speed factor at the very start/end of the path

  double true_step_length() const { return base_speed * step_period; }
};

struct PetSpec {
  Eigen::Vector2d center{1.5, 3.0};
  double radius = 0.8;     // circular wander, m
  double speed = 0.4;      // m/s
  int points = 3;
  double start_time = 0.0;
  double end_time = 1e9;
};

struct SceneSpec {
  std::string name;
  std::vector<WalkerSpec> walkers;
  std::vector<PetSpec> pets;
  double duration = 30.0;
  double frame_rate = 10.0;
  std::uint64_t seed = 1;
  Site site = Site::home;
  std::string room = "living";
  std::string device = "SIM";
  double clutter_per_frame = 0.3;  // isolated false returns, Poisson mean
  bool mirror_x = false;           // negate every x coordinate on output
  std::optional<WalkLog> walklog;  // clinic scenes
};

struct GroundTruthRow {
  double t = 0.0;
  std::string walker_id;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  bool is_step_peak = false;
};

struct WalkerTruth {
  std::string id;
  double step_length = 0.0;  // v0 * T_step
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> step_events;  // speed-peak times t0 + k T_step within the walk
};

struct GroundTruthLog {
  std::vector<GroundTruthRow> rows;
  std::vector<WalkerTruth> walkers;
};

struct Simulation {
  Session session;
  GroundTruthLog truth;
  std::optional<WalkLog> walklog;
};

/// Arc-length kinematics of one walker (RK4 on a 1 ms grid).
class WalkerKinematics {
 public:
  explicit WalkerKinematics(const WalkerSpec& spec);

  double start_time() const { return spec_.start_time; }
  double end_time() const { return end_time_; }
  double path_length() const { return length_; }
  bool active(double t) const { return t >= spec_.start_time && t <= end_time_; }

  double distance_at(double t) const;  // arc length covered
  double speed_at(double t) const;     // forward speed
  Eigen::Vector2d position_at(double t) const;
  Eigen::Vector2d heading_at(double t) const;  // unit vector

  /// Speed-oscillation peak times t0 + k T_step, k >= 1, inside the walk.
  std::vector<double> step_events() const;

 private:
  double speed_at_distance(double t, double s) const;
  Eigen::Vector2d point_at_distance(double s, Eigen::Vector2d* heading) const;

  WalkerSpec spec_;
  std::vector<double> cumulative_;  // arc length at each waypoint
  double length_ = 0.0;
  double step_ = 0.001;
  std::vector<double> s_grid_;      // distance at start_time + k * step_
  double end_time_ = 0.0;
};

/// Throws ConfigError for invalid specs (v0 <= A, empty path, ...).
void validate(const SceneSpec& scene);

Simulation simulate(const SceneSpec& scene);

/// Ground truth JSONL: {t, walker_id, x, y, speed, is_step_peak} per line.
std::string format_ground_truth(const GroundTruthLog& truth);

// ---------------------------------------------------------------------------
// Presets

struct ScenarioOverrides {
  std::optional<double> base_speed;
  std::optional<double> step_period;
};

std::vector<std::string> scenario_names();

/// Named preset. Gait parameters not overridden are drawn from `seed`.
/// Throws ConfigError for an unknown name.
SceneSpec scenario(const std::string& name, std::uint64_t seed, const ScenarioOverrides& overrides = {});

/// A resident with stable gait, used to build multi-day home cohorts.
struct HomeProfile {
  std::string home_id;
  double base_speed = 0.9;
  double step_period = 0.6;
  double radial_offset = 0.2;  // lateral x of the radial pathway
  double daily_jitter = 0.03;  // relative day-to-day gait variation
  double walk_jitter = 0.03;   // relative walk-to-walk variation
};

/// One day's recording for a home: a few radial passes plus cross-room
/// walks. Deterministic in (profile, day, seed).
SceneSpec home_day_scene(const HomeProfile& profile, int day, std::uint64_t seed);

}  // namespace gaitpipe
