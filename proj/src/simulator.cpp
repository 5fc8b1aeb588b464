#include "gaitpipe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "gaitpipe/errors.hpp"

namespace gaitpipe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

 private:
  std::mt19937_64 eng_;
};

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

RadarPoint scatterer(const Eigen::Vector2d& pos, double z, const Eigen::Vector2d& vel,
                     double doppler_sigma, SimRng& rng) {
  const double range = std::sqrt(pos.squaredNorm() + z * z);
  const double radial = range > 0.0 ? (pos.x() * vel.x() + pos.y() * vel.y()) / range : 0.0;
  return {pos.x(), pos.y(), z, radial + doppler_sigma * rng.normal()};
}

}  // namespace

// ---------------------------------------------------------------------------
// WalkerKinematics

WalkerKinematics::WalkerKinematics(const WalkerSpec& spec) : spec_(spec) {
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < spec_.path.size(); ++i)
    cumulative_.push_back(cumulative_.back() + (spec_.path[i] - spec_.path[i - 1]).norm());
  length_ = cumulative_.back();

  // Integrate ds/dt until the end of the path (hard cap: one hour).
  s_grid_.push_back(0.0);
  const double h = step_;
  const std::size_t max_steps = 3'600'000;
  end_time_ = spec_.start_time;
  if (length_ <= 0.0) return;
  for (std::size_t k = 0; k < max_steps; ++k) {
    const double t = spec_.start_time + static_cast<double>(k) * h;
    const double s = s_grid_.back();
    const double k1 = speed_at_distance(t, s);
    const double k2 = speed_at_distance(t + h / 2, s + h / 2 * k1);
    const double k3 = speed_at_distance(t + h / 2, s + h / 2 * k2);
    const double k4 = speed_at_distance(t + h, s + h * k3);
    const double next = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next >= length_) {
      const double frac = (length_ - s) / (next - s);
      end_time_ = t + frac * h;
      s_grid_.push_back(length_);
      return;
    }
    s_grid_.push_back(next);
  }
  end_time_ = spec_.start_time + static_cast<double>(max_steps) * h;
}

double WalkerKinematics::speed_at_distance(double t, double s) const {
  const double edge = std::min(s, length_ - s);
  const double ramp = spec_.ramp_distance > 0.0 ? smoothstep(edge / spec_.ramp_distance) : 1.0;
  const double g = spec_.ramp_floor + (1.0 - spec_.ramp_floor) * ramp;
  const double phase = kTwoPi * (t - spec_.start_time) / spec_.step_period;
  return g * (spec_.base_speed + spec_.speed_amplitude * std::cos(phase));
}

double WalkerKinematics::distance_at(double t) const {
  if (t <= spec_.start_time) return 0.0;
  if (t >= end_time_) return length_;
  const double offset = (t - spec_.start_time) / step_;
  const std::size_t k = std::min(static_cast<std::size_t>(offset), s_grid_.size() - 1);
  const double t0 = spec_.start_time + static_cast<double>(k) * step_;
  const double h = t - t0;
  const double s = s_grid_[k];
  if (h <= 0.0) return s;
  const double k1 = speed_at_distance(t0, s);
  const double k2 = speed_at_distance(t0 + h / 2, s + h / 2 * k1);
  const double k3 = speed_at_distance(t0 + h / 2, s + h / 2 * k2);
  const double k4 = speed_at_distance(t0 + h, s + h * k3);
  return std::min(length_, s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

double WalkerKinematics::speed_at(double t) const {
  if (!active(t)) return 0.0;
  return speed_at_distance(t, distance_at(t));
}

Eigen::Vector2d WalkerKinematics::point_at_distance(double s, Eigen::Vector2d* heading) const {
  std::size_t leg = 1;
  while (leg + 1 < cumulative_.size() && cumulative_[leg] < s) ++leg;
  const Eigen::Vector2d a = spec_.path[leg - 1];
  const Eigen::Vector2d b = spec_.path[leg];
  const double len = cumulative_[leg] - cumulative_[leg - 1];
  const Eigen::Vector2d dir = len > 0.0 ? Eigen::Vector2d((b - a) / len) : Eigen::Vector2d(0.0, 1.0);
  if (heading) *heading = dir;
  return a + dir * std::clamp(s - cumulative_[leg - 1], 0.0, len);
}

Eigen::Vector2d WalkerKinematics::position_at(double t) const {
  return point_at_distance(distance_at(t), nullptr);
}

Eigen::Vector2d WalkerKinematics::heading_at(double t) const {
  Eigen::Vector2d dir;
  point_at_distance(distance_at(t), &dir);
  return dir;
}

std::vector<double> WalkerKinematics::step_events() const {
  std::vector<double> events;
  for (int k = 1;; ++k) {
    const double t = spec_.start_time + k * spec_.step_period;
    if (t > end_time_) break;
    events.push_back(t);
  }
  return events;
}

// ---------------------------------------------------------------------------
// Scene generation

void validate(const SceneSpec& scene) {
  if (!(scene.frame_rate > 0.0)) throw ConfigError("scene frame_rate must be positive");
  if (!(scene.duration >= 0.0)) throw ConfigError("scene duration must be non-negative");
  for (const WalkerSpec& w : scene.walkers) {
    if (w.path.size() < 2) throw ConfigError("walker " + w.id + ": path needs two waypoints");
    if (!(w.step_period > 0.0)) throw ConfigError("walker " + w.id + ": step_period must be positive");
    if (!(w.speed_amplitude >= 0.0) || !(w.base_speed > w.speed_amplitude))
      throw ConfigError("walker " + w.id + ": need v0 > A >= 0");
    if (!(w.ramp_floor > 0.0 && w.ramp_floor <= 1.0))
      throw ConfigError("walker " + w.id + ": ramp_floor must be in (0, 1]");
    if (w.torso_points < 0 || w.arm_points < 0 || w.leg_points < 0)
      throw ConfigError("walker " + w.id + ": negative scatterer count");
    if (!(w.dropout >= 0.0 && w.dropout < 1.0)) throw ConfigError("walker " + w.id + ": dropout must be in [0, 1)");
    for (const auto& p : w.path)
      if (p.y() < 0.0) throw ConfigError("walker " + w.id + ": path behind the radar");
  }
}

Simulation simulate(const SceneSpec& scene) {
  validate(scene);
  SimRng rng(scene.seed);
  Simulation sim;
  Session& session = sim.session;
  session.frame_rate = scene.frame_rate;
  session.site = scene.site;
  session.room_label = scene.room;
  session.device_id = scene.device;

  std::vector<WalkerKinematics> walkers;
  walkers.reserve(scene.walkers.size());
  for (const WalkerSpec& w : scene.walkers) walkers.emplace_back(w);

  for (std::size_t i = 0; i < walkers.size(); ++i) {
    WalkerTruth wt;
    wt.id = scene.walkers[i].id;
    wt.step_length = scene.walkers[i].true_step_length();
    wt.t_start = walkers[i].start_time();
    wt.t_end = walkers[i].end_time();
    wt.step_events = walkers[i].step_events();
    sim.truth.walkers.push_back(std::move(wt));
  }

  const double sign_x = scene.mirror_x ? -1.0 : 1.0;
  const auto n_frames = static_cast<std::size_t>(std::floor(scene.duration * scene.frame_rate + 1e-9));

  for (std::size_t k = 0; k < n_frames; ++k) {
    Frame frame;
    frame.t = quantize6(static_cast<double>(k) / scene.frame_rate);
    const double t = frame.t;

    for (std::size_t wi = 0; wi < walkers.size(); ++wi) {
      const WalkerKinematics& kin = walkers[wi];
      if (!kin.active(t)) continue;
      const WalkerSpec& spec = scene.walkers[wi];
      const Eigen::Vector2d c = kin.position_at(t);
      const Eigen::Vector2d u = kin.heading_at(t);
      const Eigen::Vector2d lateral(-u.y(), u.x());
      const double v = kin.speed_at(t);
      const double tau = t - spec.start_time;
      const double swing = std::cos(std::numbers::pi * tau / spec.step_period);

      auto jitter = [&](double spread) {
        return Eigen::Vector2d(spread * rng.normal() + spec.noise_sigma_pos * rng.normal(),
                               spread * rng.normal() + spec.noise_sigma_pos * rng.normal());
      };

      for (int j = 0; j < spec.torso_points; ++j) {
        if (rng.uniform() < spec.dropout) continue;
        const Eigen::Vector2d p = c + jitter(spec.body_radius);
        const double z = rng.uniform(spec.torso_z_low, spec.torso_z_high);
        frame.points.push_back(scatterer(p, z, v * u, spec.noise_sigma_doppler, rng));
      }
      for (int j = 0; j < spec.arm_points; ++j) {
        if (rng.uniform() < spec.dropout) continue;
        const double side = (j % 2 == 0) ? 1.0 : -1.0;
        const double arm_speed =
            spec.arm_counterphase ? v + side * 1.5 * spec.base_speed * swing : v;
        const Eigen::Vector2d p = c + side * 0.22 * lateral + jitter(0.05);
        const double z = rng.uniform(-0.6, -0.1);
        frame.points.push_back(scatterer(p, z, arm_speed * u, spec.noise_sigma_doppler, rng));
      }
      for (int j = 0; j < spec.leg_points; ++j) {
        if (rng.uniform() < spec.dropout) continue;
        const double side = (j % 2 == 0) ? 1.0 : -1.0;
        const double leg_speed = v * (1.0 + side * swing);
        const Eigen::Vector2d p = c + side * 0.1 * lateral + jitter(0.05);
        const double z = rng.uniform(-1.15, -0.6);
        frame.points.push_back(scatterer(p, z, leg_speed * u, spec.noise_sigma_doppler, rng));
      }

      GroundTruthRow row;
      row.t = t;
      row.walker_id = spec.id;
      row.x = quantize6(sign_x * c.x());
      row.y = quantize6(c.y());
      row.speed = quantize6(v);
      for (double e : sim.truth.walkers[wi].step_events) {
        if (std::llround(e * scene.frame_rate) == static_cast<long long>(k)) row.is_step_peak = true;
      }
      sim.truth.rows.push_back(std::move(row));
    }

    for (const PetSpec& pet : scene.pets) {
      if (t < pet.start_time || t > pet.end_time) continue;
      const double w = pet.speed / pet.radius;
      const double ang = w * (t - pet.start_time);
      const Eigen::Vector2d p = pet.center + pet.radius * Eigen::Vector2d(std::cos(ang), std::sin(ang));
      const Eigen::Vector2d vel = pet.speed * Eigen::Vector2d(-std::sin(ang), std::cos(ang));
      for (int j = 0; j < pet.points; ++j) {
        const Eigen::Vector2d q(p.x() + 0.08 * rng.normal(), p.y() + 0.08 * rng.normal());
        frame.points.push_back(scatterer(q, rng.uniform(-1.15, -0.95), vel, 0.05, rng));
      }
    }

    const int clutter = rng.poisson(scene.clutter_per_frame);
    for (int j = 0; j < clutter; ++j) {
      const Eigen::Vector2d q(rng.uniform(-4.0, 4.0), rng.uniform(0.5, 8.0));
      frame.points.push_back({q.x(), q.y(), rng.uniform(-1.2, 1.0), 0.5 * rng.normal()});
    }

    std::vector<RadarPoint> kept;
    kept.reserve(frame.points.size());
    for (RadarPoint p : frame.points) {
      if (p.y < 0.0) continue;
      kept.push_back({quantize6(sign_x * p.x), quantize6(p.y), quantize6(p.z), quantize6(p.s)});
    }
    frame.points = std::move(kept);
    session.frames.push_back(std::move(frame));
  }

  if (scene.walklog) {
    sim.walklog = scene.walklog;
    if (scene.mirror_x) {
      sim.walklog->g_s.x() = -sim.walklog->g_s.x();
      sim.walklog->g_e.x() = -sim.walklog->g_e.x();
    }
  }
  return sim;
}

std::string format_ground_truth(const GroundTruthLog& truth) {
  std::ostringstream out;
  for (const GroundTruthRow& r : truth.rows) {
    out << "{\"t\":" << format_fixed(r.t) << ",\"walker_id\":" << nlohmann::json(r.walker_id).dump()
        << ",\"x\":" << format_fixed(r.x) << ",\"y\":" << format_fixed(r.y)
        << ",\"speed\":" << format_fixed(r.speed)
        << ",\"is_step_peak\":" << (r.is_step_peak ? "true" : "false") << "}\n";
  }
  return out.str();
}

}  // namespace gaitpipe
