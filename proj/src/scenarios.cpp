#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/simulator.hpp"

namespace gaitpipe {

namespace {

// Parameter draws use their own stream so scene content and gait parameters
// stay decorrelated.
class ParamRng {
 public:
  explicit ParamRng(std::uint64_t seed) : eng_(seed ^ 0x9E3779B97F4A7C15ULL) {}
  double uniform(double a, double b) {
    return a + (b - a) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
  }
  double normal() {
    double u1 = uniform(0.0, 1.0);
    while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * uniform(0.0, 1.0));
  }

 private:
  std::mt19937_64 eng_;
};

struct Gait {
  double v0;
  double period;
};

Gait draw_gait(ParamRng& rng, const ScenarioOverrides& o, double v_lo, double v_hi, double t_lo,
               double t_hi, double max_step) {
  Gait g{};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    g.v0 = o.base_speed.value_or(rng.uniform(v_lo, v_hi));
    g.period = o.step_period.value_or(rng.uniform(t_lo, t_hi));
    if (g.v0 * g.period <= max_step || (o.base_speed && o.step_period)) break;
  }
  return g;
}

WalkerSpec walker(std::string id, std::vector<Eigen::Vector2d> path, double start, const Gait& g) {
  WalkerSpec w;
  w.id = std::move(id);
  w.path = std::move(path);
  w.start_time = start;
  w.base_speed = g.v0;
  w.step_period = g.period;
  w.speed_amplitude = 0.2 * g.v0;
  return w;
}

constexpr double kLead = 0.5;  // walkway lead-in/lead-out beyond g_s / g_e

SceneSpec clinic_scene(const std::string& name, std::uint64_t seed, const ScenarioOverrides& o,
                       WalkType type, double v_lo, double v_hi, double t_lo, double t_hi,
                       bool with_assistant) {
  ParamRng rng(seed);
  const Gait g = draw_gait(rng, o, v_lo, v_hi, t_lo, t_hi, 0.9);
  SceneSpec scene;
  scene.name = name;
  scene.seed = seed;
  scene.site = Site::clinic;
  scene.room = "clinic";
  scene.duration = 45.0;

  WalkLog log;
  const std::string participant = "P" + std::to_string(seed);
  const double starts[] = {2.0, 32.0};
  for (int w = 0; w < 2; ++w) {
    const double x = rng.uniform(-0.1, 0.1);
    scene.walkers.push_back(walker(participant + "-w" + std::to_string(w),
                                   {{x, log.g_s.y() + kLead}, {x, log.g_e.y() - kLead}}, starts[w], g));
    log.entries.push_back({participant, w, type, starts[w], g.v0 * g.period});
    if (with_assistant) {
      const Gait ga{g.v0, g.period * 1.1};
      scene.walkers.push_back(walker("RA-w" + std::to_string(w),
                                     {{1.5, log.g_s.y() + kLead + 0.8}, {1.5, log.g_e.y() - kLead + 0.8}},
                                     starts[w] + 0.6, ga));
    }
  }
  scene.walklog = std::move(log);
  return scene;
}

SceneSpec home_scene(const std::string& name, std::uint64_t seed, double duration) {
  SceneSpec scene;
  scene.name = name;
  scene.seed = seed;
  scene.site = Site::home;
  scene.room = "living";
  scene.duration = duration;
  return scene;
}

using Factory = std::function<SceneSpec(std::uint64_t, const ScenarioOverrides&)>;

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> presets = {
      {"clinic_control",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         return clinic_scene("clinic_control", seed, o, WalkType::control, 0.6, 1.3, 0.45, 0.7, false);
       }},
      {"clinic_fast",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         return clinic_scene("clinic_fast", seed, o, WalkType::fast, 1.2, 1.9, 0.26, 0.5, false);
       }},
      {"clinic_with_assistant",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         return clinic_scene("clinic_with_assistant", seed, o, WalkType::control, 0.6, 1.3, 0.45, 0.7,
                             true);
       }},
      {"home_radial",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         ParamRng rng(seed);
         const Gait g = draw_gait(rng, o, 0.6, 1.2, 0.5, 0.7, 0.8);
         SceneSpec s = home_scene("home_radial", seed, 24.0);
         s.walkers.push_back(walker("R1-a", {{0.2, 6.5}, {0.2, 1.5}}, 1.0, g));
         s.walkers.push_back(walker("R1-b", {{0.2, 1.5}, {0.2, 6.5}}, 12.0, g));
         return s;
       }},
      {"home_perpendicular",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         ParamRng rng(seed);
         const Gait g = draw_gait(rng, o, 0.6, 1.2, 0.5, 0.7, 0.8);
         SceneSpec s = home_scene("home_perpendicular", seed, 24.0);
         s.walkers.push_back(walker("R1-a", {{-3.0, 3.5}, {3.0, 3.5}}, 1.0, g));
         s.walkers.push_back(walker("R1-b", {{3.0, 3.5}, {-3.0, 3.5}}, 12.0, g));
         return s;
       }},
      {"home_L_shape",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         ParamRng rng(seed);
         const Gait g = draw_gait(rng, o, 0.6, 1.2, 0.5, 0.7, 0.8);
         SceneSpec s = home_scene("home_L_shape", seed, 16.0);
         s.walkers.push_back(walker("R1", {{-2.5, 5.5}, {0.3, 5.5}, {0.3, 1.5}}, 1.0, g));
         return s;
       }},
      {"home_with_pet",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         ParamRng rng(seed);
         const Gait g = draw_gait(rng, o, 0.6, 1.2, 0.5, 0.7, 0.8);
         SceneSpec s = home_scene("home_with_pet", seed, 24.0);
         s.walkers.push_back(walker("R1-a", {{0.2, 6.5}, {0.2, 1.5}}, 1.0, g));
         s.walkers.push_back(walker("R1-b", {{0.2, 1.5}, {0.2, 6.5}}, 12.0, g));
         s.pets.push_back(PetSpec{});
         return s;
       }},
      {"two_residents",
       [](std::uint64_t seed, const ScenarioOverrides& o) {
         ParamRng rng(seed);
         const Gait g1 = draw_gait(rng, o, 0.6, 1.2, 0.5, 0.7, 0.8);
         const Gait g2 = draw_gait(rng, o, 0.6, 1.2, 0.5, 0.7, 0.8);
         SceneSpec s = home_scene("two_residents", seed, 14.0);
         s.walkers.push_back(walker("A", {{-1.2, 6.5}, {-1.2, 1.5}}, 1.0, g1));
         s.walkers.push_back(walker("B", {{1.2, 1.5}, {1.2, 6.5}}, 1.5, g2));
         return s;
       }},
  };
  return presets;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

SceneSpec scenario(const std::string& name, std::uint64_t seed, const ScenarioOverrides& overrides) {
  const auto& presets = registry();
  auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown scenario '" + name + "'");
  SceneSpec scene = it->second(seed, overrides);
  validate(scene);
  return scene;
}

SceneSpec home_day_scene(const HomeProfile& profile, int day, std::uint64_t seed) {
  const std::uint64_t mixed = seed * 0x100000001B3ULL + static_cast<std::uint64_t>(day) * 7919ULL +
                              std::hash<std::string>{}(profile.home_id);
  ParamRng rng(mixed);
  const double day_v = profile.base_speed * (1.0 + profile.daily_jitter * rng.normal());
  const double day_t = profile.step_period * (1.0 + profile.daily_jitter * rng.normal());

  auto walk_gait = [&]() {
    return Gait{day_v * (1.0 + profile.walk_jitter * rng.normal()),
                day_t * (1.0 + profile.walk_jitter * rng.normal())};
  };

  SceneSpec s;
  s.name = profile.home_id + "-day" + std::to_string(day);
  s.seed = mixed;
  s.site = Site::home;
  s.room = profile.home_id;
  s.duration = 40.0;
  const double x = profile.radial_offset;
  s.walkers.push_back(walker("in", {{x, 6.5}, {x, 1.5}}, 1.0, walk_gait()));
  s.walkers.push_back(walker("out", {{x, 1.5}, {x, 6.5}}, 13.0, walk_gait()));
  s.walkers.push_back(walker("cross", {{-3.0, 4.0}, {3.0, 4.5}}, 26.0, walk_gait()));
  return s;
}

}  // namespace gaitpipe
