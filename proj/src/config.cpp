#include "gaitpipe/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gaitpipe/errors.hpp"

namespace gaitpipe {

namespace pt = boost::property_tree;

const char* to_string(DistanceMode mode) {
  return mode == DistanceMode::doppler_integral ? "doppler_integral" : "track_displacement";
}

DistanceMode distance_mode_from_string(const std::string& text) {
  if (text == "track_displacement") return DistanceMode::track_displacement;
  if (text == "doppler_integral") return DistanceMode::doppler_integral;
  throw ConfigError("unknown distance_mode '" + text + "'");
}

void validate(const PipelineConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(c.frame_rate, "frame_rate");
  positive(c.tracker.dbscan.eps, "dbscan.eps");
  positive(static_cast<double>(c.tracker.dbscan.min_pts), "dbscan.min_pts");
  positive(static_cast<double>(c.tracker.dbscan.min_cluster_size), "dbscan.min_cluster_size");
  positive(c.tracker.gate, "tracker.gate");
  positive(c.tracker.sigma_a, "tracker.sigma_a");
  positive(c.tracker.sigma_m, "tracker.sigma_m");
  positive(static_cast<double>(c.tracker.confirm_hits), "tracker.confirm_hits");
  positive(static_cast<double>(c.tracker.kill_misses), "tracker.kill_misses");
  positive(c.tracker.absorb_radius, "tracker.absorb_radius");
  positive(c.segmenter.epsilon, "segmenter.epsilon");
  positive(c.segmenter.min_length, "segmenter.D");
  positive(c.segmenter.max_angle_deg, "segmenter.gamma");
  positive(c.segmenter.clinic_tol, "segmenter.clinic_tol");
  positive(c.segmenter.clinic_time_window, "segmenter.clinic_time_window");
  positive(c.gait.z_torso, "gait.Z_torso");
  positive(c.gait.nms_window, "gait.nms_window");
  positive(c.gait.min_peak_gap, "gait.R");
  positive(c.gait.max_step_length, "gait.max_step_len");
  positive(c.gait.max_step_time, "gait.max_step_time");
  positive(c.reporting.heatmap_cell, "reporting.heatmap_cell");
  if (c.segmenter.max_angle_deg > 90.0) throw ConfigError("segmenter.gamma must be at most 90 degrees");
  if (!(c.gait.min_peak_gap > c.gait.nms_window / 2.0))
    throw ConfigError("gait.R must exceed nms_window / 2");
  if (c.gait.nms_window < 2.0 / c.frame_rate - 1e-9)
    throw ConfigError("gait.nms_window must span at least two frame intervals");
}

namespace {

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size()) throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v < 1.0 || v != std::floor(v) || v > 1e9) throw ConfigError(key + ": expected a positive integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key + ": expected true or false");
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"frame_rate", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.frame_rate = to_double(k, v); }},
      {"dbscan.eps", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.dbscan.eps = to_double(k, v); }},
      {"dbscan.min_pts", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.dbscan.min_pts = to_count(k, v); }},
      {"dbscan.min_cluster_size", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.dbscan.min_cluster_size = to_count(k, v); }},
      {"tracker.gate", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.gate = to_double(k, v); }},
      {"tracker.sigma_a", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.sigma_a = to_double(k, v); }},
      {"tracker.sigma_m", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.sigma_m = to_double(k, v); }},
      {"tracker.confirm_hits", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.confirm_hits = to_count(k, v); }},
      {"tracker.kill_misses", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.kill_misses = to_count(k, v); }},
      {"tracker.absorb_radius", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.tracker.absorb_radius = to_double(k, v); }},
      {"segmenter.epsilon", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.segmenter.epsilon = to_double(k, v); }},
      {"segmenter.D", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.segmenter.min_length = to_double(k, v); }},
      {"segmenter.gamma", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.segmenter.max_angle_deg = to_double(k, v); }},
      {"segmenter.clinic_tol", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.segmenter.clinic_tol = to_double(k, v); }},
      {"segmenter.clinic_time_window", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.segmenter.clinic_time_window = to_double(k, v); }},
      {"gait.Z_torso", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.gait.z_torso = to_double(k, v); }},
      {"gait.nms_window", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.gait.nms_window = to_double(k, v); }},
      {"gait.R", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.gait.min_peak_gap = to_double(k, v); }},
      {"gait.max_step_len", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.gait.max_step_length = to_double(k, v); }},
      {"gait.max_step_time", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.gait.max_step_time = to_double(k, v); }},
      {"gait.distance_mode", [](PipelineConfig& c, const std::string&, const std::string& v) { c.gait.distance_mode = distance_mode_from_string(v); }},
      {"gait.refine_peaks", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.gait.refine_peaks = to_bool(k, v); }},
      {"reporting.heatmap_cell", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.reporting.heatmap_cell = to_double(k, v); }},
  };
  return table;
}

void apply(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  PipelineConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(cfg, name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("config: nested section under '" + name + "'");
      apply(cfg, name + "." + key, leaf.data());
    }
  }
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const PipelineConfig& c) {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  std::ostringstream out;
  out << "frame_rate = " << num(c.frame_rate) << "\n\n"
      << "[dbscan]\n"
      << "eps = " << num(c.tracker.dbscan.eps) << "\n"
      << "min_pts = " << c.tracker.dbscan.min_pts << "\n"
      << "min_cluster_size = " << c.tracker.dbscan.min_cluster_size << "\n\n"
      << "[tracker]\n"
      << "gate = " << num(c.tracker.gate) << "\n"
      << "sigma_a = " << num(c.tracker.sigma_a) << "\n"
      << "sigma_m = " << num(c.tracker.sigma_m) << "\n"
      << "confirm_hits = " << c.tracker.confirm_hits << "\n"
      << "kill_misses = " << c.tracker.kill_misses << "\n"
      << "absorb_radius = " << num(c.tracker.absorb_radius) << "\n\n"
      << "[segmenter]\n"
      << "epsilon = " << num(c.segmenter.epsilon) << "\n"
      << "D = " << num(c.segmenter.min_length) << "\n"
      << "gamma = " << num(c.segmenter.max_angle_deg) << "\n"
      << "clinic_tol = " << num(c.segmenter.clinic_tol) << "\n"
      << "clinic_time_window = " << num(c.segmenter.clinic_time_window) << "\n\n"
      << "[gait]\n"
      << "Z_torso = " << num(c.gait.z_torso) << "\n"
      << "nms_window = " << num(c.gait.nms_window) << "\n"
      << "R = " << num(c.gait.min_peak_gap) << "\n"
      << "max_step_len = " << num(c.gait.max_step_length) << "\n"
      << "max_step_time = " << num(c.gait.max_step_time) << "\n"
      << "distance_mode = " << to_string(c.gait.distance_mode) << "\n"
      << "refine_peaks = " << (c.gait.refine_peaks ? "true" : "false") << "\n\n"
      << "[reporting]\n"
      << "heatmap_cell = " << num(c.reporting.heatmap_cell) << "\n";
  return out.str();
}

}  // namespace gaitpipe
