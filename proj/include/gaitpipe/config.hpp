#pragma once

#include <filesystem>
#include <string>

#include "gaitpipe/gaitmetrics.hpp"
#include "gaitpipe/segmenter.hpp"
#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

struct ReportingConfig {
  double heatmap_cell = 0.25;  // m
};

struct PipelineConfig {
  double frame_rate = 10.0;  // expected; sessions carry their own
  TrackerConfig tracker;     // includes the DBSCAN block
  SegmenterConfig segmenter;
  GaitConfig gait;
  ReportingConfig reporting;
};

/// Throws ConfigError: every numeric parameter must be positive, R must
/// exceed half the NMS window and the window must span at least two frames.
void validate(const PipelineConfig& cfg);

/// INI-style text:
///
///   frame_rate = 10
///   [dbscan]     eps, min_pts, min_cluster_size
///   [tracker]    gate, sigma_a, sigma_m, confirm_hits, kill_misses, absorb_radius
///   [segmenter]  epsilon, D, gamma, clinic_tol, clinic_time_window
///   [gait]       Z_torso, nms_window, R, max_step_len, max_step_time,
///                distance_mode, refine_peaks
///   [reporting]  heatmap_cell
///
/// Missing keys keep their defaults; unknown keys are rejected. The result is
/// validated.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Every key written out explicitly; parse_config(format_config(c)) == c.
std::string format_config(const PipelineConfig& cfg);

const char* to_string(DistanceMode mode);
DistanceMode distance_mode_from_string(const std::string& text);

}  // namespace gaitpipe
