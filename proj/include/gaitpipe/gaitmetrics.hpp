#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gaitpipe/segmenter.hpp"

namespace gaitpipe {

enum class DistanceMode { track_displacement, doppler_integral };

struct GaitConfig {
  double z_torso = 0.25;       // m; torso band is [-z_torso, z_torso] around the mount height
  double nms_window = 0.4;     // s, centred window
  double min_peak_gap = 0.3;   // R, s
  double max_step_length = 1.0;  // m
  double max_step_time = 3.0;    // s
  DistanceMode distance_mode = DistanceMode::track_displacement;
  bool refine_peaks = false;   // parabolic sub-sample peak times
};

struct TorsoSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;  // |mean torso Doppler|
  std::size_t n_points = 0;
};

struct TorsoSpeedSeries {
  std::vector<TorsoSample> samples;
  int alpha = 1;  // -1 approaching the radar, +1 receding
};

struct Peak {
  std::size_t sample = 0;  // index into the series
  double t = 0.0;          // sample time, or refined time when enabled
};

struct StepMeasurement {
  double step_length = 0.0;
  double step_time = 0.0;
  double t_peak_a = 0.0;
  double t_peak_b = 0.0;
};

struct WalkResult {
  std::uint32_t track_id = 0;
  std::size_t seg_index = 0;
  double t_start = 0.0;
  int direction = 1;
  std::size_t n_peaks = 0;
  std::vector<StepMeasurement> steps;
  std::optional<double> avg_step_length;
};

/// Torso Doppler speed per state of a segment. Points must lie in the
/// elevation band and move in the walking direction (sign gate against the
/// arm swing). States without qualifying points are omitted. An empty
/// series means the segment cannot be analysed.
TorsoSpeedSeries torso_speed(const LinearSegment& segment, double z_torso);

/// Non-maximum suppression over a centred time window (samples whose window
/// is not fully covered by the series are skipped), then greedy acceptance
/// by descending speed with a minimum gap of `min_peak_gap` seconds. Ties in
/// speed go to the earlier sample. Returned in time order.
std::vector<Peak> detect_peaks(const TorsoSpeedSeries& series, double nms_window, double min_peak_gap,
                               bool refine = false);

/// Consecutive peak pairs become steps; steps longer than max_step_length or
/// slower than max_step_time are discarded. The average needs two steps.
WalkResult measure_steps(const LinearSegment& segment, const TorsoSpeedSeries& series,
                         std::span<const Peak> peaks, const GaitConfig& cfg);

/// torso_speed -> detect_peaks -> measure_steps.
WalkResult analyse_segment(const LinearSegment& segment, const GaitConfig& cfg);

}  // namespace gaitpipe
