#include "gaitpipe/gaitmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitpipe/kernels.hpp"

namespace gaitpipe {

namespace {

constexpr double kTimeTol = 1e-6;

// Position at time t on the series, linear between samples.
std::pair<double, double> position_at(const TorsoSpeedSeries& series, const Peak& p) {
  const auto& s = series.samples;
  const TorsoSample& a = s[p.sample];
  if (p.t == a.t) return {a.x, a.y};
  const std::size_t j = p.t > a.t ? p.sample + 1 : p.sample - 1;
  const TorsoSample& b = s[j];
  const double w = (p.t - a.t) / (b.t - a.t);
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
}

double doppler_distance(const TorsoSpeedSeries& series, std::size_t i, std::size_t j) {
  double dist = 0.0;
  for (std::size_t k = i; k < j; ++k) {
    const TorsoSample& a = series.samples[k];
    const TorsoSample& b = series.samples[k + 1];
    dist += 0.5 * (a.v + b.v) * (b.t - a.t);
  }
  return dist;
}

}  // namespace

TorsoSpeedSeries torso_speed(const LinearSegment& segment, double z_torso) {
  TorsoSpeedSeries series;
  series.alpha = segment.geometry.r_end < segment.geometry.r_start ? -1 : 1;

  std::vector<double> zs, ss;
  for (const TrackState& state : segment.states) {
    zs.clear();
    ss.clear();
    for (const RadarPoint& p : state.points) {
      zs.push_back(p.z);
      ss.push_back(p.s);
    }
    const kernels::GatedSum g =
        kernels::torso_gate_sum(zs, ss, z_torso, static_cast<double>(series.alpha));
    if (g.count == 0) continue;
    series.samples.push_back(
        {state.t, state.x, state.y, std::abs(g.sum / static_cast<double>(g.count)), g.count});
  }
  return series;
}

std::vector<Peak> detect_peaks(const TorsoSpeedSeries& series, double nms_window, double min_peak_gap,
                               bool refine) {
  const auto& s = series.samples;
  std::vector<std::size_t> candidates;
  if (s.empty()) return {};
  const double half = nms_window / 2.0;

  // endpoints are never peaks; windows near the ends are truncated
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    bool is_max = true;
    for (std::size_t k = i; k-- > 0 && s[i].t - s[k].t <= half + kTimeTol;) {
      if (s[k].v >= s[i].v) {  // an equal earlier sample wins
        is_max = false;
        break;
      }
    }
    for (std::size_t k = i + 1; is_max && k < s.size() && s[k].t - s[i].t <= half + kTimeTol; ++k) {
      if (s[k].v > s[i].v) is_max = false;
    }
    if (is_max) candidates.push_back(i);
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return s[a].v > s[b].v; });
  std::vector<std::size_t> accepted;
  for (std::size_t c : candidates) {
    const bool clear = std::all_of(accepted.begin(), accepted.end(), [&](std::size_t a) {
      return std::abs(s[c].t - s[a].t) >= min_peak_gap - kTimeTol;
    });
    if (clear) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end());

  std::vector<Peak> peaks;
  peaks.reserve(accepted.size());
  for (std::size_t i : accepted) {
    Peak p{i, s[i].t};
    if (refine && i > 0 && i + 1 < s.size()) {
      const double denom = s[i - 1].v - 2.0 * s[i].v + s[i + 1].v;
      if (denom < 0.0) {
        const double delta = std::clamp(0.5 * (s[i - 1].v - s[i + 1].v) / denom, -0.5, 0.5);
        const double h = delta >= 0.0 ? s[i + 1].t - s[i].t : s[i].t - s[i - 1].t;
        p.t = s[i].t + delta * h;
      }
    }
    peaks.push_back(p);
  }
  return peaks;
}

WalkResult measure_steps(const LinearSegment& segment, const TorsoSpeedSeries& series,
                         std::span<const Peak> peaks, const GaitConfig& cfg) {
  WalkResult result;
  result.track_id = segment.parent_track;
  result.seg_index = segment.seg_index;
  result.t_start = segment.states.empty() ? 0.0 : segment.t_start();
  result.direction = series.alpha;
  result.n_peaks = peaks.size();

  for (std::size_t k = 0; k + 1 < peaks.size(); ++k) {
    const Peak& a = peaks[k];
    const Peak& b = peaks[k + 1];
    StepMeasurement step;
    step.t_peak_a = a.t;
    step.t_peak_b = b.t;
    step.step_time = b.t - a.t;
    if (cfg.distance_mode == DistanceMode::track_displacement) {
      const auto [xa, ya] = position_at(series, a);
      const auto [xb, yb] = position_at(series, b);
      step.step_length = std::hypot(xb - xa, yb - ya);
    } else {
      step.step_length = doppler_distance(series, a.sample, b.sample);
    }
    if (step.step_length <= 0.0 || step.step_length > cfg.max_step_length ||
        step.step_time > cfg.max_step_time)
      continue;
    result.steps.push_back(step);
  }

  if (result.steps.size() >= 2) {
    double sum = 0.0;
    for (const StepMeasurement& st : result.steps) sum += st.step_length;
    result.avg_step_length = sum / static_cast<double>(result.steps.size());
  }
  return result;
}

WalkResult analyse_segment(const LinearSegment& segment, const GaitConfig& cfg) {
  const TorsoSpeedSeries series = torso_speed(segment, cfg.z_torso);
  const std::vector<Peak> peaks =
      detect_peaks(series, cfg.nms_window, cfg.min_peak_gap, cfg.refine_peaks);
  return measure_steps(segment, series, peaks, cfg);
}

}  // namespace gaitpipe
