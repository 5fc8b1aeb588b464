#include "gaitpipe/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "gaitpipe/errors.hpp"
#include "gaitpipe/kernels.hpp"

namespace gaitpipe {

std::vector<std::size_t> rdp_decimate(std::span<const Eigen::Vector2d> polyline, double epsilon) {
  const std::size_t n = polyline.size();
  if (n < 2) throw DegenerateInputError("rdp_decimate needs at least two vertices");
  if (!(epsilon > 0.0)) throw DegenerateInputError("rdp_decimate needs epsilon > 0");

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = polyline[i].x();
    ys[i] = polyline[i].y();
  }

  const double eps2 = epsilon * epsilon;
  std::vector<char> keep(n, 0);
  keep.front() = keep.back() = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    if (b - a < 2) continue;
    const kernels::Farthest f =
        kernels::farthest_from_segment(xs, ys, a + 1, b, xs[a], ys[a], xs[b], ys[b]);
    if (f.dist2 > eps2) {
      keep[f.index] = 1;
      stack.emplace_back(f.index, b);
      stack.emplace_back(a, f.index);
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) kept.push_back(i);
  return kept;
}

SegmentGeometry segment_geometry(double x0, double y0, double xn, double yn) {
  SegmentGeometry g;
  const double r0_sq = x0 * x0 + y0 * y0;
  const double rn_sq = xn * xn + yn * yn;
  g.r_start = std::sqrt(r0_sq);
  g.r_end = std::sqrt(rn_sq);
  const double dx = x0 - xn;
  const double dy = y0 - yn;
  const double d_sq = dx * dx + dy * dy;
  g.d = std::sqrt(d_sq);
  if (g.d == 0.0) return g;

  const double far_sq = std::max(r0_sq, rn_sq);
  const double near_sq = std::min(r0_sq, rn_sq);
  const double far = std::sqrt(far_sq);
  double c = (far_sq + d_sq - near_sq) / (2.0 * g.d * far);
  c = std::clamp(c, -1.0, 1.0);
  g.theta_deg = std::acos(c) * (180.0 / std::numbers::pi);
  return g;
}

SegmentGeometry segment_geometry(const LinearSegment& segment) {
  const TrackState& a = segment.states.front();
  const TrackState& b = segment.states.back();
  return segment_geometry(a.x, a.y, b.x, b.y);
}

bool classify(const SegmentGeometry& geometry, double min_length, double max_angle_deg) {
  return geometry.theta_deg.has_value() && geometry.d >= min_length &&
         *geometry.theta_deg <= max_angle_deg;
}

namespace {

LinearSegment make_segment(const Track& track, std::size_t seg_index, std::size_t first,
                           std::size_t last, const SegmenterConfig& cfg) {
  LinearSegment seg;
  seg.parent_track = track.id;
  seg.seg_index = seg_index;
  seg.states.assign(track.states.begin() + static_cast<std::ptrdiff_t>(first),
                    track.states.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  seg.geometry = segment_geometry(seg);
  seg.valid = classify(seg.geometry, cfg.min_length, cfg.max_angle_deg);
  return seg;
}

}  // namespace

std::vector<LinearSegment> split_track(const Track& track, const SegmenterConfig& cfg) {
  std::vector<LinearSegment> out;
  if (track.states.size() < 2) return out;

  std::vector<Eigen::Vector2d> line;
  line.reserve(track.states.size());
  for (const TrackState& s : track.states) line.emplace_back(s.x, s.y);

  const std::vector<std::size_t> kept = rdp_decimate(line, cfg.epsilon);
  for (std::size_t k = 0; k + 1 < kept.size(); ++k)
    out.push_back(make_segment(track, k, kept[k], kept[k + 1], cfg));
  return out;
}

std::vector<ClinicMatch> match_clinic_walks(std::span<const Track> tracks, const WalkLog& log,
                                            const SegmenterConfig& cfg) {
  struct Run {
    bool at_start;  // near g_s (true) or g_e (false)
    std::size_t best;
  };

  // Candidate slices: a pass near g_s directly followed by a pass near g_e.
  std::vector<LinearSegment> candidates;
  for (const Track& track : tracks) {
    std::vector<Run> runs;
    int prev_kind = 0;  // 0 none, 1 near g_s, 2 near g_e
    for (std::size_t j = 0; j < track.states.size(); ++j) {
      const Eigen::Vector2d p(track.states[j].x, track.states[j].y);
      const double ds = (p - log.g_s).norm();
      const double de = (p - log.g_e).norm();
      const int kind = ds <= cfg.clinic_tol ? 1 : (de <= cfg.clinic_tol ? 2 : 0);
      if (kind != 0) {
        const double dist = kind == 1 ? ds : de;
        if (kind != prev_kind) {
          runs.push_back({kind == 1, j});
        } else {
          const TrackState& b = track.states[runs.back().best];
          const Eigen::Vector2d target = kind == 1 ? log.g_s : log.g_e;
          if (dist < (Eigen::Vector2d(b.x, b.y) - target).norm()) runs.back().best = j;
        }
      }
      prev_kind = kind;
    }
    std::size_t seg_index = 0;
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      if (runs[k].at_start && !runs[k + 1].at_start && runs[k].best < runs[k + 1].best)
        candidates.push_back(make_segment(track, seg_index++, runs[k].best, runs[k + 1].best, cfg));
    }
  }

  std::vector<ClinicMatch> out;
  out.reserve(log.entries.size());
  for (const WalkEntry& walk : log.entries) {
    ClinicMatch m{walk, std::nullopt};
    double best = cfg.clinic_time_window;
    for (const LinearSegment& c : candidates) {
      const double dt = std::abs(c.t_start() - walk.t_start);
      if (dt < best || (dt == best && !m.segment)) {
        best = dt;
        m.segment = c;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace gaitpipe
