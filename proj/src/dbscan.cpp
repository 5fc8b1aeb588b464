#include <algorithm>
#include <limits>
#include <tuple>

#include "gaitpipe/kernels.hpp"
#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

namespace {

double dist2(const RadarPoint& a, const RadarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return (dx * dx + dy * dy) + dz * dz;
}

// Order-free preference between two equidistant core points.
bool coord_less(const RadarPoint& a, const RadarPoint& b) {
  return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
}

}  // namespace

std::vector<int> dbscan_labels(std::span<const RadarPoint> points, double eps, std::size_t min_pts) {
  const std::size_t n = points.size();
  std::vector<int> labels(n, -1);
  if (n == 0) return labels;

  std::vector<double> xs(n), ys(n), zs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
    zs[i] = points[i].z;
  }

  const double eps2 = eps * eps;
  std::vector<std::vector<std::uint32_t>> neighbours(n);
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::radius_query(xs, ys, zs, xs[i], ys[i], zs[i], eps2, neighbours[i]);
    core[i] = neighbours[i].size() >= min_pts;
  }

  // Core points: connected components of the core-core eps graph.
  int next_label = 0;
  std::vector<std::uint32_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || labels[seed] != -1) continue;
    const int label = next_label++;
    labels[seed] = label;
    stack.assign(1, static_cast<std::uint32_t>(seed));
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      for (std::uint32_t q : neighbours[p]) {
        if (core[q] && labels[q] == -1) {
          labels[q] = label;
          stack.push_back(q);
        }
      }
    }
  }

  // Border points join the cluster of the nearest core neighbour.
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_core = n;
    for (std::uint32_t q : neighbours[i]) {
      if (!core[q]) continue;
      const double d2 = dist2(points[i], points[q]);
      if (d2 < best || (d2 == best && coord_less(points[q], points[best_core]))) {
        best = d2;
        best_core = q;
      }
    }
    if (best_core != n) labels[i] = labels[best_core];
  }
  return labels;
}

std::vector<Detection> dbscan(std::span<const RadarPoint> points, double t, const DbscanConfig& cfg) {
  const std::vector<int> labels = dbscan_labels(points, cfg.eps, cfg.min_pts);
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

  std::vector<Detection> clusters(static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] >= 0) clusters[static_cast<std::size_t>(labels[i])].points.push_back(points[i]);
  }

  std::vector<Detection> out;
  for (Detection& c : clusters) {
    if (c.points.size() < cfg.min_cluster_size || c.points.empty()) continue;
    double sx = 0.0, sy = 0.0;
    for (const RadarPoint& p : c.points) {
      sx += p.x;
      sy += p.y;
    }
    const auto m = static_cast<double>(c.points.size());
    c.centroid_x = sx / m;
    c.centroid_y = sy / m;
    c.t = t;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace gaitpipe
