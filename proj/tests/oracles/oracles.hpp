#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "gaitpipe/pointcloud.hpp"

namespace oracle {

// --- DBSCAN ----------------------------------------------------------------
// O(n^2) DBSCAN: core points are those with at least min_pts neighbours
// (self included) within eps; clusters are connected components of cores;
// a border point joins the cluster of its nearest core, ties going to the
// lexicographically smallest (x, y, z) core.
inline std::vector<int> naive_dbscan(const std::vector<gaitpipe::RadarPoint>& p, double eps, std::size_t min_pts) {
  const std::size_t n = p.size();
  auto d2 = [&](std::size_t a, std::size_t b) {
    const double dx = p[a].x - p[b].x, dy = p[a].y - p[b].y, dz = p[a].z - p[b].z;
    return dx * dx + dy * dy + dz * dz;
  };
  const double e2 = eps * eps;
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += d2(i, j) <= e2;
    core[i] = count >= min_pts;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (core[i] && core[j] && d2(i, j) <= e2) parent[find(i)] = find(j);

  std::vector<int> label(n, -1);
  std::map<std::size_t, int> root_label;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    auto [it, fresh] = root_label.try_emplace(find(i), static_cast<int>(root_label.size()));
    label[i] = it->second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || d2(i, j) > e2) continue;
      if (best == n || d2(i, j) < d2(i, best) ||
          (d2(i, j) == d2(i, best) &&
           std::tie(p[j].x, p[j].y, p[j].z) < std::tie(p[best].x, p[best].y, p[best].z)))
        best = j;
    }
    if (best != n) label[i] = label[best];
  }
  return label;
}

// True when a and b describe the same partition (noise must match exactly).
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [i1, f1] = ab.try_emplace(a[i], b[i]);
    auto [i2, f2] = ba.try_emplace(b[i], a[i]);
    if (i1->second != b[i] || i2->second != a[i]) return false;
  }
  return true;
}

// --- Assignment --------------------------------------------------------------
// Minimum total over all injective row->column maps (rows <= cols) or
// column->row maps otherwise.
inline double brute_force_assignment(const std::vector<std::vector<double>>& c) {
  const std::size_t r = c.size();
  const std::size_t k = r ? c[0].size() : 0;
  if (r == 0 || k == 0) return 0.0;
  const bool by_rows = r <= k;
  const std::size_t small = by_rows ? r : k, big = by_rows ? k : r;
  std::vector<std::size_t> perm(big);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small; ++i) total += by_rows ? c[i][perm[i]] : c[perm[i]][i];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// --- Geometry ----------------------------------------------------------------
inline double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Angle in degrees at the radially farther endpoint between the direction
// to the radar and the direction along the segment.
inline double radial_angle_deg(double x0, double y0, double x1, double y1) {
  const bool first_far = x0 * x0 + y0 * y0 >= x1 * x1 + y1 * y1;
  const double fx = first_far ? x0 : x1, fy = first_far ? y0 : y1;
  const double nx = first_far ? x1 : x0, ny = first_far ? y1 : y0;
  const double ux = -fx, uy = -fy;            // far endpoint -> radar
  const double vx = nx - fx, vy = ny - fy;    // far endpoint -> near endpoint
  return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy) * 180.0 / 3.14159265358979323846;
}

// --- ICC -----------------------------------------------------------------------
struct Anova {
  double msr, msc, mse;
};

// Mean squares from explicit sums, residuals formed cell by cell.
inline Anova explicit_anova(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size(), k = m[0].size();
  long double grand = 0;
  std::vector<long double> rmean(n, 0), cmean(k, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      grand += m[i][j];
      rmean[i] += m[i][j];
      cmean[j] += m[i][j];
    }
  grand /= static_cast<long double>(n * k);
  for (auto& v : rmean) v /= k;
  for (auto& v : cmean) v /= n;
  long double ssr = 0, ssc = 0, sse = 0;
  for (std::size_t i = 0; i < n; ++i) ssr += (rmean[i] - grand) * (rmean[i] - grand);
  for (std::size_t j = 0; j < k; ++j) ssc += (cmean[j] - grand) * (cmean[j] - grand);
  ssr *= k;
  ssc *= n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const long double e = m[i][j] - rmean[i] - cmean[j] + grand;
      sse += e * e;
    }
  return {static_cast<double>(ssr / (n - 1)), static_cast<double>(ssc / (k - 1)),
          static_cast<double>(sse / ((n - 1) * (k - 1)))};
}

inline double icc2k(const std::vector<std::vector<double>>& m) {
  const Anova a = explicit_anova(m);
  const double n = static_cast<double>(m.size());
  return (a.msr - a.mse) / (a.msr + (a.msc - a.mse) / n);
}

inline double icc3k(const std::vector<std::vector<double>>& m) {
  const Anova a = explicit_anova(m);
  return (a.msr - a.mse) / a.msr;
}

}  // namespace oracle
