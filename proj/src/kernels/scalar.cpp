#include "gaitpipe/kernels.hpp"

#include <algorithm>

namespace gaitpipe::kernels::scalar {

void radius_query(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> zs, double cx, double cy, double cz, double eps2,
                  std::vector<std::uint32_t>& out) {
  const std::size_t n = xs.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = xs[j] - cx;
    const double dy = ys[j] - cy;
    const double dz = zs[j] - cz;
    const double d2 = (dx * dx + dy * dy) + dz * dz;
    if (d2 <= eps2) out.push_back(static_cast<std::uint32_t>(j));
  }
}

Farthest farthest_from_segment(std::span<const double> xs, std::span<const double> ys,
                               std::size_t first, std::size_t last, double ax, double ay,
                               double bx, double by) {
  Farthest best;
  const double ex = bx - ax;
  const double ey = by - ay;
  const double len2 = ex * ex + ey * ey;
  for (std::size_t i = first; i < last; ++i) {
    const double dx = xs[i] - ax;
    const double dy = ys[i] - ay;
    double t = 0.0;
    if (len2 > 0.0) t = std::min(std::max((dx * ex + dy * ey) / len2, 0.0), 1.0);
    const double px = dx - t * ex;
    const double py = dy - t * ey;
    const double d2 = px * px + py * py;
    if (d2 > best.dist2) {
      best.dist2 = d2;
      best.index = i;
    }
  }
  return best;
}

GatedSum torso_gate_sum(std::span<const double> zs, std::span<const double> ss, double z_limit,
                        double alpha) {
  GatedSum acc;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (zs[i] >= -z_limit && zs[i] <= z_limit && alpha * ss[i] > 0.0) {
      acc.sum += ss[i];
      ++acc.count;
    }
  }
  return acc;
}

}  // namespace gaitpipe::kernels::scalar
