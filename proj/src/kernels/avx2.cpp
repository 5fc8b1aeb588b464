#include "gaitpipe/kernels.hpp"

#if GAITPIPE_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <algorithm>
#include <bit>

// Only the functions below carry the avx2 target; inline library code
// instantiated here stays baseline so the linker never hands AVX2 code to
// the scalar path.
#define GAITPIPE_AVX2 __attribute__((target("avx2")))

namespace gaitpipe::kernels::avx2 {

GAITPIPE_AVX2
void radius_query(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> zs, double cx, double cy, double cz, double eps2,
                  std::vector<std::uint32_t>& out) {
  const std::size_t n = xs.size();
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vcz = _mm256_set1_pd(cz);
  const __m256d veps2 = _mm256_set1_pd(eps2);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + j), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + j), vcy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs.data() + j), vcz);
    const __m256d d2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    unsigned bits = static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(d2, veps2, _CMP_LE_OQ)));
    while (bits) {
      out.push_back(static_cast<std::uint32_t>(j + std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  for (; j < n; ++j) {
    const double dx = xs[j] - cx;
    const double dy = ys[j] - cy;
    const double dz = zs[j] - cz;
    const double d2 = (dx * dx + dy * dy) + dz * dz;
    if (d2 <= eps2) out.push_back(static_cast<std::uint32_t>(j));
  }
}

GAITPIPE_AVX2
Farthest farthest_from_segment(std::span<const double> xs, std::span<const double> ys,
                               std::size_t first, std::size_t last, double ax, double ay,
                               double bx, double by) {
  const double ex = bx - ax;
  const double ey = by - ay;
  const double len2 = ex * ex + ey * ey;
  const bool project = len2 > 0.0;

  const __m256d vax = _mm256_set1_pd(ax);
  const __m256d vay = _mm256_set1_pd(ay);
  const __m256d vex = _mm256_set1_pd(ex);
  const __m256d vey = _mm256_set1_pd(ey);
  const __m256d vlen2 = _mm256_set1_pd(project ? len2 : 1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  // Per-lane running maximum; strict compare keeps the earliest index.
  __m256d best_d2 = _mm256_set1_pd(-1.0);
  __m256i best_idx = _mm256_setzero_si256();
  __m256i idx = _mm256_setr_epi64x(static_cast<long long>(first), static_cast<long long>(first + 1),
                                   static_cast<long long>(first + 2),
                                   static_cast<long long>(first + 3));
  const __m256i step = _mm256_set1_epi64x(4);

  std::size_t i = first;
  for (; i + 4 <= last; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), vax);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), vay);
    __m256d t = zero;
    if (project) {
      t = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(dx, vex), _mm256_mul_pd(dy, vey)), vlen2);
      t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
    }
    const __m256d px = _mm256_sub_pd(dx, _mm256_mul_pd(t, vex));
    const __m256d py = _mm256_sub_pd(dy, _mm256_mul_pd(t, vey));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(px, px), _mm256_mul_pd(py, py));
    const __m256d gt = _mm256_cmp_pd(d2, best_d2, _CMP_GT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, gt);
    best_idx = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), gt));
    idx = _mm256_add_epi64(idx, step);
  }

  alignas(32) double lane_d2[4];
  alignas(32) long long lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_idx), best_idx);

  Farthest best;
  for (int k = 0; k < 4; ++k) {
    const auto li = static_cast<std::size_t>(lane_idx[k]);
    if (lane_d2[k] > best.dist2 || (lane_d2[k] == best.dist2 && lane_d2[k] >= 0.0 && li < best.index)) {
      best.dist2 = lane_d2[k];
      best.index = li;
    }
  }
  for (; i < last; ++i) {
    const double dx = xs[i] - ax;
    const double dy = ys[i] - ay;
    double t = 0.0;
    if (project) t = std::min(std::max((dx * ex + dy * ey) / len2, 0.0), 1.0);
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

GAITPIPE_AVX2
GatedSum torso_gate_sum(std::span<const double> zs, std::span<const double> ss, double z_limit,
                        double alpha) {
  const std::size_t n = zs.size();
  const __m256d lo = _mm256_set1_pd(-z_limit);
  const __m256d hi = _mm256_set1_pd(z_limit);
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t count = 0;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z = _mm256_loadu_pd(zs.data() + i);
    const __m256d s = _mm256_loadu_pd(ss.data() + i);
    __m256d keep = _mm256_and_pd(_mm256_cmp_pd(z, lo, _CMP_GE_OQ), _mm256_cmp_pd(z, hi, _CMP_LE_OQ));
    keep = _mm256_and_pd(keep, _mm256_cmp_pd(_mm256_mul_pd(va, s), zero, _CMP_GT_OQ));
    acc = _mm256_add_pd(acc, _mm256_and_pd(keep, s));
    count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(keep))));
  }

  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  GatedSum out;
  out.sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  out.count = count;
  for (; i < n; ++i) {
    if (zs[i] >= -z_limit && zs[i] <= z_limit && alpha * ss[i] > 0.0) {
      out.sum += ss[i];
      ++out.count;
    }
  }
  return out;
}

}  // namespace gaitpipe::kernels::avx2

#endif
