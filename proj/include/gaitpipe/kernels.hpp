#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a scalar
// reference and an AVX2 variant; the dispatched entry points pick the best
// variant supported by the running CPU. Radius queries and farthest-vertex
// searches are bit-identical across variants (same operation order, no FMA
// contraction); gated sums agree to rounding (different summation order).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gaitpipe::kernels {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

/// Best variant this CPU supports.
Isa best_available();

/// Variant used by the dispatched entry points. Defaults to best_available()
/// unless GAITPIPE_FORCE_SCALAR is set in the environment.
Isa active();
void set_active(Isa isa);

struct Farthest {
  std::size_t index = 0;
  double dist2 = -1.0;  // squared distance; -1 when the range is empty
};

struct GatedSum {
  double sum = 0.0;
  std::size_t count = 0;
};

/// Appends to `out`, in increasing order, every j with
/// (x_j-cx)^2 + (y_j-cy)^2 + (z_j-cz)^2 <= eps2.
void radius_query(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> zs, double cx, double cy, double cz, double eps2,
                  std::vector<std::uint32_t>& out);

/// Among indices [first, last), the vertex farthest from the closed segment
/// (ax,ay)-(bx,by). Ties resolve to the lowest index.
Farthest farthest_from_segment(std::span<const double> xs, std::span<const double> ys,
                               std::size_t first, std::size_t last, double ax, double ay,
                               double bx, double by);

/// Sum and count of s over entries with -z_limit <= z <= z_limit and
/// alpha * s > 0.
GatedSum torso_gate_sum(std::span<const double> zs, std::span<const double> ss, double z_limit,
                        double alpha);

namespace scalar {
void radius_query(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> zs, double cx, double cy, double cz, double eps2,
                  std::vector<std::uint32_t>& out);
Farthest farthest_from_segment(std::span<const double> xs, std::span<const double> ys,
                               std::size_t first, std::size_t last, double ax, double ay,
                               double bx, double by);
GatedSum torso_gate_sum(std::span<const double> zs, std::span<const double> ss, double z_limit,
                        double alpha);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define GAITPIPE_HAVE_AVX2_KERNELS 1
namespace avx2 {
void radius_query(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> zs, double cx, double cy, double cz, double eps2,
                  std::vector<std::uint32_t>& out);
Farthest farthest_from_segment(std::span<const double> xs, std::span<const double> ys,
                               std::size_t first, std::size_t last, double ax, double ay,
                               double bx, double by);
GatedSum torso_gate_sum(std::span<const double> zs, std::span<const double> ss, double z_limit,
                        double alpha);
}  // namespace avx2
#else
#define GAITPIPE_HAVE_AVX2_KERNELS 0
#endif

}  // namespace gaitpipe::kernels
