#include <atomic>
#include <cstdlib>

#include "gaitpipe/kernels.hpp"

namespace gaitpipe::kernels {

namespace {

Isa initial_isa() {
  if (std::getenv("GAITPIPE_FORCE_SCALAR") != nullptr) return Isa::scalar;
  return best_available();
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa best_available() {
#if GAITPIPE_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  return has_avx2 ? Isa::avx2 : Isa::scalar;
#else
  return Isa::scalar;
#endif
}

Isa active() { return active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  if (isa == Isa::avx2 && best_available() != Isa::avx2) isa = Isa::scalar;
  active_slot().store(isa, std::memory_order_relaxed);
}

void radius_query(std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> zs, double cx, double cy, double cz, double eps2,
                  std::vector<std::uint32_t>& out) {
#if GAITPIPE_HAVE_AVX2_KERNELS
  if (active() == Isa::avx2) return avx2::radius_query(xs, ys, zs, cx, cy, cz, eps2, out);
#endif
  scalar::radius_query(xs, ys, zs, cx, cy, cz, eps2, out);
}

Farthest farthest_from_segment(std::span<const double> xs, std::span<const double> ys,
                               std::size_t first, std::size_t last, double ax, double ay,
                               double bx, double by) {
#if GAITPIPE_HAVE_AVX2_KERNELS
  if (active() == Isa::avx2) return avx2::farthest_from_segment(xs, ys, first, last, ax, ay, bx, by);
#endif
  return scalar::farthest_from_segment(xs, ys, first, last, ax, ay, bx, by);
}

GatedSum torso_gate_sum(std::span<const double> zs, std::span<const double> ss, double z_limit,
                        double alpha) {
#if GAITPIPE_HAVE_AVX2_KERNELS
  if (active() == Isa::avx2) return avx2::torso_gate_sum(zs, ss, z_limit, alpha);
#endif
  return scalar::torso_gate_sum(zs, ss, z_limit, alpha);
}

}  // namespace gaitpipe::kernels
