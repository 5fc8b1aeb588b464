#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "gaitpipe/kernels.hpp"

using namespace gaitpipe;
namespace k = gaitpipe::kernels;

namespace {

struct Cloud {
  std::vector<double> x, y, z, s;
};

Cloud random_cloud(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x.push_back(u(rng));
    c.y.push_back(u(rng) + 3.0);
    c.z.push_back(u(rng) / 3.0);
    c.s.push_back(u(rng));
  }
  // exact duplicates and boundary values exercise tie handling
  if (n > 4) {
    c.x[n - 1] = c.x[0];
    c.y[n - 1] = c.y[0];
    c.z[n - 1] = c.z[0];
    c.z[1] = 0.25;
    c.z[2] = -0.25;
    c.s[3] = 0.0;
  }
  return c;
}

}  // namespace

TEST_CASE("dispatch honours the environment override") {
  const char* forced = std::getenv("GAITPIPE_FORCE_SCALAR");
  if (forced && *forced && std::string(forced) != "0") CHECK(k::active() == k::Isa::scalar);
  else CHECK(k::active() == k::best_available());
  MESSAGE("active kernels: " << k::to_string(k::active()));
}

TEST_CASE("radius query matches a direct scan") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 301u}) {
    const Cloud c = random_cloud(rng, n);
    for (std::size_t q = 0; q < std::min<std::size_t>(n, 10); ++q) {
      const double eps2 = 0.16;
      std::vector<std::uint32_t> got;
      k::radius_query(c.x, c.y, c.z, c.x[q], c.y[q], c.z[q], eps2, got);
      std::vector<std::uint32_t> want;
      for (std::size_t j = 0; j < n; ++j) {
        const double dx = c.x[j] - c.x[q], dy = c.y[j] - c.y[q], dz = c.z[j] - c.z[q];
        if (dx * dx + dy * dy + dz * dz <= eps2) want.push_back(static_cast<std::uint32_t>(j));
      }
      CHECK(got == want);
    }
  }
}

#if GAITPIPE_HAVE_AVX2_KERNELS
TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (k::best_available() != k::Isa::avx2) {
    MESSAGE("AVX2 not available on this CPU; skipped");
    return;
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = rng() % 90;
    const Cloud c = random_cloud(rng, n);

    const double cx = u(rng), cy = u(rng) + 3.0, cz = u(rng) / 3.0, eps2 = std::abs(u(rng));
    std::vector<std::uint32_t> a, b;
    k::scalar::radius_query(c.x, c.y, c.z, cx, cy, cz, eps2, a);
    k::avx2::radius_query(c.x, c.y, c.z, cx, cy, cz, eps2, b);
    CHECK(a == b);

    const std::size_t first = n ? rng() % n : 0;
    const std::size_t last = n ? first + rng() % (n - first + 1) : 0;
    const double ax = u(rng), ay = u(rng), bx = rep % 7 == 0 ? ax : u(rng), by = rep % 7 == 0 ? ay : u(rng);
    const k::Farthest fa = k::scalar::farthest_from_segment(c.x, c.y, first, last, ax, ay, bx, by);
    const k::Farthest fb = k::avx2::farthest_from_segment(c.x, c.y, first, last, ax, ay, bx, by);
    CHECK(fa.index == fb.index);
    CHECK(fa.dist2 == fb.dist2);  // bit-identical

    const double alpha = rep % 2 ? 1.0 : -1.0;
    const k::GatedSum ga = k::scalar::torso_gate_sum(c.z, c.s, 0.25, alpha);
    const k::GatedSum gb = k::avx2::torso_gate_sum(c.z, c.s, 0.25, alpha);
    CHECK(ga.count == gb.count);
    CHECK(ga.sum == doctest::Approx(gb.sum).epsilon(1e-12));
  }
}
#endif

TEST_CASE("farthest vertex ties resolve to the lowest index") {
  const std::vector<double> xs{0.0, 1.0, 1.0, 2.0, 1.0};
  const std::vector<double> ys{0.0, 1.0, -1.0, 0.0, 1.0};
  for (k::Isa isa : {k::Isa::scalar, k::best_available()}) {
    k::set_active(isa);
    const k::Farthest f = k::farthest_from_segment(xs, ys, 1, 4, 0.0, 0.0, 2.0, 0.0);
    CHECK(f.index == 1);
    CHECK(f.dist2 == 1.0);
    CHECK(k::farthest_from_segment(xs, ys, 2, 2, 0.0, 0.0, 2.0, 0.0).dist2 == -1.0);
  }
}

TEST_CASE("torso gate applies the elevation band and the sign") {
  const std::vector<double> zs{0.1, 0.3, 0.0, 0.25, -0.25};
  const std::vector<double> ss{-1.2, -1.2, 0.4, -0.5, -0.3};
  const k::GatedSum g = k::torso_gate_sum(zs, ss, 0.25, -1.0);
  CHECK(g.count == 3);
  CHECK(g.sum == doctest::Approx(-2.0));
}
