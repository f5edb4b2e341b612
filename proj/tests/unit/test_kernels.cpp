#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "lse/kernels.hpp"
#include "lse/reference.hpp"
#include "lse/spectrum.hpp"

using namespace lse;
using kernels::Backend;

namespace {

double rel(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

struct Arrays {
  std::vector<double> mu, L, R, P, O, A;
  std::vector<double> e, i, c;
  explicit Arrays(std::size_t n) : mu(n), L(n), R(n), P(n), O(n), A(n), e(n), i(n), c(n) {}
  kernels::ChannelInputs in() const { return {mu, L, R, P, O, A}; }
  kernels::ChannelOutputs out() { return {e, i, c}; }
};

Arrays random_arrays(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Arrays a(n);
  for (std::size_t k = 0; k < n; ++k) {
    a.mu[k] = 2.5 + u(rng);
    a.L[k] = 10 * u(rng);
    a.R[k] = 10 * u(rng);
    a.P[k] = 1e-3 + u(rng);
    a.O[k] = 5 * u(rng);
    a.A[k] = u(rng);
  }
  return a;
}

kernels::ChannelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  kernels::ChannelParams p;
  p.w_sc = u(rng);
  p.w_re = u(rng);
  p.w_tr = u(rng);
  p.w_p = 0.05 + u(rng);
  p.C = u(rng);
  p.dos_center = 3.0;
  p.dos_inv_two_var = 1.0 / (2 * 0.02);
  p.dos_norm = 2.8;
  p.re_count = 3.0 * u(rng);
  p.include_gel = u(rng) < 0.8;
  p.gel_self_consistent = u(rng) < 0.5;
  p.gel_t_lsc = u(rng);
  p.gel_alpha = u(rng);
  p.hw_optical = 0.09;
  p.hw_acoustic = 0.02;
  p.steady_state = u(rng) < 0.5;
  p.time = 5 * u(rng);
  return p;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("backend names") {
    CHECK(kernels::to_string(Backend::Scalar) == "scalar");
    CHECK(kernels::to_string(Backend::Avx2) == "avx2");
  }

  TEST_CASE("LSE_KERNEL=scalar forces the scalar backend") {
    const char* old = std::getenv("LSE_KERNEL");
    setenv("LSE_KERNEL", "scalar", 1);
    CHECK(kernels::active_backend() == Backend::Scalar);
    if (old)
      setenv("LSE_KERNEL", old, 1);
    else
      unsetenv("LSE_KERNEL");
  }

  TEST_CASE("avx2 equals scalar on random inputs including ragged tails") {
    if (!kernels::avx2_available()) {
      MESSAGE("AVX2 not available; equivalence not exercised");
      return;
    }
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 63u, 2001u}) {
      for (int rep = 0; rep < 20; ++rep) {
        const auto p = random_params(rng);
        Arrays s = random_arrays(n, rng);
        Arrays v = s;
        kernels::evaluate_channels_scalar(p, s.in(), s.out());
        kernels::evaluate_channels_avx2(p, v.in(), v.out());
        for (std::size_t k = 0; k < n; ++k) {
          worst = std::max({worst, rel(s.e[k], v.e[k]), rel(s.i[k], v.i[k]), rel(s.c[k], v.c[k])});
        }
      }
    }
    CHECK(worst <= 1e-13);
  }

  TEST_CASE("avx2 equals scalar on the reference spectrum pipeline") {
    if (!kernels::avx2_available()) return;
    const ModelConfig c = reference_config();
    const auto grid = default_mu_grid(c.dos, c.grid);
    for (double T : {0.5, 10.0, 100.0, 300.0}) {
      for (SpectrumKind kind : {SpectrumKind::SteadyState, SpectrumKind::TimeResolvedSnapshot}) {
        SpectrumRequest req;
        req.kind = kind;
        req.time = 20.0;
        const auto a = channel_map(T, grid, c, req, Backend::Scalar);
        const auto b = channel_map(T, grid, c, req, Backend::Avx2);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
          worst = std::max({worst, rel(a.energy[k], b.energy[k]), rel(a.intensity[k], b.intensity[k]),
                            rel(a.chi[k], b.chi[k])});
        CHECK(worst <= 1e-13);
      }
    }
  }

  TEST_CASE("vector exp accuracy") {
    if (!kernels::avx2_available()) return;
    std::vector<double> x;
    for (double v = -740.0; v <= 709.0; v += 0.37) x.push_back(v);
    for (double v : {0.0, -0.0, 1e-300, -1e-300, 1.0, -1.0, 709.7, -708.3}) x.push_back(v);
    std::vector<double> y(x.size());
    kernels::detail::exp_avx2(x, y);
    double worst_normal = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double ref = std::exp(x[k]);
      if (ref >= DBL_MIN)
        worst_normal = std::max(worst_normal, rel(ref, y[k]));
      else
        CHECK(std::abs(ref - y[k]) <= 1e-3 * ref + 5e-324);
    }
    CHECK(worst_normal <= 4e-16);

    std::vector<double> extreme = {-1000.0, 1000.0, -INFINITY, INFINITY};
    std::vector<double> ye(extreme.size());
    kernels::detail::exp_avx2(extreme, ye);
    CHECK(ye[0] == 0.0);
    CHECK(std::isinf(ye[1]));
    CHECK(ye[2] == 0.0);
    CHECK(std::isinf(ye[3]));
  }

  TEST_CASE("vector log accuracy") {
    if (!kernels::avx2_available()) return;
    std::vector<double> x;
    for (double v = 1e-310; v < 1e300; v *= 1.91) x.push_back(v);
    for (double v : {1.0, 0.5, 2.0, 1.0 + 1e-12, 1.0 - 1e-12, DBL_MIN, DBL_MAX}) x.push_back(v);
    std::vector<double> y(x.size());
    kernels::detail::log_avx2(x, y);
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double ref = std::log(x[k]);
      worst = std::max(worst, std::abs(ref - y[k]) / std::max(1.0, std::abs(ref)));
    }
    CHECK(worst <= 4e-16);
    std::vector<double> z = {0.0}, yz(1);
    kernels::detail::log_avx2(z, yz);
    CHECK(std::isinf(yz[0]));
    CHECK(yz[0] < 0.0);
  }

  TEST_CASE("size mismatch is rejected") {
    Arrays a(8);
    a.L.resize(7);
    kernels::ChannelParams p;
    CHECK_THROWS(kernels::evaluate_channels_scalar(p, a.in(), a.out()));
  }
}
