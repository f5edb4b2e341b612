#include "lse/checks.hpp"

#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lse/analysis.hpp"
#include "lse/core_rates.hpp"
#include "lse/error.hpp"
#include "lse/limit_laws.hpp"
#include "lse/reference.hpp"
#include "lse/spectrum.hpp"

namespace lse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

struct Draw {
  LevelWidths widths;
  double t = 0.0;
};

std::vector<Draw> random_draws(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(0.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Draw> out;
  while (out.size() < n) {
    Draw d;
    const double L = width(rng), R = width(rng), P = width(rng), O = width(rng), A = width(rng);
    d.widths = LevelWidths::from(L, R, P, O, A);
    if (!(d.widths.X > 0.0)) continue;
    d.t = unit(rng) * 10.0 / d.widths.X;
    out.push_back(d);
  }
  return out;
}

/// RK4 step used against the closed form: 0.002 / X keeps the global error
/// far below 1e-9.
double oracle_step(const LevelWidths& w) { return 0.002 / w.X; }

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  struct Seg {
    double a, b, fa, fm, fb, whole;
    int depth;
  };
  constexpr int kInitial = 16;
  constexpr int kMaxDepth = 40;
  auto simpson = [](double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  };
  std::vector<Seg> stack;
  double estimate = 0.0;
  const double h = (b - a) / kInitial;
  double fa = f(a);
  for (int i = 0; i < kInitial; ++i) {
    const double x0 = a + h * i;
    const double x1 = i + 1 == kInitial ? b : a + h * (i + 1);
    const double fm = f(0.5 * (x0 + x1));
    const double fb = f(x1);
    const double whole = simpson(x0, x1, fa, fm, fb);
    estimate += whole;
    stack.push_back({x0, x1, fa, fm, fb, whole, 0});
    fa = fb;
  }
  std::reverse(stack.begin(), stack.end());
  const double tol = rel_tol * std::max(std::abs(estimate), DBL_MIN);

  double sum = 0.0, comp = 0.0;
  auto add = [&](double term) {
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  };
  while (!stack.empty()) {
    const Seg s = stack.back();
    stack.pop_back();
    const double m = 0.5 * (s.a + s.b);
    const double flm = f(0.5 * (s.a + m));
    const double frm = f(0.5 * (m + s.b));
    const double left = simpson(s.a, m, s.fa, flm, s.fm);
    const double right = simpson(m, s.b, s.fm, frm, s.fb);
    const double fine = left + right;
    const double err = std::abs(fine - s.whole) / 15.0;
    if (err <= tol * (s.b - s.a) / (b - a) || s.depth >= kMaxDepth) {
      add(fine + (fine - s.whole) / 15.0);
      continue;
    }
    stack.push_back({m, s.b, s.fm, frm, s.fb, right, s.depth + 1});
    stack.push_back({s.a, m, s.fa, flm, s.fm, left, s.depth + 1});
  }
  return sum + comp;
}

CheckResult check_rate_equation_fidelity(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{"1", "rate-equation fidelity", false, "", 0.0};
  double worst = 0.0;
  for (const Draw& d : random_draws(seed, 1000)) {
    const Occupancy a = occupancy_closed_form(d.widths, d.t);
    const Occupancy b = occupancy_ode_oracle(d.widths, d.t, oracle_step(d.widths));
    worst = std::max({worst, std::abs(a.sigma_aa - b.sigma_aa), std::abs(a.sigma_bb - b.sigma_bb)});
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-9 && r.seconds < 5.0;
  r.detail = "max |closed - RK4| = " + sci(worst) + " (<= 1e-9), " + sci(r.seconds) + " s (< 5 s)";
  return r;
}

CheckResult check_conservation(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{"2", "conservation", false, "", 0.0};
  double worst = 0.0;
  for (const Draw& d : random_draws(seed, 1000)) {
    for (double frac : {0.0, 0.25, 0.5, 1.0}) {
      const double t = d.t * frac;
      const Occupancy a = occupancy_closed_form(d.widths, t);
      worst = std::max(worst, std::abs(a.sigma_aa + a.sigma_bb - 1.0));
    }
    const Occupancy b = occupancy_ode_oracle(d.widths, d.t, oracle_step(d.widths));
    worst = std::max(worst, std::abs(b.sigma_aa + b.sigma_bb - 1.0));
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-12;
  r.detail = "max |sigma_aa + sigma_bb - 1| = " + sci(worst) + " (<= 1e-12)";
  return r;
}

CheckResult check_integral_identity() {
  const auto t0 = Clock::now();
  CheckResult r{"3", "time-integral identity", false, "", 0.0};
  const ModelConfig c = reference_config();
  MuGridSpec spec;
  spec.points = 64;
  const auto mus = default_mu_grid(c.dos, spec);
  double worst = 0.0;
  for (double T : {10.0, 300.0}) {
    for (double mu : mus) {
      const double chi = effective_widths_at(mu, T, c).chi;
      const double integral = adaptive_simpson(
          [&](double t) { return time_resolved_intensity(mu, T, t, c, ReExcitation::ThermalAverage); },
          0.0, 50.0 / chi);
      const double ss = steady_state_intensity(mu, T, c);
      worst = std::max(worst, std::abs(integral - ss) / ss);
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-6;
  r.detail = "max relative error = " + sci(worst) + " (<= 1e-6) on 64 levels x {10, 300} K";
  return r;
}

CheckResult check_coth_identity() {
  const auto t0 = Clock::now();
  CheckResult r{"4", "coth/Bose identity", false, "", 0.0};
  const auto hws = linspace(0.001, 0.200, 64);
  const auto Ts = linspace(1.0, 500.0, 64);
  double worst = 0.0;
  std::size_t underflow = 0;
  for (double hw : hws) {
    for (double T : Ts) {
      const double lhs = odonnell_chen_shift(1.0, hw, T);
      const double rhs = 2.0 * hw * bose_occupation(hw, T);
      if (std::abs(rhs) < DBL_MIN && std::abs(lhs) < DBL_MIN) {
        // both below the normal range: relative error is not representable
        ++underflow;
        continue;
      }
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-12;
  r.detail = "max relative error = " + sci(worst) + " (<= 1e-12); " + std::to_string(underflow) +
             " of 4096 points both below DBL_MIN";
  return r;
}

CheckResult check_gel_huang_rhys(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{"5", "GEL / Huang-Rhys consistency", false, "", 0.0};
  std::mt19937_64 rng(seed);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto logU = [&](double lo, double hi) { return std::exp(U(std::log(lo), std::log(hi))); };
  const std::vector<double> Ts = {0.0, 1.0, 10.0, 50.0, 100.0, 200.0, 300.0, 500.0};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    ModelConfig c = reference_config();
    c.dos.center_E0 = U(2.0, 3.5);
    c.dos.variance_sigma2 = logU(1e-4, 0.05);
    c.laws.gamma_L0 = logU(1e-4, 1.0);
    c.laws.gamma_R0 = logU(1e-4, 1.0);
    c.laws.gamma_P0 = logU(1e-6, 1e-1);
    c.laws.beta_ee = U(-0.5, 1.0);
    c.laws.E_a = c.dos.center_E0 + U(-0.05, 0.05);
    c.branches.optical = {U(0.005, 0.1), logU(1e-3, 20.0), 0.0};
    c.branches.acoustic = {U(0.002, 0.02), 0.0, 0.0};
    c.path = {U(0, 3), U(0.1, 3), U(0, 3), U(0, 3), U(0.1, 2), U(0.1, 2), U(0.1, 2), U(0.1, 2)};
    c.gel.mode = GelMode::Fixed;
    c.gel.t_lsc_fixed = logU(1e-2, 10.0);
    const double s = std::sqrt(c.dos.variance_sigma2);
    const std::vector<double> mus = {c.dos.center_E0 - 2 * s, c.dos.center_E0, c.dos.center_E0 + 2 * s};
    worst = std::max(worst, gel_hr_consistency(c, mus, Ts).max_relative_error);
  }
  r.seconds = seconds_since(t0);
  r.passed = worst <= 1e-12;
  r.detail = "max relative error = " + sci(worst) + " (<= 1e-12) over 100 configs";
  return r;
}

CheckResult check_extraction_accuracy() {
  const auto t0 = Clock::now();
  CheckResult r{"11", "analytic extraction accuracy", false, "", 0.0};
  const double sigma = 0.02;
  GaussianDos dos{3.0, sigma * sigma, 1.0};
  Spectrum s;
  s.energy = default_mu_grid(dos, MuGridSpec{});
  for (double e : s.energy) {
    const double d = (e - 3.0) / sigma;
    s.intensity.push_back(std::exp(-0.5 * d * d));
  }
  const double fwhm_exact = 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma;
  const double area_exact = sigma * std::sqrt(2.0 * std::numbers::pi);
  const double fwhm_err = std::abs(extract_fwhm(s) - fwhm_exact) / fwhm_exact;
  const double area_err = std::abs(integrated_intensity(s) - area_exact) / area_exact;
  r.seconds = seconds_since(t0);
  r.passed = fwhm_err <= 1e-3 && area_err <= 1e-4;
  r.detail = "FWHM rel error " + sci(fwhm_err) + " (<= 1e-3), integral rel error " + sci(area_err) +
             " (<= 1e-4)";
  return r;
}

std::vector<CheckResult> selftest_checks() {
  return {check_rate_equation_fidelity(), check_conservation(),   check_integral_identity(),
          check_coth_identity(),          check_gel_huang_rhys(), check_extraction_accuracy()};
}

}  // namespace lse
