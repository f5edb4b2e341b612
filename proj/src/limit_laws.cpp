#include "lse/limit_laws.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "lse/error.hpp"
#include "lse/optimize.hpp"

namespace lse {

double huang_rhys_S(const HuangRhys& hr, double T, const PhysicalConstants& constants) {
  if (hr.f < 0.0) fail(ErrorKind::InvalidInput, "f must be >= 0");
  return hr.f * bose_occupation(hr.branch.energy_hw, T, constants);
}

double odonnell_chen_shift(double S0, double hw, double T, const PhysicalConstants& constants) {
  if (!std::isfinite(S0) || !std::isfinite(hw) || !std::isfinite(T))
    fail(ErrorKind::InvalidInput, "non-finite input");
  if (hw <= 0.0) fail(ErrorKind::InvalidInput, "hw must be > 0");
  if (T < 0.0) fail(ErrorKind::InvalidInput, "T must be >= 0");
  if (T == 0.0) return 0.0;
  // coth(y) - 1 = exp(-y) / sinh(y), without cancellation
  const double y = 0.5 * constants.thermal_ratio(hw, T);
  return S0 * hw * (std::exp(-y) / std::sinh(y));
}

double gel_huang_rhys_factor(const ModelConfig& c) {
  return path_weights(c.path).w_sc * c.branches.optical.base_width * c.gel.t_lsc_fixed;
}

ConsistencyReport gel_hr_consistency(const ModelConfig& c, std::span<const double> mus,
                                     std::span<const double> temperatures, double tolerance) {
  if (c.gel.mode != GelMode::Fixed)
    fail(ErrorKind::PreconditionViolation, "gel mode must be fixed");
  if (!c.toggles.include_gel || !c.toggles.include_ep)
    fail(ErrorKind::PreconditionViolation, "GEL and e-p coupling must be enabled");
  if (c.branches.acoustic.base_width != 0.0 || c.branches.acoustic.spontaneous_floor != 0.0)
    fail(ErrorKind::PreconditionViolation, "acoustic branch must be inactive");
  if (c.branches.optical.spontaneous_floor != 0.0)
    fail(ErrorKind::PreconditionViolation, "spontaneous floor must be 0");

  HuangRhys hr;
  hr.f = gel_huang_rhys_factor(c);
  hr.S0 = 0.5 * hr.f;
  hr.branch = c.branches.optical;
  const PhysicalConstants k = c.constants();

  ConsistencyReport rep;
  for (double T : temperatures) {
    const double rhs = huang_rhys_S(hr, T, k) * hr.branch.energy_hw;
    for (double mu : mus) {
      const double lhs = gel_shift_at(mu, T, c);
      const double diff = std::abs(lhs - rhs);
      double rel = 0.0;
      if (std::abs(rhs) >= DBL_MIN)
        rel = diff / std::abs(rhs);
      else if (diff >= DBL_MIN)
        rel = 1.0;
      rep.max_relative_error = std::max(rep.max_relative_error, rel);
      ++rep.points;
    }
  }
  rep.passed = rep.max_relative_error <= tolerance;
  return rep;
}

double varshni(double T, double E0, double gamma, double theta) {
  return E0 - gamma * T * T / (theta + T);
}

namespace {

struct LinearPart {
  double E0 = 0.0;
  double gamma = 0.0;
  double rss = 0.0;
};

LinearPart varshni_linear(std::span<const double> T, std::span<const double> E, double theta) {
  const std::size_t n = T.size();
  std::vector<double> g(n);
  double gm = 0.0, Em = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = T[i] * T[i] / (theta + T[i]);
    gm += g[i];
    Em += E[i];
  }
  gm /= static_cast<double>(n);
  Em /= static_cast<double>(n);
  double sgg = 0.0, sge = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sgg += (g[i] - gm) * (g[i] - gm);
    sge += (g[i] - gm) * (E[i] - Em);
  }
  LinearPart lp;
  const double slope = sge / sgg;
  lp.gamma = -slope;
  lp.E0 = Em - slope * gm;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = E[i] - (lp.E0 - lp.gamma * g[i]);
    lp.rss += r * r;
  }
  return lp;
}

}  // namespace

VarshniFit varshni_fit(std::span<const double> T, std::span<const double> E) {
  if (T.size() != E.size()) fail(ErrorKind::InvalidInput, "length mismatch");
  if (T.size() < 5) fail(ErrorKind::InvalidInput, "varshni fit needs >= 5 points");
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!std::isfinite(T[i]) || !std::isfinite(E[i]) || T[i] < 0.0)
      fail(ErrorKind::InvalidInput, "invalid data point");
    if (i > 0 && !(T[i] > T[i - 1])) fail(ErrorKind::InvalidInput, "temperatures not ascending");
  }

  VarshniFit fit;
  const auto [lo, hi] = std::minmax_element(E.begin(), E.end());
  const double n = static_cast<double>(E.size());
  if (*hi - *lo < 1e-6) {
    fit.degenerate = true;
    double mean = 0.0;
    for (double e : E) mean += e;
    fit.E0_fit = mean / n;
    double ss = 0.0;
    for (double e : E) ss += (e - fit.E0_fit) * (e - fit.E0_fit);
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
  }

  // coarse scan over log(theta), then Nelder-Mead inside the best bracket
  constexpr int kScan = 241;
  const double u_lo = std::log(1e-2), u_hi = std::log(1e6);
  auto rss_at = [&](double u) { return varshni_linear(T, E, std::exp(u)).rss; };
  int best = 0;
  double best_rss = rss_at(u_lo);
  for (int k = 1; k < kScan; ++k) {
    const double u = u_lo + (u_hi - u_lo) * k / (kScan - 1);
    const double r = rss_at(u);
    if (r < best_rss) {
      best_rss = r;
      best = k;
    }
  }
  const double step = (u_hi - u_lo) / (kScan - 1);
  const double u_best = u_lo + step * best;
  Bounds b{{u_best - (best > 0 ? step : 0.0) - 1e-9}, {u_best + (best < kScan - 1 ? step : 0.0) + 1e-9}};
  NelderMeadOptions opt;
  opt.xtol = 1e-14;
  opt.ftol = 0.0;
  opt.initial_step = 0.25;
  opt.restarts = 1;
  const double start = u_best;
  const auto res = nelder_mead_minimize(
      [&](std::span<const double> x) { return rss_at(x[0]); }, std::span<const double>(&start, 1), b,
      opt);

  const double theta = std::exp(res.x[0]);
  const LinearPart lp = varshni_linear(T, E, theta);
  fit.E0_fit = lp.E0;
  fit.gamma = lp.gamma;
  fit.theta = theta;
  fit.rms_residual = std::sqrt(lp.rss / n);
  return fit;
}

double redshift_xi(const EffectiveWidths& eff) {
  if (!(eff.chi > 0.0)) fail(ErrorKind::DegenerateSystem, "chi = 0");
  return eff.gamma_L_eff / eff.chi;
}

double redshift_bound(const RedshiftBoundInputs& in, const PhysicalConstants& constants) {
  if (!(in.T_e > 0.0)) fail(ErrorKind::InvalidInput, "T_e must be > 0");
  if (!(in.g >= 0.0 && in.g <= 1.0)) fail(ErrorKind::InvalidInput, "g must be in [0, 1]");
  if (!(in.xi >= 0.0 && in.xi <= 1.0)) fail(ErrorKind::InvalidInput, "xi must be in [0, 1]");
  if (!(in.sigma2 >= 0.0)) fail(ErrorKind::InvalidInput, "sigma2 must be >= 0");
  return in.xi * (1.0 - in.g) * in.sigma2 / constants.thermal_energy(in.T_e);
}

double arrhenius_zeta(const EffectiveWidths& eff) {
  const double rest = eff.gamma_R_eff + eff.gamma_P_eff + eff.gamma_phO_eff + eff.gamma_phA_eff;
  if (!(rest > 0.0)) fail(ErrorKind::DegenerateSystem, "no loss channel");
  return eff.gamma_L_eff / rest;
}

namespace {

/// 1 / (1 + exp(z)) without overflow.
double logistic_tail(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

double arrhenius_form(double T, double I0, double zeta0, double E0, double Ea,
                      const PhysicalConstants& constants) {
  if (zeta0 == 0.0) return I0;
  return I0 * logistic_tail(std::log(zeta0) + (E0 - Ea) / constants.thermal_energy(T));
}

ArrheniusFit arrhenius_fit(std::span<const double> T, std::span<const double> I, double E0,
                           double Ea, const PhysicalConstants& constants) {
  if (T.size() != I.size()) fail(ErrorKind::InvalidInput, "length mismatch");
  if (T.size() < 3) fail(ErrorKind::InvalidInput, "arrhenius fit needs >= 3 points");
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!(T[i] > 0.0) || !std::isfinite(T[i])) fail(ErrorKind::InvalidInput, "T must be > 0");
    if (!(I[i] > 0.0) || !std::isfinite(I[i]))
      fail(ErrorKind::InvalidInput, "intensities must be positive");
  }
  const std::size_t n = T.size();
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = (E0 - Ea) / constants.thermal_energy(T[i]);

  struct Eval {
    double I0, rss;
  };
  auto eval_shape = [&](auto shape) {
    double fi = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = shape(i);
      fi += f * I[i];
      ff += f * f;
    }
    Eval e{fi / ff, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double r = I[i] - e.I0 * shape(i);
      e.rss += r * r;
    }
    return e;
  };
  auto eval_log = [&](double lz) {
    return eval_shape([&](std::size_t i) { return logistic_tail(lz + a[i]); });
  };

  constexpr int kScan = 241;
  const double lz_lo = -12.0 * std::log(10.0), lz_hi = 12.0 * std::log(10.0);
  const double step = (lz_hi - lz_lo) / (kScan - 1);
  int best = 0;
  double best_rss = eval_log(lz_lo).rss;
  for (int k = 1; k < kScan; ++k) {
    const double r = eval_log(lz_lo + step * k).rss;
    if (r < best_rss) {
      best_rss = r;
      best = k;
    }
  }
  const double c = lz_lo + step * best;
  const double lz = golden_section_minimize([&](double u) { return eval_log(u).rss; },
                                            c - (best > 0 ? step : 0.0) - 1e-9,
                                            c + (best < kScan - 1 ? step : 0.0) + 1e-9, 1e-14);

  ArrheniusFit fit;
  Eval e = eval_log(lz);
  fit.zeta0 = std::exp(lz);
  const Eval flat = eval_shape([](std::size_t) { return 1.0; });
  if (flat.rss <= e.rss) {
    e = flat;
    fit.zeta0 = 0.0;
  }
  fit.I0 = e.I0;
  double mean = 0.0;
  for (double v : I) mean += v;
  mean /= static_cast<double>(n);
  double tss = 0.0;
  for (double v : I) tss += (v - mean) * (v - mean);
  fit.r_squared = tss > 0.0 ? 1.0 - e.rss / tss : 1.0;
  return fit;
}

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::NotApplicable:
      return "NOT-APPLICABLE";
  }
  return "FAIL";
}

HighTempReport high_temp_intensity_check(const SweepResult& sweep, double T_lo, double T_hi) {
  HighTempReport rep;
  std::vector<double> T, L;
  for (const auto& o : sweep.observables) {
    if (o.temperature < T_lo - 1e-9 || o.temperature > T_hi + 1e-9) continue;
    if (!o.ok || !(o.integrated_intensity > 0.0)) {
      rep.note = "missing or non-positive intensity at T=" + std::to_string(o.temperature);
      return rep;
    }
    T.push_back(o.temperature);
    L.push_back(std::log(o.integrated_intensity));
  }
  rep.points = T.size();
  if (T.size() < 3) {
    rep.note = "fewer than 3 temperatures in window";
    return rep;
  }
  std::vector<double> slope(T.size() - 1);
  double max_slope = 0.0;
  rep.decreasing = true;
  for (std::size_t i = 0; i + 1 < T.size(); ++i) {
    slope[i] = (L[i + 1] - L[i]) / (T[i + 1] - T[i]);
    max_slope = std::max(max_slope, std::abs(slope[i]));
    if (!(slope[i] < 0.0)) rep.decreasing = false;
  }
  if (!rep.decreasing) {
    rep.note = "intensity not decreasing";
    return rep;
  }
  const double tol = 1e-3 * max_slope / (T.back() - T.front());
  rep.convex_or_linear = true;
  for (std::size_t i = 0; i + 1 < slope.size(); ++i) {
    const double curv = (slope[i + 1] - slope[i]) / (0.5 * (T[i + 2] - T[i]));
    if (curv < -tol) rep.convex_or_linear = false;
  }
  rep.status = rep.convex_or_linear ? CheckStatus::Pass : CheckStatus::Fail;
  if (!rep.convex_or_linear) rep.note = "log-intensity concave";
  return rep;
}

}  // namespace lse
