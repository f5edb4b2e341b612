#include "lse/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lse/error.hpp"

namespace lse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ParameterSlot {
  std::string name;
  double& (*ref)(ModelConfig&);
};

#define LSE_SLOT(key, expr) \
  ParameterSlot { key, [](ModelConfig& c) -> double& { return expr; } }

const std::vector<ParameterSlot>& slots() {
  static const std::vector<ParameterSlot> s = {
      LSE_SLOT("rate_laws.gamma_L0", c.laws.gamma_L0),
      LSE_SLOT("rate_laws.gamma_R0", c.laws.gamma_R0),
      LSE_SLOT("rate_laws.gamma_P0", c.laws.gamma_P0),
      LSE_SLOT("rate_laws.beta_ee", c.laws.beta_ee),
      LSE_SLOT("rate_laws.C", c.laws.C),
      LSE_SLOT("rate_laws.E_a", c.laws.E_a),
      LSE_SLOT("rate_laws.E_F_launch", c.laws.E_F_launch),
      LSE_SLOT("rate_laws.E_F_receive", c.laws.E_F_receive),
      LSE_SLOT("rate_laws.re_excite_base", c.laws.re_excite_base),
      LSE_SLOT("rate_laws.re_excite_kappa", c.laws.re_excite_kappa),
      LSE_SLOT("phonons.optical.energy_hw", c.branches.optical.energy_hw),
      LSE_SLOT("phonons.optical.base_width", c.branches.optical.base_width),
      LSE_SLOT("phonons.optical.spontaneous_floor", c.branches.optical.spontaneous_floor),
      LSE_SLOT("phonons.acoustic.energy_hw", c.branches.acoustic.energy_hw),
      LSE_SLOT("phonons.acoustic.base_width", c.branches.acoustic.base_width),
      LSE_SLOT("phonons.acoustic.spontaneous_floor", c.branches.acoustic.spontaneous_floor),
      LSE_SLOT("dos.center_E0", c.dos.center_E0),
      LSE_SLOT("dos.variance_sigma2", c.dos.variance_sigma2),
      LSE_SLOT("dos.density_Nl", c.dos.density_Nl),
      LSE_SLOT("path.n_tr", c.path.n_tr),
      LSE_SLOT("path.n_sc", c.path.n_sc),
      LSE_SLOT("path.n_p", c.path.n_p),
      LSE_SLOT("path.n_re", c.path.n_re),
      LSE_SLOT("path.t_tr", c.path.t_tr),
      LSE_SLOT("path.t_sc", c.path.t_sc),
      LSE_SLOT("path.t_p", c.path.t_p),
      LSE_SLOT("path.t_re", c.path.t_re),
      LSE_SLOT("gel.t_lsc", c.gel.t_lsc_fixed),
      LSE_SLOT("gel.alpha", c.gel.alpha),
  };
  return s;
}

#undef LSE_SLOT

bool is_temperature_curve(CurveKind k) { return k != CurveKind::SpectrumAtT; }
bool is_intensity_curve(CurveKind k) {
  return k == CurveKind::Intensity || k == CurveKind::SpectrumAtT;
}

double range_of(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double r = *hi - *lo;
  if (r > 0.0) return r;
  const double m = std::max(std::abs(*lo), std::abs(*hi));
  return m > 0.0 ? m : 1.0;
}

double interpolate(const Spectrum& s, double e) {
  const auto& E = s.energy;
  if (E.size() < 2 || e < E.front() || e > E.back()) return 0.0;
  const auto it = std::upper_bound(E.begin(), E.end(), e);
  std::size_t k = static_cast<std::size_t>(it - E.begin());
  k = std::clamp<std::size_t>(k, 1, E.size() - 1) - 1;
  const double u = (e - E[k]) / (E[k + 1] - E[k]);
  return s.intensity[k] + u * (s.intensity[k + 1] - s.intensity[k]);
}

CurveResidual residual(const ObservedCurve& obs, std::span<const double> model) {
  CurveResidual r;
  r.kind = obs.kind;
  r.source = obs.source;
  const std::size_t n = obs.values.size();
  double sum = 0.0;
  if (!is_intensity_curve(obs.kind)) {
    const double range = range_of(obs.values);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (model[i] - obs.values[i]) / range;
      sum += d * d;
    }
    r.mse = sum / static_cast<double>(n);
    return r;
  }

  const auto [lo, hi] = std::minmax_element(obs.values.begin(), obs.values.end());
  if (*lo > 0.0 && *hi > 100.0 * *lo) {
    r.log_space = true;
    std::vector<double> lo_obs(n);
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(model[i] > 0.0)) {
        r.mse = kInf;
        return r;
      }
      lo_obs[i] = std::log(obs.values[i]);
      shift += lo_obs[i] - std::log(model[i]);
    }
    shift /= static_cast<double>(n);
    r.scale = std::exp(shift);
    const double range = range_of(lo_obs);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (std::log(model[i]) + shift - lo_obs[i]) / range;
      sum += d * d;
    }
  } else {
    r.scale = optimal_scale(model, obs.values);
    if (!std::isfinite(r.scale)) {
      r.mse = kInf;
      return r;
    }
    const double range = range_of(obs.values);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (r.scale * model[i] - obs.values[i]) / range;
      sum += d * d;
    }
  }
  r.mse = sum / static_cast<double>(n);
  return r;
}

ModelConfig configure(const FitProblem& p, std::span<const double> params) {
  ModelConfig c = p.base;
  c.toggles = p.toggles;
  for (std::size_t i = 0; i < params.size(); ++i) parameter(c, p.free_parameters[i].name) = params[i];
  return c;
}

double to_unit(const FreeParameter& f, double x) {
  if (f.log_scale) return (std::log(x) - std::log(f.lower)) / (std::log(f.upper) - std::log(f.lower));
  return (x - f.lower) / (f.upper - f.lower);
}

double from_unit(const FreeParameter& f, double u) {
  if (u <= 0.0) return f.lower;
  if (u >= 1.0) return f.upper;
  if (f.log_scale)
    return std::exp(std::log(f.lower) + u * (std::log(f.upper) - std::log(f.lower)));
  return f.lower + u * (f.upper - f.lower);
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Peak:
      return "peak";
    case CurveKind::Fwhm:
      return "fwhm";
    case CurveKind::Intensity:
      return "intensity";
    case CurveKind::Lifetime:
      return "lifetime";
    case CurveKind::SpectrumAtT:
      return "spectrum";
  }
  return "peak";
}

std::optional<CurveKind> parse_curve_kind(std::string_view name) {
  for (CurveKind k : {CurveKind::Peak, CurveKind::Fwhm, CurveKind::Intensity, CurveKind::Lifetime,
                      CurveKind::SpectrumAtT})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

double& parameter(ModelConfig& config, std::string_view name) {
  for (const auto& s : slots())
    if (s.name == name) return s.ref(config);
  fail(ErrorKind::UnknownKey, std::string(name));
}

double parameter(const ModelConfig& config, std::string_view name) {
  return parameter(const_cast<ModelConfig&>(config), name);
}

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : slots()) v.push_back(s.name);
    return v;
  }();
  return names;
}

void validate(const FitProblem& p) {
  validate(p.base);
  for (const auto& f : p.free_parameters) {
    ModelConfig probe = p.base;
    (void)parameter(probe, f.name);
    if (!(f.lower < f.upper)) fail(ErrorKind::InvalidInput, f.name + ": lower must be < upper");
    if (!(f.initial >= f.lower && f.initial <= f.upper))
      fail(ErrorKind::InvalidInput, f.name + ": initial value outside bounds");
    if (f.log_scale && !(f.lower > 0.0))
      fail(ErrorKind::InvalidInput, f.name + ": log scale needs a positive lower bound");
  }
  if (p.targets.empty()) fail(ErrorKind::InvalidInput, "no target curves");
  if (!p.weights.empty() && p.weights.size() != p.targets.size())
    fail(ErrorKind::InvalidInput, "one weight per target required");
  for (double w : p.weights)
    if (!(w >= 0.0)) fail(ErrorKind::InvalidInput, "weights must be >= 0");
  bool has_long = false;
  for (const auto& t : p.targets) {
    if (t.abscissa.size() != t.values.size())
      fail(ErrorKind::InvalidInput, "target abscissa/value length mismatch");
    if (t.values.size() >= 3) has_long = true;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      if (!std::isfinite(t.values[i]) || !std::isfinite(t.abscissa[i]))
        fail(ErrorKind::InvalidInput, "non-finite target value");
      if (i > 0 && !(t.abscissa[i] > t.abscissa[i - 1]))
        fail(ErrorKind::InvalidInput, "target abscissa not strictly ascending");
    }
    if (t.values.empty()) fail(ErrorKind::InvalidInput, "empty target curve");
  }
  if (!has_long) fail(ErrorKind::InvalidInput, "need a target curve with >= 3 points");
}

double optimal_scale(std::span<const double> model, std::span<const double> observed) {
  double mo = 0.0, mm = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    mo += model[i] * observed[i];
    mm += model[i] * model[i];
  }
  if (!(mm > 0.0)) return kInf;
  return mo / mm;
}

bool model_curves(const FitProblem& p, std::span<const double> params,
                  std::vector<std::vector<double>>& out) {
  out.assign(p.targets.size(), {});
  try {
    const ModelConfig c = configure(p, params);
    std::vector<double> temps;
    for (const auto& t : p.targets)
      if (is_temperature_curve(t.kind)) temps.insert(temps.end(), t.abscissa.begin(), t.abscissa.end());
    std::sort(temps.begin(), temps.end());
    temps.erase(std::unique(temps.begin(), temps.end()), temps.end());

    SweepResult sweep;
    if (!temps.empty()) {
      SweepOptions opt;
      opt.normalize = false;
      sweep = temperature_sweep(c, temps, opt);
      if (!sweep.all_ok()) return false;
    }
    auto lookup = [&](double T) -> const SpectralObservables& {
      const auto it = std::lower_bound(temps.begin(), temps.end(), T);
      return sweep.observables[static_cast<std::size_t>(it - temps.begin())];
    };

    for (std::size_t k = 0; k < p.targets.size(); ++k) {
      const auto& t = p.targets[k];
      auto& m = out[k];
      m.reserve(t.values.size());
      if (t.kind == CurveKind::SpectrumAtT) {
        const Spectrum s = steady_state_spectrum(t.temperature, c);
        for (double e : t.abscissa) m.push_back(interpolate(s, e));
        continue;
      }
      for (double T : t.abscissa) {
        const auto& o = lookup(T);
        switch (t.kind) {
          case CurveKind::Peak:
            m.push_back(o.peak_E);
            break;
          case CurveKind::Fwhm:
            m.push_back(o.fwhm);
            break;
          case CurveKind::Intensity:
            m.push_back(o.integrated_intensity);
            break;
          case CurveKind::Lifetime:
            m.push_back(o.decay_time);
            break;
          case CurveKind::SpectrumAtT:
            break;
        }
      }
    }
  } catch (const LseError&) {
    return false;
  }
  for (const auto& m : out)
    for (double v : m)
      if (!std::isfinite(v)) return false;
  return true;
}

std::vector<CurveResidual> curve_residuals(const FitProblem& p, std::span<const double> params) {
  std::vector<std::vector<double>> model;
  std::vector<CurveResidual> res(p.targets.size());
  if (!model_curves(p, params, model)) {
    for (std::size_t k = 0; k < p.targets.size(); ++k) {
      res[k].kind = p.targets[k].kind;
      res[k].source = p.targets[k].source;
      res[k].mse = kInf;
    }
    return res;
  }
  for (std::size_t k = 0; k < p.targets.size(); ++k) res[k] = residual(p.targets[k], model[k]);
  return res;
}

Objective build_objective(const FitProblem& problem) {
  validate(problem);
  return [problem](std::span<const double> params) {
    const auto res = curve_residuals(problem, params);
    double total = 0.0;
    for (std::size_t k = 0; k < res.size(); ++k) {
      const double w = problem.weights.empty() ? 1.0 : problem.weights[k];
      if (w == 0.0) continue;
      total += w * res[k].mse;
    }
    return std::isfinite(total) ? total : kInf;
  };
}

FitResult fit(const FitProblem& problem, const FitOptions& options) {
  const Objective objective = build_objective(problem);
  const auto& free = problem.free_parameters;
  FitResult out;

  std::vector<double> physical(free.size());
  if (free.empty()) {
    out.objective_value = objective(physical);
    out.n_evaluations = 1;
    out.converged = std::isfinite(out.objective_value);
    out.per_curve = curve_residuals(problem, physical);
    return out;
  }

  auto to_physical = [&](std::span<const double> u) {
    std::vector<double> x(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) x[i] = from_unit(free[i], u[i]);
    return x;
  };
  std::vector<double> start(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) start[i] = to_unit(free[i], free[i].initial);

  Bounds box{std::vector<double>(free.size(), 0.0), std::vector<double>(free.size(), 1.0)};
  const auto nm = nelder_mead_minimize(
      [&](std::span<const double> u) { return objective(to_physical(u)); }, start, box,
      options.optimizer);

  physical = to_physical(nm.x);
  for (std::size_t i = 0; i < free.size(); ++i) out.best_parameters.emplace_back(free[i].name, physical[i]);
  out.objective_value = nm.f;
  out.n_evaluations = nm.n_evaluations;
  out.converged = nm.converged;
  out.best_history = nm.best_history;
  out.per_curve = curve_residuals(problem, physical);
  return out;
}

RecoveryReport synthetic_recovery(const ModelConfig& config, double noise_sigma,
                                  std::uint64_t seed, const RecoveryOptions& options) {
  if (!(noise_sigma >= 0.0)) fail(ErrorKind::InvalidInput, "noise_sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SweepOptions sopt;
  sopt.normalize = false;
  const SweepResult truth_sweep = temperature_sweep(config, options.temperatures, sopt);
  if (!truth_sweep.all_ok()) fail(ErrorKind::InvalidInput, "reference sweep failed");

  FitProblem problem;
  problem.base = config;
  problem.toggles = config.toggles;
  const std::pair<CurveKind, double SpectralObservables::*> curves[] = {
      {CurveKind::Peak, &SpectralObservables::peak_E},
      {CurveKind::Fwhm, &SpectralObservables::fwhm},
      {CurveKind::Intensity, &SpectralObservables::integrated_intensity},
      {CurveKind::Lifetime, &SpectralObservables::decay_time},
  };
  for (const auto& [kind, field] : curves) {
    ObservedCurve c;
    c.kind = kind;
    c.source = "synthetic";
    c.abscissa = truth_sweep.temperatures;
    c.values = truth_sweep.column(field);
    const double range = range_of(c.values);
    // Inverse expected normalized noise variance per unit noise_sigma.
    double expected = 0.0;
    const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
    if (kind == CurveKind::Peak) {
      expected = 1.0;
    } else if (kind == CurveKind::Intensity && *lo > 0.0 && *hi > 100.0 * *lo) {
      const double log_range = std::log(*hi / *lo);
      expected = 1.0 / (log_range * log_range);
    } else {
      for (double v : c.values) expected += v * v / (range * range);
      expected /= static_cast<double>(c.values.size());
    }
    problem.weights.push_back(1.0 / expected);
    for (double& v : c.values) {
      const double z = normal(rng);
      v = kind == CurveKind::Peak ? v + noise_sigma * range * z : v * (1.0 + noise_sigma * z);
    }
    problem.targets.push_back(std::move(c));
  }

  RecoveryReport rep;
  for (const auto& name : options.parameters) {
    const double truth = parameter(config, name);
    const double sign = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -1.0 : 1.0;
    const double start = truth * (1.0 + sign * options.perturbation);
    const double a = truth * (1.0 - options.bound_fraction);
    const double b = truth * (1.0 + options.bound_fraction);
    FreeParameter f;
    f.name = name;
    f.lower = std::min(a, b);
    f.upper = std::max(a, b);
    f.initial = start;
    f.log_scale = f.lower > 0.0;
    problem.free_parameters.push_back(f);
    rep.names.push_back(name);
    rep.truth.push_back(truth);
    rep.start.push_back(start);
  }

  rep.result = fit(problem, options.fit);
  for (std::size_t i = 0; i < rep.names.size(); ++i) {
    const double v = rep.result.best_parameters[i].second;
    rep.fitted.push_back(v);
    const double err = std::abs(v - rep.truth[i]) / std::abs(rep.truth[i]);
    rep.relative_error.push_back(err);
    rep.max_relative_error = std::max(rep.max_relative_error, err);
  }
  return rep;
}

}  // namespace lse
