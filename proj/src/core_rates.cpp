#include "lse/core_rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lse/error.hpp"

namespace lse {

namespace {

constexpr double kReferenceTemperature = 300.0;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, std::string(what) + " is not finite");
}

void validate_laws(const RateLaws& laws) {
  if (laws.gamma_L0 < 0.0 || laws.gamma_R0 < 0.0 || laws.gamma_P0 < 0.0 || laws.C < 0.0)
    fail(ErrorKind::InvalidInput, "negative base width");
  if (laws.re_excite_base < 0.0 || laws.re_excite_kappa < 0.0)
    fail(ErrorKind::InvalidInput, "negative re-excitation parameter");
}

double launch_width(const RateLaws& laws, double T, bool vary_ee) {
  if (!vary_ee) return laws.gamma_L0;
  const double growth = 1.0 + laws.beta_ee * T / kReferenceTemperature;
  if (growth < 0.0)
    fail(ErrorKind::InvalidInput,
         "beta_ee=" + std::to_string(laws.beta_ee) + " makes Gamma_L negative at T=" +
             std::to_string(T));
  return laws.gamma_L0 * growth;
}

double phonon_width(const PhononBranch& b, double n) { return b.base_width * n + b.spontaneous_floor; }

}  // namespace

LevelWidths LevelWidths::from(double L, double R, double P, double phO, double phA) {
  LevelWidths w;
  w.gamma_L = L;
  w.gamma_R = R;
  w.gamma_P = P;
  w.gamma_phO = phO;
  w.gamma_phA = phA;
  w.X = L + R + P + phO + phA;
  return w;
}

double bose_occupation(double hw, double T, const PhysicalConstants& constants) {
  require_finite(hw, "phonon energy");
  require_finite(T, "temperature");
  if (hw <= 0.0) fail(ErrorKind::InvalidInput, "phonon energy must be positive");
  if (T < 0.0) fail(ErrorKind::InvalidInput, "temperature must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(constants.thermal_ratio(hw, T));
}

double channel_width(const CouplingChannel& channel) {
  require_finite(channel.rho, "rho");
  require_finite(channel.omega_coupling, "Omega");
  if (channel.rho < 0.0) fail(ErrorKind::InvalidInput, "negative rho");
  return 2.0 * std::numbers::pi * channel.rho * channel.omega_coupling * channel.omega_coupling;
}

double RateLawModel::re_excitation(const RateLaws& laws, const PhononBranches& branches,
                                   double T, const PhysicalConstants& constants) const {
  return laws.re_excite_base +
         laws.re_excite_kappa * bose_occupation(branches.optical.energy_hw, T, constants);
}

void RateLawModel::widths_on_grid(const RateLaws& laws, const PhononBranches& branches,
                                  std::span<const double> mu, double T,
                                  const ModelToggles& toggles, const PhysicalConstants& constants,
                                  GridOut out) const {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const LevelWidths w = widths(laws, branches, mu[i], T, toggles, constants);
    out.gamma_L[i] = w.gamma_L;
    out.gamma_R[i] = w.gamma_R;
    out.gamma_P[i] = w.gamma_P;
    out.gamma_phO[i] = w.gamma_phO;
    out.gamma_phA[i] = w.gamma_phA;
  }
}

double DefaultRateLaws::activation(double E_a, double mu, double T,
                                   const PhysicalConstants& constants) {
  const double barrier = std::max(E_a - mu, 0.0);
  if (barrier == 0.0) return 1.0;
  if (T == 0.0) return 0.0;
  return std::exp(-barrier / constants.thermal_energy(T));
}

LevelWidths DefaultRateLaws::widths(const RateLaws& laws, const PhononBranches& branches,
                                    double mu, double T, const ModelToggles& toggles,
                                    const PhysicalConstants& constants) const {
  require_finite(mu, "mu");
  require_finite(T, "temperature");
  if (T < 0.0) fail(ErrorKind::InvalidInput, "temperature must be >= 0");
  validate_laws(laws);

  // Frozen e-e holds the launch and receiver channels at their T = 0 values.
  const double T_ee = toggles.vary_ee ? T : 0.0;
  const double L = launch_width(laws, T, toggles.vary_ee);
  const double R = laws.gamma_R0 * activation(laws.E_a, mu, T_ee, constants);
  double phO = 0.0;
  double phA = 0.0;
  if (toggles.include_ep) {
    phO = phonon_width(branches.optical, bose_occupation(branches.optical.energy_hw, T, constants));
    phA = phonon_width(branches.acoustic,
                       bose_occupation(branches.acoustic.energy_hw, T, constants));
  }
  return LevelWidths::from(L, R, laws.gamma_P0, phO, phA);
}

void DefaultRateLaws::widths_on_grid(const RateLaws& laws, const PhononBranches& branches,
                                     std::span<const double> mu, double T,
                                     const ModelToggles& toggles,
                                     const PhysicalConstants& constants, GridOut out) const {
  require_finite(T, "temperature");
  if (T < 0.0) fail(ErrorKind::InvalidInput, "temperature must be >= 0");
  validate_laws(laws);
  const double T_ee = toggles.vary_ee ? T : 0.0;
  const double L = launch_width(laws, T, toggles.vary_ee);
  double phO = 0.0;
  double phA = 0.0;
  if (toggles.include_ep) {
    phO = phonon_width(branches.optical, bose_occupation(branches.optical.energy_hw, T, constants));
    phA = phonon_width(branches.acoustic,
                       bose_occupation(branches.acoustic.energy_hw, T, constants));
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    out.gamma_L[i] = L;
    out.gamma_R[i] = laws.gamma_R0 * activation(laws.E_a, mu[i], T_ee, constants);
    out.gamma_P[i] = laws.gamma_P0;
    out.gamma_phO[i] = phO;
    out.gamma_phA[i] = phA;
  }
}

std::shared_ptr<const RateLawModel> default_rate_laws() {
  static const auto model = std::make_shared<const DefaultRateLaws>();
  return model;
}

LevelWidths evaluate_widths(const RateLaws& laws, const PhononBranches& branches, double mu,
                            double T, const ModelToggles& toggles,
                            const PhysicalConstants& constants, const RateLawModel& model) {
  return model.widths(laws, branches, mu, T, toggles, constants);
}

Occupancy occupancy_closed_form(const LevelWidths& widths, double t) {
  if (!(widths.X > 0.0)) fail(ErrorKind::DegenerateSystem, "total width X = 0");
  if (t < 0.0) fail(ErrorKind::InvalidInput, "t must be >= 0");
  const double ratio = widths.gamma_L / widths.X;
  const double decay = std::exp(-t * widths.X);
  Occupancy o;
  o.sigma_bb = ratio * (1.0 - decay);
  o.sigma_aa = (widths.X - widths.gamma_L) / widths.X + ratio * decay;
  return o;
}

Occupancy occupancy_ode_oracle(const LevelWidths& widths, double t, double step) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidInput, "step must be positive");
  if (t < 0.0) fail(ErrorKind::InvalidInput, "t must be >= 0");
  if (widths.X > 0.0 && step > 0.1 / widths.X)
    fail(ErrorKind::StepTooLarge, "step " + std::to_string(step) + " > 0.1/X");

  const double in = widths.gamma_L;
  const double out = widths.X - widths.gamma_L;
  // d(aa)/dt = -in*aa + out*bb, d(bb)/dt = -d(aa)/dt
  auto rate = [&](double aa, double bb) { return -in * aa + out * bb; };

  const auto n = static_cast<long>(std::ceil(t / step));
  Occupancy o;
  if (n == 0) return o;
  const double h = t / static_cast<double>(n);
  double aa = 1.0;
  double bb = 0.0;
  for (long i = 0; i < n; ++i) {
    const double k1 = rate(aa, bb);
    const double k2 = rate(aa + 0.5 * h * k1, bb - 0.5 * h * k1);
    const double k3 = rate(aa + 0.5 * h * k2, bb - 0.5 * h * k2);
    const double k4 = rate(aa + h * k3, bb - h * k3);
    const double d = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    aa += d;
    bb -= d;
  }
  o.sigma_aa = aa;
  o.sigma_bb = bb;
  return o;
}

PathWeights path_weights(const PathProfile& path) {
  for (double v : {path.n_tr, path.n_sc, path.n_p, path.n_re, path.t_tr, path.t_sc, path.t_p,
                   path.t_re}) {
    require_finite(v, "path profile entry");
    if (v < 0.0) fail(ErrorKind::InvalidInput, "negative path count or dwell time");
  }
  const double te = path.total_time();
  if (!(te > 0.0)) fail(ErrorKind::DegeneratePath, "total path time is 0");
  const double sc = path.n_sc * path.t_sc;
  const double re = path.n_re * path.t_re;
  const double tr = path.n_tr * path.t_tr;
  const double p = path.n_p * path.t_p;
  PathWeights w;
  w.w_sc = (sc + re) / te;
  w.w_re = re / te;
  w.w_tr = tr / te;
  w.w_p = (p + re) / te;
  return w;
}

EffectiveWidths effective_widths(const LevelWidths& widths, const PathProfile& path, double C) {
  const PathWeights w = path_weights(path);
  EffectiveWidths e;
  e.weights = w;
  e.gamma_L_eff = w.w_sc * widths.gamma_L;
  e.gamma_R_eff = w.w_re * widths.gamma_R + C * w.w_tr;
  e.gamma_P_eff = w.w_p * widths.gamma_P;
  e.gamma_phO_eff = w.w_sc * widths.gamma_phO;
  e.gamma_phA_eff = w.w_sc * widths.gamma_phA;
  e.chi = e.gamma_L_eff + e.gamma_R_eff + e.gamma_P_eff + e.gamma_phO_eff + e.gamma_phA_eff;
  return e;
}

}  // namespace lse
