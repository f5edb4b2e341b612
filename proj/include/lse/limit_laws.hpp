#pragma once

// Analytic limits of the model: Varshni emergence, the Huang-Rhys factor and
// its O'Donnell-Chen form, the low-temperature redshift bound and the
// low-temperature Arrhenius intensity form.

#include <span>
#include <string>
#include <vector>

#include "lse/analysis.hpp"
#include "lse/core_rates.hpp"
#include "lse/spectrum.hpp"

namespace lse {

struct HuangRhys {
  double f = 0.0;
  double S0 = 0.0;  // f = 2 S0 convention
  PhononBranch branch;

  static HuangRhys from_S0(double S0, const PhononBranch& branch) { return {2.0 * S0, S0, branch}; }
};

/// S(T) = f n(w, T).
double huang_rhys_S(const HuangRhys& hr, double T,
                    const PhysicalConstants& constants = PhysicalConstants::si());

/// S0 hw (coth(hw / 2 k_B T) - 1); 0 at T = 0.
double odonnell_chen_shift(double S0, double hw, double T,
                           const PhysicalConstants& constants = PhysicalConstants::si());

/// f such that gel_shift = S(T) hw: w_sc Gamma_phO,0 t_lsc.
double gel_huang_rhys_factor(const ModelConfig& config);

struct ConsistencyReport {
  double max_relative_error = 0.0;
  std::size_t points = 0;
  bool passed = false;
};

/// Compares gel_shift with S(T) hw over a (mu, T) grid. Requires Fixed
/// t_lsc, GEL on, an inactive acoustic branch and no spontaneous floor;
/// throws PreconditionViolation otherwise.
ConsistencyReport gel_hr_consistency(const ModelConfig& config, std::span<const double> mus,
                                     std::span<const double> temperatures,
                                     double tolerance = 1e-12);

struct VarshniFit {
  double E0_fit = 0.0;
  double gamma = 0.0;  // eV/K
  double theta = 0.0;  // K
  double rms_residual = 0.0;
  bool degenerate = false;
};

double varshni(double T, double E0, double gamma, double theta);

/// Least squares on E(0) - gamma T^2 / (theta + T). E(0) and gamma are
/// eliminated in closed form; log(theta) is searched by Nelder-Mead.
VarshniFit varshni_fit(std::span<const double> temperatures, std::span<const double> energies);

struct RedshiftBoundInputs {
  double xi = 0.0;
  double g = 0.0;
  double sigma2 = 0.0;  // eV^2
  double T_e = 0.0;     // K
};

/// Gamma_L' / (Gamma_L' + Gamma_R' + Gamma_P' + Gamma_phO' + Gamma_phA').
double redshift_xi(const EffectiveWidths& eff);

/// xi (1 - g) sigma^2 / (k_B T_e).
double redshift_bound(const RedshiftBoundInputs& in,
                      const PhysicalConstants& constants = PhysicalConstants::si());

/// Gamma_L' / (Gamma_R' + Gamma_P' + Gamma_phO' + Gamma_phA').
double arrhenius_zeta(const EffectiveWidths& eff);

struct ArrheniusFit {
  double zeta0 = 0.0;
  double I0 = 0.0;
  double r_squared = 0.0;
};

double arrhenius_form(double T, double I0, double zeta0, double E0, double Ea,
                      const PhysicalConstants& constants = PhysicalConstants::si());

/// One-parameter fit of I0 / (1 + zeta0 exp((E0 - Ea) / k_B T)); I0 is
/// solved in closed form for every zeta0.
ArrheniusFit arrhenius_fit(std::span<const double> temperatures,
                           std::span<const double> intensities, double E0, double Ea,
                           const PhysicalConstants& constants = PhysicalConstants::si());

enum class CheckStatus { Pass, Fail, NotApplicable };
std::string_view to_string(CheckStatus s);

struct HighTempReport {
  CheckStatus status = CheckStatus::NotApplicable;
  bool decreasing = false;
  bool convex_or_linear = false;
  std::size_t points = 0;
  std::string note;
};

/// Qualitative check of log I(T) on [T_lo, T_hi]: decreasing and convex or
/// linear. Not applicable when the intensity does not decrease.
HighTempReport high_temp_intensity_check(const SweepResult& sweep, double T_lo = 200.0,
                                         double T_hi = 350.0);

}  // namespace lse
