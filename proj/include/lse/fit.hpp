#pragma once

// Derivative-free calibration of model parameters against observed
// temperature series and spectra.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lse/analysis.hpp"
#include "lse/optimize.hpp"
#include "lse/spectrum.hpp"

namespace lse {

enum class CurveKind { Peak, Fwhm, Intensity, Lifetime, SpectrumAtT };

std::string_view to_string(CurveKind kind);
std::optional<CurveKind> parse_curve_kind(std::string_view name);

struct ObservedCurve {
  CurveKind kind = CurveKind::Peak;
  std::vector<double> abscissa;  // K, or eV for SpectrumAtT
  std::vector<double> values;
  std::string source;
  double temperature = 0.0;  // K, SpectrumAtT only
};

/// Names follow the config layout without unit suffixes, e.g.
/// "rate_laws.gamma_R0" or "dos.variance_sigma2".
double& parameter(ModelConfig& config, std::string_view name);
double parameter(const ModelConfig& config, std::string_view name);
const std::vector<std::string>& parameter_names();

struct FreeParameter {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double initial = 0.0;
  bool log_scale = false;
};

struct FitProblem {
  ModelConfig base;
  std::vector<FreeParameter> free_parameters;
  std::vector<ObservedCurve> targets;
  std::vector<double> weights;  // per target; empty means all 1
  ModelToggles toggles;
};

/// Throws InvalidInput for inconsistent bounds, unknown parameter names or
/// unusable targets.
void validate(const FitProblem& problem);

struct CurveResidual {
  CurveKind kind = CurveKind::Peak;
  std::string source;
  double mse = 0.0;
  double scale = 1.0;  // intensity curves: model multiplier
  bool log_space = false;
};

/// argmin_c sum (c m_i - o_i)^2.
double optimal_scale(std::span<const double> model, std::span<const double> observed);

/// Model value of every target at a parameter vector (physical units,
/// ordered as problem.free_parameters). Returns false on model failure.
bool model_curves(const FitProblem& problem, std::span<const double> params,
                  std::vector<std::vector<double>>& out);

/// Per-curve normalized mean squared residuals; +inf entries on failure.
std::vector<CurveResidual> curve_residuals(const FitProblem& problem,
                                           std::span<const double> params);

/// Weighted sum of per-curve mean squared residuals; +inf when the model
/// cannot be evaluated.
Objective build_objective(const FitProblem& problem);

struct FitOptions {
  NelderMeadOptions optimizer{20000, 1e-9, 1e-10, 0.1, 2};
};

struct FitResult {
  std::vector<std::pair<std::string, double>> best_parameters;
  double objective_value = 0.0;
  std::size_t n_evaluations = 0;
  bool converged = false;
  std::vector<CurveResidual> per_curve;
  std::vector<double> best_history;
};

/// Nelder-Mead in unit-cube coordinates (log-mapped where requested).
FitResult fit(const FitProblem& problem, const FitOptions& options = {});

struct RecoveryOptions {
  std::vector<std::string> parameters{"rate_laws.gamma_R0", "rate_laws.beta_ee",
                                      "dos.variance_sigma2", "phonons.optical.base_width"};
  std::vector<double> temperatures = linspace(10.0, 300.0, 30);
  double perturbation = 0.3;
  /// Bounds are truth * (1 -+ bound_fraction).
  double bound_fraction = 0.5;
  FitOptions fit;
};

struct RecoveryReport {
  std::vector<std::string> names;
  std::vector<double> truth, start, fitted, relative_error;
  double max_relative_error = 0.0;
  FitResult result;
};

/// Fits noisy synthetic observables generated from config, starting from
/// the chosen parameters perturbed by +-perturbation. Noise is Gaussian
/// with standard deviation noise_sigma relative to each value, and
/// relative to the curve range for peak positions. Each curve is weighted
/// by the inverse of its expected normalized noise variance.
RecoveryReport synthetic_recovery(const ModelConfig& config, double noise_sigma,
                                  std::uint64_t seed, const RecoveryOptions& options = {});

}  // namespace lse
