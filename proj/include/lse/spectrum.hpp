#pragma once

// Steady-state and time-resolved LSE spectra over a Gaussian DOS, with the
// GEL photon-energy correction.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lse/core_rates.hpp"
#include "lse/kernels.hpp"

namespace lse {

struct GaussianDos {
  double center_E0 = 0.0;        // eV
  double variance_sigma2 = 0.0;  // eV^2, 0 = single-level mode
  double density_Nl = 1.0;

  bool single_level() const noexcept { return variance_sigma2 == 0.0; }
};

enum class GelMode { Fixed, SelfConsistent };

struct GelSettings {
  GelMode mode = GelMode::Fixed;
  double t_lsc_fixed = 1.0;  // ps
  double alpha = 1.0;        // t_lsc = alpha / chi
};

struct MuGridSpec {
  double half_width_sigmas = 5.0;
  std::size_t points = 2001;
};

struct ModelConfig {
  RateLaws laws;
  PhononBranches branches;
  GaussianDos dos;
  PathProfile path;
  GelSettings gel;
  ModelToggles toggles;
  bool natural_units = false;
  MuGridSpec grid;
  std::shared_ptr<const RateLawModel> rate_model = default_rate_laws();

  PhysicalConstants constants() const {
    return natural_units ? PhysicalConstants::natural() : PhysicalConstants::si();
  }
};

/// Throws InvalidInput for parameter values outside their domain.
void validate(const ModelConfig& config);

enum class SpectrumKind { SteadyState, TimeResolvedSnapshot };

/// Which re-excitation count enters the radiative probability.
enum class ReExcitation { PathCount, ThermalAverage };

struct Spectrum {
  std::vector<double> energy;  // eV, strictly ascending
  std::vector<double> intensity;
  double temperature = 0.0;
  SpectrumKind kind = SpectrumKind::SteadyState;
};

/// Per-level values before resampling onto the energy axis.
struct ChannelMap {
  std::vector<double> mu;
  std::vector<double> energy;
  std::vector<double> intensity;
  std::vector<double> chi;
};

struct SpectrumRequest {
  SpectrumKind kind = SpectrumKind::SteadyState;
  double time = 0.0;  // ps, snapshot time
  ReExcitation re = ReExcitation::ThermalAverage;
};

/// N_l / (sigma sqrt(2 pi)) exp(-(mu - E0)^2 / (2 sigma^2)).
double dos_density(const GaussianDos& dos, double mu);

/// (hw_O Gamma_phO' + hw_A Gamma_phA') t_lsc; 0 when include_gel is false.
double gel_shift(const EffectiveWidths& eff, const PhononBranches& branches,
                 const GelSettings& settings, bool include_gel);

/// Primed widths of one level at temperature T.
EffectiveWidths effective_widths_at(double mu, double T, const ModelConfig& config);

double gel_shift_at(double mu, double T, const ModelConfig& config);
double photon_energy(double mu, double T, const ModelConfig& config);

/// (Gamma_P' / (Gamma_P' + Gamma_phO' + Gamma_phA'))^re_count.
double radiative_probability(const EffectiveWidths& eff, double re_count);

double re_count_for(double T, const ModelConfig& config, ReExcitation re);

/// p rho(mu) exp(-chi t).
double time_resolved_intensity(double mu, double T, double t, const ModelConfig& config,
                               ReExcitation re = ReExcitation::PathCount);

/// p_bar rho(mu) / chi.
double steady_state_intensity(double mu, double T, const ModelConfig& config);

/// E0 +- half_width_sigmas * sigma; a single point in single-level mode.
std::vector<double> default_mu_grid(const GaussianDos& dos, const MuGridSpec& spec);

ChannelMap channel_map(double T, std::span<const double> mu_grid, const ModelConfig& config,
                       const SpectrumRequest& request, kernels::Backend backend);
ChannelMap channel_map(double T, std::span<const double> mu_grid, const ModelConfig& config,
                       const SpectrumRequest& request);

/// Resamples a channel map onto a uniform ascending energy grid. Throws
/// EnergyFoldError if mu -> E is not strictly increasing.
Spectrum resample(const ChannelMap& map, double T, SpectrumKind kind);

Spectrum steady_state_spectrum(double T, std::span<const double> mu_grid,
                               const ModelConfig& config);
Spectrum steady_state_spectrum(double T, const ModelConfig& config);

Spectrum time_resolved_spectrum(double T, double t, std::span<const double> mu_grid,
                                const ModelConfig& config,
                                ReExcitation re = ReExcitation::PathCount);
Spectrum time_resolved_spectrum(double T, double t, const ModelConfig& config,
                                ReExcitation re = ReExcitation::PathCount);

}  // namespace lse
