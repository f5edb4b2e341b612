#pragma once

// Spectral observables (peak, FWHM, integrated intensity, decay time),
// temperature sweeps and interaction ablations.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lse/spectrum.hpp"

namespace lse {

struct PeakInfo {
  double energy = 0.0;
  double intensity = 0.0;
  bool at_boundary = false;
};

/// 3-point parabolic vertex through the largest sample; boundary maxima are
/// returned as-is with at_boundary set.
PeakInfo extract_peak_info(const Spectrum& s);
double extract_peak(const Spectrum& s);

/// Outermost linear half-maximum crossings. A single-level line has width 0.
double extract_fwhm(const Spectrum& s);

/// Compensated trapezoid. A single-level line returns its weight.
double integrated_intensity(const Spectrum& s);

/// 1 / chi(mu, T) at the level whose photon energy is detect_energy (the
/// spectral peak when empty).
double decay_time(double T, const ModelConfig& config,
                  std::optional<double> detect_energy = std::nullopt);

struct SpectralObservables {
  double temperature = 0.0;
  double peak_E = 0.0;
  double fwhm = 0.0;
  double integrated_intensity = 0.0;
  double decay_time = 0.0;
  bool peak_at_boundary = false;
  bool ok = true;
  std::string error;  // set when !ok
};

struct SweepOptions {
  bool keep_spectra = false;
  /// Scale so the full-model steady-state spectrum at the lowest sweep
  /// temperature has peak intensity 1.
  bool normalize = true;
};

struct SweepResult {
  std::vector<double> temperatures;
  std::vector<SpectralObservables> observables;
  ModelToggles toggles;
  std::vector<Spectrum> spectra;  // normalized, when keep_spectra
  std::vector<std::string> warnings;
  double scale = 1.0;

  bool all_ok() const;
  std::vector<double> column(double SpectralObservables::*field) const;
};

/// Lowest allowed sweep temperature; requests below it are clamped.
inline constexpr double kMinSweepTemperature = 0.1;

SweepResult temperature_sweep(const ModelConfig& config, std::span<const double> temperatures,
                              const SweepOptions& options = {});

enum class Scenario { Full, NoGel, NoEp, FrozenEe };

ModelToggles toggles_for(Scenario scenario);
std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view name);

SweepResult run_ablation(const ModelConfig& config, Scenario scenario,
                         std::span<const double> temperatures, const SweepOptions& options = {});

/// Depth of the low-temperature peak dip: the largest amount by which a
/// point at T <= T_max lies below the highest points on both of its sides.
/// Exactly 0 for any monotone non-increasing curve.
double dip_depth(std::span<const double> temperatures, std::span<const double> peaks,
                 double T_max = 100.0);

struct SShape {
  bool present = false;
  double T_local_min = 0.0;
  double T_local_max = 0.0;
};

/// A strict interior local minimum followed by a later local maximum.
SShape detect_s_shape(std::span<const double> temperatures, std::span<const double> peaks);

/// Index of the global maximum if it is interior.
std::optional<std::size_t> interior_maximum(std::span<const double> values);

bool strictly_increasing(std::span<const double> v);
bool non_increasing(std::span<const double> v);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace lse
