#include "lse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lse/error.hpp"
#include "lse/parallel.hpp"

namespace lse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t argmax(const Spectrum& s) {
  if (s.intensity.empty() || s.intensity.size() != s.energy.size())
    fail(ErrorKind::InvalidInput, "spectrum empty or ragged");
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.intensity.size(); ++i)
    if (s.intensity[i] > s.intensity[best]) best = i;
  if (!(s.intensity[best] > 0.0)) fail(ErrorKind::NoPeak, "max intensity <= 0");
  return best;
}

/// mu whose photon energy is e, by linear inversion of the ascending map.
double invert_energy(const ChannelMap& map, double e) {
  const auto& E = map.energy;
  if (E.size() == 1) {
    if (e != E[0]) fail(ErrorKind::OutOfRange, "detection energy off the single line");
    return map.mu[0];
  }
  if (!(e >= E.front() && e <= E.back()))
    fail(ErrorKind::OutOfRange, "detection energy " + std::to_string(e) + " outside support");
  const auto it = std::upper_bound(E.begin(), E.end(), e);
  std::size_t k = static_cast<std::size_t>(it - E.begin());
  k = std::clamp<std::size_t>(k, 1, E.size() - 1) - 1;
  const double u = (e - E[k]) / (E[k + 1] - E[k]);
  return map.mu[k] + u * (map.mu[k + 1] - map.mu[k]);
}

struct Observation {
  SpectralObservables obs;
  Spectrum spectrum;
};

Observation observe(double T, const ModelConfig& config, std::span<const double> grid) {
  const ChannelMap map = channel_map(T, grid, config, SpectrumRequest{});
  Observation o;
  o.spectrum = resample(map, T, SpectrumKind::SteadyState);
  const PeakInfo peak = extract_peak_info(o.spectrum);
  o.obs.temperature = T;
  o.obs.peak_E = peak.energy;
  o.obs.peak_at_boundary = peak.at_boundary;
  o.obs.fwhm = extract_fwhm(o.spectrum);
  o.obs.integrated_intensity = integrated_intensity(o.spectrum);
  const double mu = invert_energy(map, peak.energy);
  o.obs.decay_time = 1.0 / effective_widths_at(mu, T, config).chi;
  return o;
}

}  // namespace

PeakInfo extract_peak_info(const Spectrum& s) {
  const std::size_t i = argmax(s);
  PeakInfo p;
  p.intensity = s.intensity[i];
  p.energy = s.energy[i];
  const std::size_t n = s.intensity.size();
  if (n == 1) return p;
  if (i == 0 || i + 1 == n) {
    p.at_boundary = true;
    return p;
  }
  const double x0 = s.energy[i - 1], x1 = s.energy[i], x2 = s.energy[i + 1];
  const double y0 = s.intensity[i - 1], y1 = s.intensity[i], y2 = s.intensity[i + 1];
  const double a = (x1 - x0) * (y1 - y2);
  const double b = (x1 - x2) * (y1 - y0);
  const double den = a - b;
  if (den != 0.0) {
    const double v = x1 - 0.5 * ((x1 - x0) * a - (x1 - x2) * b) / den;
    if (v >= x0 && v <= x2) p.energy = v;
  }
  return p;
}

double extract_peak(const Spectrum& s) { return extract_peak_info(s).energy; }

double extract_fwhm(const Spectrum& s) {
  const std::size_t i = argmax(s);
  const std::size_t n = s.intensity.size();
  if (n == 1) return 0.0;
  const double half = 0.5 * s.intensity[i];
  const auto& y = s.intensity;
  const auto& x = s.energy;
  std::size_t l = 0;
  while (y[l] < half) ++l;
  std::size_t r = n - 1;
  while (y[r] < half) --r;
  if (l == 0) fail(ErrorKind::TruncatedLine, "half maximum not reached on the low-energy side");
  if (r == n - 1) fail(ErrorKind::TruncatedLine, "half maximum not reached on the high-energy side");
  const double el = x[l - 1] + (half - y[l - 1]) / (y[l] - y[l - 1]) * (x[l] - x[l - 1]);
  const double er = x[r] + (half - y[r]) / (y[r + 1] - y[r]) * (x[r + 1] - x[r]);
  return er - el;
}

double integrated_intensity(const Spectrum& s) {
  const std::size_t n = s.intensity.size();
  if (n != s.energy.size()) fail(ErrorKind::InvalidInput, "ragged spectrum");
  if (n == 0) return 0.0;
  if (n == 1) return s.intensity[0];
  // Neumaier summation
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double term = 0.5 * (s.intensity[i] + s.intensity[i - 1]) * (s.energy[i] - s.energy[i - 1]);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double decay_time(double T, const ModelConfig& config, std::optional<double> detect_energy) {
  const auto grid = default_mu_grid(config.dos, config.grid);
  const ChannelMap map = channel_map(T, grid, config, SpectrumRequest{});
  const Spectrum s = resample(map, T, SpectrumKind::SteadyState);
  const double e = detect_energy ? *detect_energy : extract_peak(s);
  const double mu = invert_energy(map, e);
  return 1.0 / effective_widths_at(mu, T, config).chi;
}

bool SweepResult::all_ok() const {
  return std::all_of(observables.begin(), observables.end(),
                     [](const SpectralObservables& o) { return o.ok; });
}

std::vector<double> SweepResult::column(double SpectralObservables::*field) const {
  std::vector<double> out;
  out.reserve(observables.size());
  for (const auto& o : observables) out.push_back(o.*field);
  return out;
}

SweepResult temperature_sweep(const ModelConfig& config, std::span<const double> temperatures,
                              const SweepOptions& options) {
  validate(config);
  if (temperatures.empty()) fail(ErrorKind::InvalidInput, "no temperatures");
  SweepResult result;
  result.toggles = config.toggles;
  for (double T : temperatures) {
    if (!std::isfinite(T) || T < 0.0)
      fail(ErrorKind::InvalidInput, "temperature " + std::to_string(T) + " invalid");
    if (T < kMinSweepTemperature) {
      result.warnings.push_back("T=" + std::to_string(T) + " K clamped to 0.1 K");
      T = kMinSweepTemperature;
    }
    if (!result.temperatures.empty() && !(T > result.temperatures.back()))
      fail(ErrorKind::InvalidInput, "temperatures must be strictly ascending");
    result.temperatures.push_back(T);
  }

  const auto grid = default_mu_grid(config.dos, config.grid);
  const std::size_t n = result.temperatures.size();
  std::vector<Observation> rows(n);
  parallel_for(n, [&](std::size_t i) {
    const double T = result.temperatures[i];
    try {
      rows[i] = observe(T, config, grid);
    } catch (const LseError& e) {
      rows[i].obs = SpectralObservables{T, kNaN, kNaN, kNaN, kNaN, false, false, e.what()};
    }
  });

  if (options.normalize) {
    const ModelToggles full{};
    double peak = 0.0;
    if (config.toggles == full && rows[0].obs.ok) {
      peak = extract_peak_info(rows[0].spectrum).intensity;
    } else {
      ModelConfig ref = config;
      ref.toggles = full;
      peak = extract_peak_info(steady_state_spectrum(result.temperatures[0], grid, ref)).intensity;
    }
    result.scale = 1.0 / peak;
  }

  result.observables.reserve(n);
  for (auto& row : rows) {
    if (row.obs.ok) {
      row.obs.integrated_intensity *= result.scale;
      for (double& v : row.spectrum.intensity) v *= result.scale;
    }
    result.observables.push_back(row.obs);
    if (options.keep_spectra) result.spectra.push_back(std::move(row.spectrum));
  }
  return result;
}

ModelToggles toggles_for(Scenario scenario) {
  ModelToggles t;
  switch (scenario) {
    case Scenario::Full:
      break;
    case Scenario::NoGel:
      t.include_gel = false;
      break;
    case Scenario::NoEp:
      t.include_ep = false;
      break;
    case Scenario::FrozenEe:
      t.vary_ee = false;
      break;
  }
  return t;
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::Full:
      return "full";
    case Scenario::NoGel:
      return "no-gel";
    case Scenario::NoEp:
      return "no-ep";
    case Scenario::FrozenEe:
      return "frozen-ee";
  }
  return "full";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Full, Scenario::NoGel, Scenario::NoEp, Scenario::FrozenEe})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

SweepResult run_ablation(const ModelConfig& config, Scenario scenario,
                         std::span<const double> temperatures, const SweepOptions& options) {
  ModelConfig c = config;
  c.toggles = toggles_for(scenario);
  return temperature_sweep(c, temperatures, options);
}

double dip_depth(std::span<const double> temperatures, std::span<const double> peaks,
                 double T_max) {
  if (temperatures.size() != peaks.size()) fail(ErrorKind::InvalidInput, "length mismatch");
  const std::size_t n = peaks.size();
  std::vector<double> left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) left[i] = i == 0 ? peaks[0] : std::max(left[i - 1], peaks[i]);
  for (std::size_t i = n; i-- > 0;)
    right[i] = i + 1 == n ? peaks[i] : std::max(right[i + 1], peaks[i]);
  double depth = 0.0;
  for (std::size_t i = 0; i < n && temperatures[i] <= T_max; ++i)
    depth = std::max(depth, std::min(left[i] - peaks[i], right[i] - peaks[i]));
  return depth;
}

SShape detect_s_shape(std::span<const double> temperatures, std::span<const double> peaks) {
  if (temperatures.size() != peaks.size()) fail(ErrorKind::InvalidInput, "length mismatch");
  SShape s;
  const std::size_t n = peaks.size();
  if (n < 3) return s;
  std::optional<std::size_t> first_min;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!first_min && peaks[i] < peaks[i - 1] && peaks[i] <= peaks[i + 1]) first_min = i;
    if (first_min && i > *first_min && peaks[i] > peaks[i - 1] && peaks[i] >= peaks[i + 1]) {
      s.present = true;
      s.T_local_min = temperatures[*first_min];
      s.T_local_max = temperatures[i];
      return s;
    }
  }
  return s;
}

std::optional<std::size_t> interior_maximum(std::span<const double> values) {
  if (values.size() < 3) return std::nullopt;
  const auto it = std::max_element(values.begin(), values.end());
  const auto i = static_cast<std::size_t>(it - values.begin());
  if (i == 0 || i + 1 == values.size()) return std::nullopt;
  return i;
}

bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

bool non_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] <= v[i - 1])) return false;
  return true;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  v.back() = hi;
  return v;
}

}  // namespace lse
