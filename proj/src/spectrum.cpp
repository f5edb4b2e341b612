#include "lse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lse/error.hpp"

namespace lse {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidInput, what);
}

kernels::ChannelParams kernel_params(double T, const ModelConfig& c, const SpectrumRequest& req) {
  const PathWeights w = path_weights(c.path);
  kernels::ChannelParams p;
  p.w_sc = w.w_sc;
  p.w_re = w.w_re;
  p.w_tr = w.w_tr;
  p.w_p = w.w_p;
  p.C = c.laws.C;
  p.dos_center = c.dos.center_E0;
  if (c.dos.single_level()) {
    p.dos_inv_two_var = 0.0;
    p.dos_norm = c.dos.density_Nl;
  } else {
    p.dos_inv_two_var = 1.0 / (2.0 * c.dos.variance_sigma2);
    p.dos_norm = c.dos.density_Nl / std::sqrt(2.0 * std::numbers::pi * c.dos.variance_sigma2);
  }
  p.re_count = re_count_for(T, c, req.re);
  p.include_gel = c.toggles.include_gel;
  p.gel_self_consistent = c.gel.mode == GelMode::SelfConsistent;
  p.gel_t_lsc = c.gel.t_lsc_fixed;
  p.gel_alpha = c.gel.alpha;
  p.hw_optical = c.branches.optical.energy_hw;
  p.hw_acoustic = c.branches.acoustic.energy_hw;
  p.steady_state = req.kind == SpectrumKind::SteadyState;
  p.time = req.time;
  return p;
}

}  // namespace

void validate(const ModelConfig& c) {
  require(std::isfinite(c.dos.center_E0), "dos.center_E0 not finite");
  require(std::isfinite(c.dos.variance_sigma2) && c.dos.variance_sigma2 >= 0.0,
          "dos.variance_sigma2 must be >= 0");
  require(std::isfinite(c.dos.density_Nl) && c.dos.density_Nl > 0.0, "dos.density_Nl must be > 0");
  for (const PhononBranch* b : {&c.branches.optical, &c.branches.acoustic}) {
    require(std::isfinite(b->energy_hw) && b->energy_hw > 0.0, "phonon energy must be > 0");
    require(b->base_width >= 0.0 && b->spontaneous_floor >= 0.0, "negative phonon width");
  }
  if (c.gel.mode == GelMode::Fixed)
    require(c.gel.t_lsc_fixed > 0.0, "gel.t_lsc must be > 0 in fixed mode");
  else
    require(c.gel.alpha > 0.0, "gel.alpha must be > 0 in self-consistent mode");
  require(c.grid.points >= 16, "mu grid needs >= 16 points");
  require(c.grid.half_width_sigmas > 0.0, "mu grid half width must be > 0");
  require(c.rate_model != nullptr, "rate model missing");
}

double dos_density(const GaussianDos& dos, double mu) {
  if (dos.single_level()) fail(ErrorKind::SingleLevelMode, "variance_sigma2 = 0");
  if (!(dos.variance_sigma2 > 0.0)) fail(ErrorKind::InvalidInput, "variance_sigma2 < 0");
  const double d = mu - dos.center_E0;
  return dos.density_Nl / std::sqrt(2.0 * std::numbers::pi * dos.variance_sigma2) *
         std::exp(-(d * d) / (2.0 * dos.variance_sigma2));
}

double gel_shift(const EffectiveWidths& eff, const PhononBranches& branches,
                 const GelSettings& settings, bool include_gel) {
  if (!include_gel) return 0.0;
  const double t_lsc =
      settings.mode == GelMode::SelfConsistent ? settings.alpha / eff.chi : settings.t_lsc_fixed;
  return (branches.optical.energy_hw * eff.gamma_phO_eff +
          branches.acoustic.energy_hw * eff.gamma_phA_eff) *
         t_lsc;
}

EffectiveWidths effective_widths_at(double mu, double T, const ModelConfig& c) {
  const LevelWidths w = c.rate_model->widths(c.laws, c.branches, mu, T, c.toggles, c.constants());
  return effective_widths(w, c.path, c.laws.C);
}

double gel_shift_at(double mu, double T, const ModelConfig& c) {
  return gel_shift(effective_widths_at(mu, T, c), c.branches, c.gel, c.toggles.include_gel);
}

double photon_energy(double mu, double T, const ModelConfig& c) {
  return mu - gel_shift_at(mu, T, c);
}

double radiative_probability(const EffectiveWidths& eff, double re_count) {
  if (!(re_count >= 0.0)) fail(ErrorKind::InvalidInput, "re_count must be >= 0");
  if (re_count == 0.0) return 1.0;
  const double den = eff.gamma_P_eff + eff.gamma_phO_eff + eff.gamma_phA_eff;
  if (!(den > 0.0))
    fail(ErrorKind::DegenerateSystem, "Gamma_P' + Gamma_ph' = 0 with re_count > 0");
  return std::pow(eff.gamma_P_eff / den, re_count);
}

double re_count_for(double T, const ModelConfig& c, ReExcitation re) {
  if (re == ReExcitation::PathCount) return c.path.n_re;
  return c.rate_model->re_excitation(c.laws, c.branches, T, c.constants());
}

double time_resolved_intensity(double mu, double T, double t, const ModelConfig& c,
                               ReExcitation re) {
  if (!(t >= 0.0)) fail(ErrorKind::InvalidInput, "t must be >= 0");
  const EffectiveWidths eff = effective_widths_at(mu, T, c);
  return radiative_probability(eff, re_count_for(T, c, re)) * dos_density(c.dos, mu) *
         std::exp(-eff.chi * t);
}

double steady_state_intensity(double mu, double T, const ModelConfig& c) {
  const EffectiveWidths eff = effective_widths_at(mu, T, c);
  if (!(eff.chi > 0.0)) fail(ErrorKind::DegenerateSystem, "chi = 0");
  return radiative_probability(eff, re_count_for(T, c, ReExcitation::ThermalAverage)) *
         dos_density(c.dos, mu) / eff.chi;
}

std::vector<double> default_mu_grid(const GaussianDos& dos, const MuGridSpec& spec) {
  if (dos.single_level()) return {dos.center_E0};
  if (spec.points < 2) fail(ErrorKind::InvalidInput, "mu grid needs >= 2 points");
  const double sigma = std::sqrt(dos.variance_sigma2);
  const double lo = dos.center_E0 - spec.half_width_sigmas * sigma;
  const double hi = dos.center_E0 + spec.half_width_sigmas * sigma;
  std::vector<double> mu(spec.points);
  const double n1 = static_cast<double>(spec.points - 1);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const double s = static_cast<double>(i) / n1;
    mu[i] = lo * (1.0 - s) + hi * s;
  }
  mu.back() = hi;
  return mu;
}

ChannelMap channel_map(double T, std::span<const double> mu_grid, const ModelConfig& c,
                       const SpectrumRequest& req, kernels::Backend backend) {
  validate(c);
  if (!std::isfinite(T) || T < 0.0) fail(ErrorKind::InvalidInput, "temperature must be >= 0");
  if (req.kind == SpectrumKind::TimeResolvedSnapshot && !(req.time >= 0.0))
    fail(ErrorKind::InvalidInput, "snapshot time must be >= 0");

  std::vector<double> single;
  if (c.dos.single_level()) {
    single.push_back(c.dos.center_E0);
    mu_grid = single;
  } else {
    if (mu_grid.size() < 16) fail(ErrorKind::InvalidInput, "mu grid needs >= 16 points");
    for (std::size_t i = 1; i < mu_grid.size(); ++i)
      if (!(mu_grid[i] > mu_grid[i - 1]))
        fail(ErrorKind::InvalidInput, "mu grid must be strictly ascending");
  }

  const std::size_t n = mu_grid.size();
  std::vector<double> gl(n), gr(n), gp(n), go(n), ga(n);
  c.rate_model->widths_on_grid(c.laws, c.branches, mu_grid, T, c.toggles, c.constants(),
                               {gl, gr, gp, go, ga});

  const kernels::ChannelParams p = kernel_params(T, c, req);
  if (p.re_count != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double den = p.w_p * gp[i] + p.w_sc * go[i] + p.w_sc * ga[i];
      if (!(den > 0.0))
        fail(ErrorKind::DegenerateSystem, "Gamma_P' + Gamma_ph' = 0 with re_count > 0");
    }
  }

  ChannelMap map;
  map.mu.assign(mu_grid.begin(), mu_grid.end());
  map.energy.resize(n);
  map.intensity.resize(n);
  map.chi.resize(n);
  kernels::evaluate_channels(p, {map.mu, gl, gr, gp, go, ga},
                             {map.energy, map.intensity, map.chi}, backend);
  for (std::size_t i = 0; i < n && p.steady_state; ++i)
    if (!(map.chi[i] > 0.0))
      fail(ErrorKind::DegenerateSystem, "chi = 0 at mu=" + std::to_string(map.mu[i]));
  return map;
}

ChannelMap channel_map(double T, std::span<const double> mu_grid, const ModelConfig& c,
                       const SpectrumRequest& req) {
  return channel_map(T, mu_grid, c, req, kernels::active_backend());
}

Spectrum resample(const ChannelMap& map, double T, SpectrumKind kind) {
  const std::size_t n = map.energy.size();
  Spectrum s;
  s.temperature = T;
  s.kind = kind;
  if (n == 0) fail(ErrorKind::InvalidInput, "empty channel map");
  if (n == 1) {
    s.energy = map.energy;
    s.intensity = map.intensity;
    return s;
  }
  for (std::size_t i = 1; i < n; ++i)
    if (!(map.energy[i] > map.energy[i - 1]))
      fail(ErrorKind::EnergyFold, "mu->E not increasing at mu=" + std::to_string(map.mu[i]));

  const double lo = map.energy.front();
  const double hi = map.energy.back();
  s.energy.resize(n);
  s.intensity.resize(n);
  const double n1 = static_cast<double>(n - 1);
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double f = static_cast<double>(j) / n1;
    const double e = j + 1 == n ? hi : lo * (1.0 - f) + hi * f;
    while (k + 2 < n && map.energy[k + 1] < e) ++k;
    const double e0 = map.energy[k];
    const double e1 = map.energy[k + 1];
    const double u = std::clamp((e - e0) / (e1 - e0), 0.0, 1.0);
    s.energy[j] = e;
    s.intensity[j] = map.intensity[k] + u * (map.intensity[k + 1] - map.intensity[k]);
  }
  return s;
}

Spectrum steady_state_spectrum(double T, std::span<const double> mu_grid, const ModelConfig& c) {
  SpectrumRequest req;
  return resample(channel_map(T, mu_grid, c, req), T, SpectrumKind::SteadyState);
}

Spectrum steady_state_spectrum(double T, const ModelConfig& c) {
  const auto grid = default_mu_grid(c.dos, c.grid);
  return steady_state_spectrum(T, grid, c);
}

Spectrum time_resolved_spectrum(double T, double t, std::span<const double> mu_grid,
                                const ModelConfig& c, ReExcitation re) {
  SpectrumRequest req;
  req.kind = SpectrumKind::TimeResolvedSnapshot;
  req.time = t;
  req.re = re;
  return resample(channel_map(T, mu_grid, c, req), T, SpectrumKind::TimeResolvedSnapshot);
}

Spectrum time_resolved_spectrum(double T, double t, const ModelConfig& c, ReExcitation re) {
  const auto grid = default_mu_grid(c.dos, c.grid);
  return time_resolved_spectrum(T, t, grid, c, re);
}

}  // namespace lse
