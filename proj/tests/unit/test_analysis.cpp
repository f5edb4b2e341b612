#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "lse/analysis.hpp"
#include "lse/error.hpp"
#include "lse/reference.hpp"

using namespace lse;

namespace {

Spectrum gaussian(double center, double sigma, double lo, double hi, std::size_t n, double amp = 1.0) {
  Spectrum s;
  s.energy = linspace(lo, hi, n);
  for (double e : s.energy) {
    const double d = (e - center) / sigma;
    s.intensity.push_back(amp * std::exp(-0.5 * d * d));
  }
  return s;
}

/// Dense-grid oracle: evaluates the same channel map on a 10x finer mu grid.
Spectrum dense_reference(double T) {
  ModelConfig c = reference_config();
  c.grid.points = 20001;
  return steady_state_spectrum(T, c);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("peak of a symmetric Gaussian") {
    CHECK(extract_peak(gaussian(3.0, 0.05, 2.75, 3.25, 2001)) == doctest::Approx(3.0).epsilon(1e-14));
    // off-grid centre recovered by the parabola
    const auto s = gaussian(3.00013, 0.05, 2.75, 3.25, 201);
    CHECK(std::abs(extract_peak(s) - 3.00013) < 1e-5);
  }

  TEST_CASE("peak at boundary is flagged") {
    Spectrum s;
    s.energy = {1, 2, 3, 4};
    s.intensity = {4, 3, 2, 1};
    const auto p = extract_peak_info(s);
    CHECK(p.at_boundary);
    CHECK(p.energy == 1.0);
  }

  TEST_CASE("zero spectrum") {
    Spectrum s;
    s.energy = linspace(0, 1, 11);
    s.intensity.assign(11, 0.0);
    CHECK_THROWS_AS(extract_fwhm(s), LseError);
    CHECK(integrated_intensity(s) == 0.0);
  }

  TEST_CASE("gaussian FWHM and integral") {
    for (double sigma : {0.005, 0.02, 0.1}) {
      const auto s = gaussian(3.0, sigma, 3.0 - 5 * sigma, 3.0 + 5 * sigma, 2001);
      CHECK(extract_fwhm(s) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma).epsilon(1e-3));
      CHECK(integrated_intensity(s) == doctest::Approx(sigma * std::sqrt(2 * std::numbers::pi)).epsilon(1e-4));
    }
  }

  TEST_CASE("truncated line") {
    const auto s = gaussian(3.0, 0.5, 2.9, 3.5, 101);
    CHECK_THROWS_AS(extract_fwhm(s), LseError);
  }

  TEST_CASE("integral of disjoint lines is additive") {
    const auto a = gaussian(2.5, 0.02, 2.0, 4.0, 4001);
    const auto b = gaussian(3.5, 0.03, 2.0, 4.0, 4001, 2.0);
    Spectrum sum = a;
    for (std::size_t i = 0; i < sum.intensity.size(); ++i) sum.intensity[i] += b.intensity[i];
    CHECK(integrated_intensity(sum) ==
          doctest::Approx(integrated_intensity(a) + integrated_intensity(b)).epsilon(1e-13));
  }

  TEST_CASE("reference spectrum extraction against a 10x denser grid") {
    for (double T : {10.0, 100.0, 300.0}) {
      const Spectrum coarse = steady_state_spectrum(T, reference_config());
      const Spectrum dense = dense_reference(T);
      const double step = coarse.energy[1] - coarse.energy[0];
      std::size_t k = 0;
      for (std::size_t i = 1; i < dense.intensity.size(); ++i)
        if (dense.intensity[i] > dense.intensity[k]) k = i;
      CHECK(std::abs(extract_peak(coarse) - dense.energy[k]) <= step);
      CHECK(extract_fwhm(coarse) == doctest::Approx(extract_fwhm(dense)).epsilon(5e-3));
    }
  }

  TEST_CASE("property: extraction is scale equivariant") {
    const Spectrum s = steady_state_spectrum(120.0, reference_config());
    for (double c : {1e-6, 0.3, 7.0, 1e5}) {
      Spectrum t = s;
      for (double& v : t.intensity) v *= c;
      CHECK(extract_peak(t) == doctest::Approx(extract_peak(s)).epsilon(1e-14));
      CHECK(extract_fwhm(t) == doctest::Approx(extract_fwhm(s)).epsilon(1e-12));
      CHECK(integrated_intensity(t) == doctest::Approx(c * integrated_intensity(s)).epsilon(1e-12));
    }
  }

  TEST_CASE("decay time is 1/chi at the detection level") {
    const ModelConfig c = reference_config();
    const double T = 80.0;
    const double mu = 3.01;
    const double E = photon_energy(mu, T, c);
    CHECK(decay_time(T, c, E) == doctest::Approx(1.0 / effective_widths_at(mu, T, c).chi).epsilon(1e-9));
    CHECK_THROWS_AS(decay_time(T, c, 10.0), LseError);
  }

  TEST_CASE("decay time without phonons and frozen e-e is T independent") {
    ModelConfig c = reference_config();
    c.laws.E_a = 0.0;
    c.toggles.include_ep = false;
    c.toggles.vary_ee = false;
    c.toggles.include_gel = false;
    const double t0 = decay_time(10.0, c, 3.05);
    for (double T : {50.0, 200.0, 300.0}) CHECK(decay_time(T, c, 3.05) == doctest::Approx(t0).epsilon(1e-14));
  }

  TEST_CASE("reference lifetime has a maximum below 100 K") {
    const auto temps = reference_temperatures();
    const auto sw = temperature_sweep(reference_config(), temps);
    const auto taus = sw.column(&SpectralObservables::decay_time);
    const auto k = interior_maximum(taus);
    REQUIRE(k.has_value());
    CHECK(temps[*k] < 100.0);
  }

  TEST_CASE("sweep normalization and clamping") {
    const ModelConfig c = reference_config();
    std::vector<double> temps = {0.0, 50.0, 300.0};
    SweepOptions opt;
    opt.keep_spectra = true;
    const auto sw = temperature_sweep(c, temps, opt);
    CHECK(sw.temperatures[0] == kMinSweepTemperature);
    CHECK(!sw.warnings.empty());
    double mx = 0;
    for (double v : sw.spectra[0].intensity) mx = std::max(mx, v);
    CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> bad = {10.0, 10.0};
    CHECK_THROWS_AS(temperature_sweep(c, bad), LseError);
  }

  TEST_CASE("ablation normalization uses the full model") {
    const ModelConfig c = reference_config();
    std::vector<double> temps = {10.0, 100.0};
    const auto full = run_ablation(c, Scenario::Full, temps);
    const auto no_ep = run_ablation(c, Scenario::NoEp, temps);
    CHECK(no_ep.scale == doctest::Approx(full.scale).epsilon(1e-15));
  }

  TEST_CASE("property: sweep is deterministic and independent of thread count") {
    const ModelConfig c = reference_config();
    const auto temps = linspace(10.0, 300.0, 12);
    setenv("LSE_THREADS", "1", 1);
    const auto a = temperature_sweep(c, temps);
    setenv("LSE_THREADS", "4", 1);
    const auto b = temperature_sweep(c, temps);
    unsetenv("LSE_THREADS");
    for (std::size_t i = 0; i < temps.size(); ++i) {
      CHECK(a.observables[i].peak_E == b.observables[i].peak_E);
      CHECK(a.observables[i].fwhm == b.observables[i].fwhm);
      CHECK(a.observables[i].integrated_intensity == b.observables[i].integrated_intensity);
      CHECK(a.observables[i].decay_time == b.observables[i].decay_time);
    }
  }

  TEST_CASE("flat rates give a constant peak at E0") {
    ModelConfig c = reference_config();
    c.laws.E_a = 0.0;
    c.toggles = toggles_for(Scenario::NoEp);
    c.toggles.include_gel = false;
    c.toggles.vary_ee = false;
    const auto sw = temperature_sweep(c, linspace(10, 300, 8));
    for (double p : sw.column(&SpectralObservables::peak_E))
      CHECK(p == doctest::Approx(c.dos.center_E0).epsilon(1e-12));
  }

  TEST_CASE("single-level peak curve is E0 - gel shift") {
    ModelConfig c = reference_config();
    c.dos.variance_sigma2 = 0.0;
    const auto temps = linspace(10, 300, 10);
    const auto sw = temperature_sweep(c, temps);
    for (std::size_t i = 0; i < temps.size(); ++i) {
      CHECK(sw.observables[i].peak_E == c.dos.center_E0 - gel_shift_at(c.dos.center_E0, temps[i], c));
      CHECK(sw.observables[i].fwhm == 0.0);
    }
  }

  TEST_CASE("full-model intensity decreases on [150, 300] K") {
    const auto sw = temperature_sweep(reference_config(), linspace(150, 300, 16));
    CHECK(non_increasing(sw.column(&SpectralObservables::integrated_intensity)));
  }

  TEST_CASE("scenario names") {
    for (Scenario s : {Scenario::Full, Scenario::NoGel, Scenario::NoEp, Scenario::FrozenEe})
      CHECK(parse_scenario(to_string(s)) == s);
    CHECK(!parse_scenario("nope"));
    CHECK(to_string(Scenario::FrozenEe) == "frozen-ee");
  }

  TEST_CASE("dip depth") {
    std::vector<double> T = {10, 50, 100, 150, 200};
    std::vector<double> mono = {3.0, 2.99, 2.98, 2.97, 2.96};
    CHECK(dip_depth(T, mono) == 0.0);
    std::vector<double> dip = {3.0, 2.98, 2.99, 2.995, 2.97};
    CHECK(dip_depth(T, dip) == doctest::Approx(0.015));
    const auto s = detect_s_shape(T, dip);
    CHECK(s.present);
    CHECK(s.T_local_min == 50.0);
    CHECK(s.T_local_max == 150.0);
    CHECK(!detect_s_shape(T, mono).present);
  }

  TEST_CASE("linspace") {
    const auto v = linspace(10, 300, 30);
    CHECK(v.size() == 30);
    CHECK(v[7] == 80.0);
    CHECK(v.back() == 300.0);
    CHECK(linspace(5, 6, 1) == std::vector<double>{5});
  }
}
