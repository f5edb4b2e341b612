// Acceptance criteria: one PASS/FAIL line per criterion.
// Usage: lse_acceptance [--cli PATH] [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lse/analysis.hpp"
#include "lse/checks.hpp"
#include "lse/fit.hpp"
#include "lse/io.hpp"
#include "lse/limit_laws.hpp"
#include "lse/reference.hpp"

using namespace lse;

namespace {

using Clock = std::chrono::steady_clock;

std::string cli_path;

std::string g(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double r_squared_linear(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

/// Single-level, optical-only, fixed t_lsc config whose GEL shift is
/// f hw n(w, T).
ModelConfig varshni_config(double f, double hw) {
  ModelConfig c = reference_config();
  c.dos.variance_sigma2 = 0.0;
  c.branches.optical = {hw, 1.0, 0.0};
  c.branches.acoustic = {0.0175, 0.0, 0.0};
  c.toggles = ModelToggles{};
  c.gel.mode = GelMode::Fixed;
  const double w_sc = path_weights(c.path).w_sc;
  c.gel.t_lsc_fixed = f / (w_sc * c.branches.optical.base_width);
  return c;
}

CheckResult criterion_6() {
  const auto t0 = Clock::now();
  CheckResult r{"6", "Varshni emergence", false, "", 0.0};
  const double hw = 0.030;
  const auto temps = linspace(50.0, 350.0, 31);
  const double theta_ref = hw / (2.0 * PhysicalConstants::si().k_B());

  std::vector<double> fs = {0.5, 1.0, 2.0, 4.0}, gammas;
  VarshniFit at2;
  double shift350 = 0.0, engine_vs_formula = 0.0;
  for (double f : fs) {
    const ModelConfig c = varshni_config(f, hw);
    const SweepResult sw = temperature_sweep(c, temps);
    const auto peaks = sw.column(&SpectralObservables::peak_E);
    for (std::size_t i = 0; i < temps.size(); ++i) {
      const double expect = c.dos.center_E0 - f * hw * bose_occupation(hw, temps[i]);
      engine_vs_formula = std::max(engine_vs_formula, std::abs(peaks[i] - expect));
    }
    const VarshniFit vf = varshni_fit(temps, peaks);
    gammas.push_back(vf.gamma);
    if (f == 2.0) {
      at2 = vf;
      shift350 = c.dos.center_E0 - peaks.back();
    }
  }
  const double r2 = r_squared_linear(fs, gammas);
  const bool rms_ok = at2.rms_residual <= 0.03 * shift350;
  const bool theta_ok = at2.theta >= 0.5 * theta_ref && at2.theta <= 2.0 * theta_ref;
  const bool engine_ok = engine_vs_formula <= 1e-12;
  r.passed = rms_ok && theta_ok && r2 >= 0.999 && engine_ok;
  r.detail = "f=2: rms " + g(at2.rms_residual / shift350 * 100) + "% of 350 K shift (<= 3%), theta " +
             g(at2.theta) + " K = " + g(at2.theta / theta_ref) +
             " x hw/2k_B (need [0.5, 2]); gamma vs f R^2 " + g(r2) +
             " (>= 0.999); engine vs f*hw*n max diff " + g(engine_vs_formula) + " eV";
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult criterion_7() {
  const auto t0 = Clock::now();
  CheckResult r{"7", "Fig. 4 collapse", false, "", 0.0};
  const auto temps = reference_temperatures();
  std::vector<double> depths;
  std::vector<double> last_peaks;
  for (double s2 : {0.05, 0.04, 0.03, 0.02, 0.01, 0.0}) {
    ModelConfig c = reference_config();
    c.dos.variance_sigma2 = s2;
    const SweepResult sw = temperature_sweep(c, temps);
    last_peaks = sw.column(&SpectralObservables::peak_E);
    depths.push_back(dip_depth(temps, last_peaks));
  }
  const bool monotone = non_increasing(depths);
  const bool zero = depths.back() == 0.0;
  const bool varshni_like = non_increasing(last_peaks);
  r.passed = monotone && zero && varshni_like;
  std::string list;
  for (double d : depths) list += (list.empty() ? "" : ", ") + g(d);
  r.detail = "dip depths [" + list + "] eV; non-increasing " + (monotone ? "yes" : "no") +
             ", zero at sigma2=0 " + (zero ? "yes" : "no") + ", sigma2=0 peak non-increasing " +
             (varshni_like ? "yes" : "no");
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult criterion_8() {
  const auto t0 = Clock::now();
  CheckResult r{"8", "S-shape existence", false, "", 0.0};
  const auto temps = reference_temperatures();
  const SweepResult sw = temperature_sweep(reference_config(), temps);
  const double elapsed = seconds_since(t0);
  const auto peaks = sw.column(&SpectralObservables::peak_E);
  const auto taus = sw.column(&SpectralObservables::decay_time);
  const SShape s = detect_s_shape(temps, peaks);
  const auto tau_max = interior_maximum(taus);
  r.passed = sw.all_ok() && s.present && tau_max.has_value() && elapsed < 10.0;
  r.detail = "peak local min at " + g(s.T_local_min) + " K, local max at " + g(s.T_local_max) +
             " K (" + (s.present ? "S-shape" : "no S-shape") + "); tau interior max " +
             (tau_max ? g(taus[*tau_max]) + " ps at " + g(temps[*tau_max]) + " K" : "absent") +
             "; 30-T sweep " + g(elapsed) + " s (< 10 s)";
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult criterion_9() {
  const auto t0 = Clock::now();
  CheckResult r{"9", "ablation signatures", false, "", 0.0};
  const ModelConfig c = reference_config();
  const auto temps = reference_temperatures();
  auto at = [&](const SweepResult& sw, double T, double SpectralObservables::*field) {
    for (const auto& o : sw.observables)
      if (o.temperature == T) return o.*field;
    return std::nan("");
  };
  auto window = [&](const SweepResult& sw, double SpectralObservables::*field) {
    std::vector<double> v;
    for (const auto& o : sw.observables)
      if (o.temperature >= 50.0 && o.temperature <= 300.0) v.push_back(o.*field);
    return v;
  };

  const SweepResult full = run_ablation(c, Scenario::Full, temps);
  const SweepResult no_gel = run_ablation(c, Scenario::NoGel, temps);
  const SweepResult no_ep = run_ablation(c, Scenario::NoEp, temps);
  const SweepResult frozen = run_ablation(c, Scenario::FrozenEe, temps);

  const double p50 = at(no_gel, 50.0, &SpectralObservables::peak_E);
  const double p300 = at(no_gel, 300.0, &SpectralObservables::peak_E);
  const bool gel_ok = p300 >= p50;
  const bool ep_ok = strictly_increasing(window(no_ep, &SpectralObservables::integrated_intensity)) &&
                     strictly_increasing(window(no_ep, &SpectralObservables::decay_time));
  double dmax = 0.0;
  for (std::size_t i = 0; i < temps.size(); ++i)
    if (temps[i] < 50.0)
      dmax = std::max(dmax, std::abs(frozen.observables[i].peak_E - full.observables[i].peak_E));
  const bool ee_ok = dmax > 1e-6;
  r.passed = full.all_ok() && no_gel.all_ok() && no_ep.all_ok() && frozen.all_ok() && gel_ok &&
             ep_ok && ee_ok;
  r.detail = std::string("no-gel peak(300 K) - peak(50 K) = ") + g(p300 - p50) + " eV (>= 0); no-ep " +
             "intensity and lifetime increasing on [50, 300] K: " + (ep_ok ? "yes" : "no") +
             "; frozen-ee max |dpeak| below 50 K = " + g(dmax) + " eV (> 1e-6)";
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult criterion_10() {
  const auto t0 = Clock::now();
  CheckResult r{"10", "low-T Arrhenius form", false, "", 0.0};
  const ModelConfig c = reference_config();
  const auto temps = linspace(10.0, 60.0, 11);
  const SweepResult sw = temperature_sweep(c, temps);
  const ArrheniusFit fit = arrhenius_fit(temps, sw.column(&SpectralObservables::integrated_intensity),
                                         c.dos.center_E0, c.laws.E_a);
  r.passed = sw.all_ok() && fit.r_squared >= 0.99;
  r.detail = "zeta0 " + g(fit.zeta0) + ", R^2 " + g(fit.r_squared) + " (>= 0.99) on 11 points in [10, 60] K";
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult criterion_12() {
  const auto t0 = Clock::now();
  CheckResult r{"12", "fit recovery", false, "", 0.0};
  const ModelConfig c = reference_config();
  int passed = 0;
  double worst = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RecoveryReport rep = synthetic_recovery(c, 0.01, seed);
    worst = std::max(worst, rep.max_relative_error);
    if (rep.max_relative_error <= 0.05) ++passed;
    const auto k = static_cast<std::size_t>(
        std::max_element(rep.relative_error.begin(), rep.relative_error.end()) -
        rep.relative_error.begin());
    per_seed += (per_seed.empty() ? "" : ", ") + g(rep.max_relative_error * 100) + "% (" +
                rep.names[k] + ")";
  }
  r.seconds = seconds_since(t0);
  r.passed = passed == 10 && r.seconds < 60.0;
  r.detail = std::to_string(passed) + "/10 seeds within 5%; worst " + g(worst * 100) + "%; " +
             g(r.seconds) + " s (< 60 s); per seed: " + per_seed;
  return r;
}

CheckResult criterion_13() {
  const auto t0 = Clock::now();
  CheckResult r{"13", "I/O round-trips", false, "", 0.0};
  const std::string cfg1 = serialize_config(reference_run_config());
  const std::string cfg2 = serialize_config(parse_config(cfg1));
  const std::string cfg3 = serialize_config(parse_config(cfg2));
  const bool cfg_ok = cfg1 == cfg2 && cfg2 == cfg3;

  const SweepResult sw = temperature_sweep(reference_config(), reference_temperatures(),
                                           SweepOptions{true, true});
  bool csv_ok = true;
  for (const CsvTable& t : {observables_table(sw), spectrum_table(sw.spectra[0])}) {
    const std::string a = format_csv(t);
    const std::string b = format_csv(parse_csv(a));
    csv_ok &= a == b && format_csv(parse_csv(b)) == b;
  }

  int code = -1;
  if (!cli_path.empty()) {
    const std::string cmd = "\"" + cli_path + "\" selftest > /dev/null";
    const int status = std::system(cmd.c_str());
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  r.passed = cfg_ok && csv_ok && code == 0;
  r.detail = std::string("config fixpoint ") + (cfg_ok ? "bitwise" : "differs") + ", CSV fixpoint " +
             (csv_ok ? "bitwise" : "differs") + ", `lse selftest` exit " +
             (cli_path.empty() ? "not run (no --cli)" : std::to_string(code));
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc)
      cli_path = argv[++i];
    else
      wanted.push_back(a);
  }

  const std::vector<std::pair<std::string, std::function<CheckResult()>>> criteria = {
      {"1", [] { return check_rate_equation_fidelity(); }},
      {"2", [] { return check_conservation(); }},
      {"3", [] { return check_integral_identity(); }},
      {"4", [] { return check_coth_identity(); }},
      {"5", [] { return check_gel_huang_rhys(); }},
      {"6", criterion_6},
      {"7", criterion_7},
      {"8", criterion_8},
      {"9", criterion_9},
      {"10", criterion_10},
      {"11", [] { return check_extraction_accuracy(); }},
      {"12", criterion_12},
      {"13", criterion_13},
  };

  int failures = 0, ran = 0;
  for (const auto& [id, run] : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    ++ran;
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {id, "exception", false, e.what(), 0.0};
    }
    std::printf("%s criterion %s (%s): %s\n", r.passed ? "PASS" : "FAIL", id.c_str(), r.name.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
    failures += r.passed ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
