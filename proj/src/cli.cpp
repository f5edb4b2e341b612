#include "lse/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "lse/analysis.hpp"
#include "lse/checks.hpp"
#include "lse/error.hpp"
#include "lse/fit.hpp"
#include "lse/io.hpp"
#include "lse/kernels.hpp"
#include "lse/limit_laws.hpp"
#include "lse/parallel.hpp"
#include "lse/reference.hpp"

namespace lse {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct TempOptions {
  std::vector<double> temps;
  std::optional<double> t_min, t_max;
  std::optional<std::size_t> t_steps;

  void add(CLI::App* app) {
    app->add_option("--temps", temps, "Comma-separated temperatures in K")->delimiter(',');
    app->add_option("--t-min", t_min, "Lowest temperature (K)");
    app->add_option("--t-max", t_max, "Highest temperature (K)");
    app->add_option("--t-steps", t_steps, "Number of temperatures");
  }

  std::vector<double> resolve(const RunConfig& cfg) const {
    const bool range = t_min || t_max || t_steps;
    if (!temps.empty() && range)
      fail(ErrorKind::InvalidInput, "use either --temps or --t-min/--t-max/--t-steps");
    std::vector<double> out;
    if (!temps.empty()) {
      out = temps;
      std::sort(out.begin(), out.end());
    } else if (range) {
      if (!t_min || !t_max || !t_steps)
        fail(ErrorKind::InvalidInput, "--t-min, --t-max and --t-steps go together");
      if (*t_steps < 1 || !(*t_max >= *t_min))
        fail(ErrorKind::InvalidInput, "empty temperature range");
      out = linspace(*t_min, *t_max, *t_steps);
    } else {
      out = cfg.temperatures;
    }
    if (out.empty()) fail(ErrorKind::InvalidInput, "no temperatures given");
    for (std::size_t i = 1; i < out.size(); ++i)
      if (!(out[i] > out[i - 1])) fail(ErrorKind::InvalidInput, "duplicate temperature");
    return out;
  }
};

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    write_file_atomic(out, content);
}

std::string spectrum_file_name(double T) { return "spectrum_T" + format_number(T) + "K.csv"; }

int write_sweep(const SweepResult& sweep, const std::string& out_dir) {
  for (const auto& w : sweep.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(out_dir);
  write_file_atomic(fs::path(out_dir) / "observables.csv", format_csv(observables_table(sweep)));
  std::size_t k = 0;
  for (std::size_t i = 0; i < sweep.observables.size(); ++i) {
    const auto& o = sweep.observables[i];
    if (!o.ok) continue;
    write_file_atomic(fs::path(out_dir) / spectrum_file_name(o.temperature),
                      format_csv(spectrum_table(sweep.spectra[i])));
    ++k;
  }
  std::printf("%-10s %-12s %-12s %-14s %-12s\n", "T_K", "peak_eV", "fwhm_eV", "intensity_au",
              "lifetime_ps");
  int code = kExitOk;
  for (const auto& o : sweep.observables) {
    if (!o.ok) {
      std::printf("%-10g failed: %s\n", o.temperature, o.error.c_str());
      code = kExitNumerical;
      continue;
    }
    std::printf("%-10g %-12.6f %-12.6f %-14.6g %-12.6g\n", o.temperature, o.peak_E, o.fwhm,
                o.integrated_intensity, o.decay_time);
  }
  std::printf("wrote %s/observables.csv and %zu spectra\n", out_dir.c_str(), k);
  return code;
}

json check_json(std::string_view name, CheckStatus status, const std::string& detail) {
  return json{{"name", name}, {"status", to_string(status)}, {"detail", detail}};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

int cmd_simulate(const std::string& config_path, double T, std::optional<double> time,
                 const std::string& out) {
  const RunConfig cfg = load_config(config_path);
  const Spectrum s = time ? time_resolved_spectrum(T, *time, cfg.model)
                          : steady_state_spectrum(T, cfg.model);
  write_or_print(out, format_csv(spectrum_table(s)));
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const TempOptions& t, std::optional<Scenario> scenario,
              const std::string& out_dir) {
  const RunConfig cfg = load_config(config_path);
  SweepOptions opt;
  opt.keep_spectra = true;
  opt.normalize = cfg.normalize;
  const auto temps = t.resolve(cfg);
  const SweepResult sweep = scenario ? run_ablation(cfg.model, *scenario, temps, opt)
                                     : temperature_sweep(cfg.model, temps, opt);
  return write_sweep(sweep, out_dir);
}

FreeParameter parse_free(const std::string& spec, const ModelConfig& base) {
  FreeParameter f;
  const auto eq = spec.find('=');
  f.name = spec.substr(0, eq);
  const double value = parameter(base, f.name);
  f.initial = value;
  if (eq == std::string::npos) {
    f.lower = std::min(0.5 * value, 1.5 * value);
    f.upper = std::max(0.5 * value, 1.5 * value);
    if (value == 0.0) fail(ErrorKind::InvalidInput, f.name + ": give bounds for a zero start");
  } else {
    const std::string range = spec.substr(eq + 1);
    const auto colon = range.find(':');
    if (colon == std::string::npos) fail(ErrorKind::InvalidInput, "free parameter bounds lo:hi");
    try {
      f.lower = std::stod(range.substr(0, colon));
      f.upper = std::stod(range.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "bad bounds in " + spec);
    }
  }
  f.log_scale = f.lower > 0.0;
  return f;
}

int cmd_fit(const std::string& config_path, const std::vector<std::string>& data,
            const std::vector<std::string>& free_specs, std::uint64_t seed, const std::string& out) {
  const std::string config_text = read_file(config_path);
  const RunConfig cfg = parse_config(config_text);
  FitProblem problem;
  problem.base = cfg.model;
  problem.toggles = cfg.model.toggles;

  json data_json = json::array();
  for (const auto& d : data) {
    const auto eq = d.find('=');
    if (eq == std::string::npos) fail(ErrorKind::InvalidInput, "--data expects kind=path");
    std::string kind_name = d.substr(0, eq);
    const std::string path = d.substr(eq + 1);
    double spectrum_T = 0.0;
    if (const auto at = kind_name.find('@'); at != std::string::npos) {
      try {
        spectrum_T = std::stod(kind_name.substr(at + 1));
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidInput, "bad temperature in " + kind_name);
      }
      kind_name = kind_name.substr(0, at);
    }
    const auto kind = parse_curve_kind(kind_name);
    if (!kind) fail(ErrorKind::InvalidInput, "unknown data kind " + kind_name);
    const std::string text = read_file(path);
    ObservedCurve curve = parse_observed_csv(text, *kind);
    curve.source = path;
    curve.temperature = spectrum_T;
    problem.targets.push_back(curve);
    data_json.push_back(
        {{"kind", kind_name}, {"path", path}, {"fnv1a64", hex64(fnv1a64(text))}, {"T_K", spectrum_T}});
  }
  std::vector<std::string> specs = free_specs;
  if (specs.empty())
    specs = {"rate_laws.gamma_R0", "rate_laws.beta_ee", "dos.variance_sigma2",
             "phonons.optical.base_width"};
  for (const auto& s : specs) problem.free_parameters.push_back(parse_free(s, cfg.model));

  const FitResult r = fit(problem);

  json params = json::array();
  for (std::size_t i = 0; i < r.best_parameters.size(); ++i) {
    const auto& f = problem.free_parameters[i];
    params.push_back({{"name", f.name},
                      {"lower", f.lower},
                      {"upper", f.upper},
                      {"initial", f.initial},
                      {"log_scale", f.log_scale},
                      {"fitted", r.best_parameters[i].second}});
  }
  json curves = json::array();
  for (const auto& c : r.per_curve)
    curves.push_back({{"kind", to_string(c.kind)},
                      {"source", c.source},
                      {"mse", std::isfinite(c.mse) ? json(c.mse) : json(nullptr)},
                      {"scale", c.scale},
                      {"log_space", c.log_space}});
  const json report = {{"config", config_path},
                       {"config_fnv1a64", hex64(fnv1a64(config_text))},
                       {"data", data_json},
                       {"seed", seed},
                       {"optimizer", "nelder-mead, unit-cube coordinates, deterministic"},
                       {"kernel", kernels::to_string(kernels::active_backend())},
                       {"parameters", params},
                       {"objective", r.objective_value},
                       {"n_evaluations", r.n_evaluations},
                       {"converged", r.converged},
                       {"per_curve", curves}};
  if (!out.empty()) write_file_atomic(out, report.dump(2) + "\n");

  std::printf("objective %.6g after %zu evaluations (%s)\n", r.objective_value, r.n_evaluations,
              r.converged ? "converged" : "not converged");
  for (const auto& [name, v] : r.best_parameters) std::printf("  %-36s %.9g\n", name.c_str(), v);
  return r.converged ? kExitOk : kExitNumerical;
}

int cmd_limits(const std::string& config_path, double g, double T_e, const std::string& out) {
  const std::string text = read_file(config_path);
  const RunConfig cfg = parse_config(text);
  const ModelConfig& c = cfg.model;
  const PhysicalConstants k = c.constants();
  json checks = json::array();
  bool failed = false;
  auto record = [&](std::string_view name, CheckStatus s, const std::string& detail) {
    std::printf("%-15s %s: %s\n", std::string(to_string(s)).c_str(), std::string(name).c_str(),
                detail.c_str());
    checks.push_back(check_json(name, s, detail));
    failed |= s == CheckStatus::Fail;
  };

  {
    const CheckResult r = check_coth_identity();
    record("coth_bose_identity", r.passed ? CheckStatus::Pass : CheckStatus::Fail, r.detail);
  }

  ModelConfig single = c;
  single.branches.acoustic.base_width = 0.0;
  single.branches.acoustic.spontaneous_floor = 0.0;
  single.branches.optical.spontaneous_floor = 0.0;
  single.toggles = ModelToggles{};
  if (c.gel.mode != GelMode::Fixed) {
    record("gel_huang_rhys", CheckStatus::NotApplicable, "requires fixed t_lsc");
    record("varshni_emergence", CheckStatus::NotApplicable, "requires fixed t_lsc");
  } else {
    const auto rep = gel_hr_consistency(single, default_mu_grid(c.dos, MuGridSpec{5.0, 9}),
                                        linspace(0.0, 350.0, 8));
    record("gel_huang_rhys", rep.passed ? CheckStatus::Pass : CheckStatus::Fail,
           "optical branch only; max relative error " + fmt(rep.max_relative_error));

    // Same reduced-temperature window k_B T / hw as [50, 350] K at hw = 30 meV.
    single.dos.variance_sigma2 = 0.0;
    single.toggles.vary_ee = false;
    const double scale = c.branches.optical.energy_hw /
                         (0.030 * k.k_B() / PhysicalConstants::si().k_B());
    const auto temps = linspace(50.0 * scale, 350.0 * scale, 31);
    const SweepResult sw = temperature_sweep(single, temps);
    const auto peaks = sw.column(&SpectralObservables::peak_E);
    const VarshniFit vf = varshni_fit(temps, peaks);
    const double shift_top = c.dos.center_E0 - peaks.back();
    const double theta_ref = c.branches.optical.energy_hw / (2.0 * k.k_B());
    const bool ok = vf.rms_residual <= 0.03 * shift_top && vf.theta >= 0.5 * theta_ref &&
                    vf.theta <= 2.0 * theta_ref;
    record("varshni_emergence", ok ? CheckStatus::Pass : CheckStatus::Fail,
           "gamma " + fmt(vf.gamma) + " eV/K, theta " + fmt(vf.theta) + " K (hw/2k_B = " +
               fmt(theta_ref) + "), rms " + fmt(vf.rms_residual) + " eV vs shift " +
               fmt(shift_top) + " eV at " + fmt(temps.back()) + " K");
  }

  {
    const auto temps = linspace(10.0, 60.0, 11);
    const SweepResult sw = temperature_sweep(c, temps);
    const auto fitres = arrhenius_fit(temps, sw.column(&SpectralObservables::integrated_intensity),
                                      c.dos.center_E0, c.laws.E_a, k);
    record("arrhenius_low_T", fitres.r_squared >= 0.99 ? CheckStatus::Pass : CheckStatus::Fail,
           "zeta0 " + fmt(fitres.zeta0) + ", R^2 " + fmt(fitres.r_squared));
  }
  {
    const SweepResult sw = temperature_sweep(c, linspace(200.0, 350.0, 16));
    const auto rep = high_temp_intensity_check(sw);
    record("high_T_intensity", rep.status,
           rep.note.empty() ? "log-intensity decreasing and convex on [200, 350] K" : rep.note);
  }
  {
    const auto temps = reference_temperatures();
    const SweepResult sw = temperature_sweep(c, temps);
    const double depth = dip_depth(temps, sw.column(&SpectralObservables::peak_E));
    RedshiftBoundInputs in;
    in.xi = redshift_xi(effective_widths_at(c.dos.center_E0, T_e, c));
    in.g = g;
    in.sigma2 = c.dos.variance_sigma2;
    in.T_e = T_e;
    const double bound = redshift_bound(in, k);
    record("redshift_bound", depth <= bound ? CheckStatus::Pass : CheckStatus::Fail,
           "dip depth " + fmt(depth) + " eV vs bound " + fmt(bound) + " eV (xi " + fmt(in.xi) +
               ", g " + fmt(g) + ", T_e " + fmt(T_e) + " K)");
  }

  const json report = {{"config", config_path},
                       {"config_fnv1a64", hex64(fnv1a64(text))},
                       {"checks", checks},
                       {"passed", !failed}};
  if (!out.empty()) write_file_atomic(out, report.dump(2) + "\n");
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_selftest(const std::string& out) {
  bool ok = true;
  json arr = json::array();
  for (const auto& r : selftest_checks()) {
    std::printf("%s criterion %s (%s): %s [%.2f s]\n", r.passed ? "PASS" : "FAIL", r.id.c_str(),
                r.name.c_str(), r.detail.c_str(), r.seconds);
    arr.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    ok &= r.passed;
  }
  if (!out.empty()) write_file_atomic(out, json{{"checks", arr}, {"passed", ok}}.dump(2) + "\n");
  return ok ? kExitOk : kExitCheckFailed;
}

int exit_code_for(const LseError& e) {
  if (e.kind() == ErrorKind::Io) return kExitInput;
  return classify(e.kind()) == ErrorClass::Input ? kExitInput : kExitNumerical;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Localized-state-ensemble luminescence model"};
  app.require_subcommand(1);

  std::string config, out;
  double temp = 0.0;
  std::optional<double> time;
  TempOptions temps;
  std::string scenario_name;
  std::vector<std::string> data, free_specs;
  std::uint64_t seed = 0;
  double g = 0.0, T_e = 50.0;

  auto* simulate = app.add_subcommand("simulate", "One spectrum as CSV");
  simulate->add_option("--config", config, "Run configuration (JSON)")->required();
  simulate->add_option("--temp", temp, "Temperature (K)")->required();
  simulate->add_option("--time", time, "Snapshot time (ps); steady state when absent");
  simulate->add_option("--out", out, "Output CSV (stdout when absent)");

  auto* sweep = app.add_subcommand("sweep", "Observables and spectra over temperature");
  sweep->add_option("--config", config, "Run configuration (JSON)")->required();
  temps.add(sweep);
  sweep->add_option("--out", out, "Output directory")->required();

  auto* ablate = app.add_subcommand("ablate", "Sweep with interactions switched off");
  ablate->add_option("--config", config, "Run configuration (JSON)")->required();
  ablate->add_option("--scenario", scenario_name, "full|no-gel|no-ep|frozen-ee")->required();
  temps.add(ablate);
  ablate->add_option("--out", out, "Output directory")->required();

  auto* fitc = app.add_subcommand("fit", "Fit model parameters to observed curves");
  fitc->add_option("--config", config, "Run configuration (JSON)")->required();
  fitc->add_option("--data", data, "kind=path, kind in peak|fwhm|intensity|lifetime|spectrum@T")
      ->required();
  fitc->add_option("--free", free_specs, "name or name=lo:hi (default: four core parameters)");
  fitc->add_option("--seed", seed, "Recorded in the report");
  fitc->add_option("--out", out, "Report (JSON)");

  auto* limits = app.add_subcommand("limits", "Check the analytic limit laws");
  limits->add_option("--config", config, "Run configuration (JSON)")->required();
  limits->add_option("--g", g, "Redshift-bound parameter g in [0, 1]");
  limits->add_option("--T-e", T_e, "Redshift-bound temperature T_e (K)");
  limits->add_option("--out", out, "Report (JSON)");

  auto* selftest = app.add_subcommand("selftest", "Run the numerical property checks");
  selftest->add_option("--out", out, "Report (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(config, temp, time, out);
    if (*sweep) return cmd_sweep(config, temps, std::nullopt, out);
    if (*ablate) {
      const auto s = parse_scenario(scenario_name);
      if (!s) {
        std::cerr << "unknown scenario: " << scenario_name << "\n";
        return kExitUsage;
      }
      return cmd_sweep(config, temps, s, out);
    }
    if (*fitc) return cmd_fit(config, data, free_specs, seed, out);
    if (*limits) return cmd_limits(config, g, T_e, out);
    if (*selftest) return cmd_selftest(out);
  } catch (const LseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(args.size()), argv.data());
}

}  // namespace lse
