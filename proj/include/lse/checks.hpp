#pragma once

// Numerical self-checks run by the `selftest` subcommand and reused by the
// acceptance binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lse {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Adaptive Simpson quadrature with Richardson correction; an interval is
/// accepted once its error estimate is below its share of rel_tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-11);

/// Closed-form occupancies against RK4 over 1000 random width sets.
CheckResult check_rate_equation_fidelity(std::uint64_t seed = 1);
/// sigma_aa + sigma_bb = 1 for closed form and oracle.
CheckResult check_conservation(std::uint64_t seed = 2);
/// Time-integrated snapshot intensity equals the steady-state value.
CheckResult check_integral_identity();
/// coth(hw / 2kT) - 1 = 2 n(w, T) on a 64 x 64 grid.
CheckResult check_coth_identity();
/// gel_shift = S(T) hw over 100 random fixed-t_lsc single-branch configs.
CheckResult check_gel_huang_rhys(std::uint64_t seed = 5);
/// Gaussian-line FWHM and integral on the default grid.
CheckResult check_extraction_accuracy();

std::vector<CheckResult> selftest_checks();

}  // namespace lse
