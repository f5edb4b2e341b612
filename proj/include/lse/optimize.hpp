#pragma once

// Bounded Nelder-Mead and the small 1-D helpers used by the fits.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lse {

using Objective = std::function<double(std::span<const double>)>;

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct NelderMeadOptions {
  std::size_t max_evaluations = 20000;
  /// Stop when every vertex is within xtol * max(1, |x_best|) of the best
  /// vertex in every coordinate.
  double xtol = 1e-10;
  /// Stop when f_worst - f_best <= ftol * |f_best|.
  double ftol = 1e-12;
  /// Initial edge length as a fraction of the box width (or of
  /// max(1, |x0|) for an unbounded coordinate).
  double initial_step = 0.1;
  /// Rebuild the simplex around the optimum this many times after
  /// convergence.
  std::size_t restarts = 0;
};

enum class Termination { SimplexSize, ObjectiveSpread, MaxEvaluations };

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t n_evaluations = 0;
  bool converged = false;
  Termination termination = Termination::MaxEvaluations;
  /// Best objective after each iteration.
  std::vector<double> best_history;
};

/// Box constraints are enforced by clipping every trial point. Throws
/// InvalidStart when f(start) is not finite and Diverged when every vertex
/// of the simplex is non-finite.
NelderMeadResult nelder_mead_minimize(const Objective& f, std::span<const double> start,
                                      const Bounds& bounds, const NelderMeadOptions& options = {});

/// Golden-section search for a unimodal function on [a, b].
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12);

}  // namespace lse
