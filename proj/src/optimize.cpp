#include "lse/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lse/error.hpp"

namespace lse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  std::vector<double> lo, hi;

  void clip(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
};

Box make_box(const Bounds& b, std::size_t n) {
  Box box;
  box.lo = b.lower.empty() ? std::vector<double>(n, -kInf) : b.lower;
  box.hi = b.upper.empty() ? std::vector<double>(n, kInf) : b.upper;
  if (box.lo.size() != n || box.hi.size() != n)
    fail(ErrorKind::InvalidInput, "bounds dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(box.lo[i] < box.hi[i]))
      fail(ErrorKind::InvalidInput, "lower bound must be < upper bound");
  return box;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const Objective& f, std::span<const double> start,
                                      const Bounds& bounds, const NelderMeadOptions& opt) {
  const std::size_t n = start.size();
  if (n == 0) fail(ErrorKind::InvalidInput, "dimension must be >= 1");
  const Box box = make_box(bounds, n);
  std::vector<double> x0(start.begin(), start.end());
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x0[i]) || x0[i] < box.lo[i] || x0[i] > box.hi[i])
      fail(ErrorKind::InvalidStart, "start outside bounds in coordinate " + std::to_string(i));

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.n_evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  const double f0 = f(x0);
  ++res.n_evaluations;
  if (!std::isfinite(f0)) fail(ErrorKind::InvalidStart, "objective not finite at start");

  std::vector<std::vector<double>> xs(n + 1);
  std::vector<double> fs(n + 1);
  auto build = [&](const std::vector<double>& centre, double fc) {
    xs[0] = centre;
    fs[0] = fc;
    for (std::size_t i = 0; i < n; ++i) {
      const bool bounded = std::isfinite(box.lo[i]) && std::isfinite(box.hi[i]);
      const double h = opt.initial_step *
                       (bounded ? box.hi[i] - box.lo[i] : std::max(1.0, std::abs(centre[i])));
      std::vector<double> v = centre;
      v[i] += h;
      if (v[i] > box.hi[i]) v[i] = centre[i] - h;
      box.clip(v);
      xs[i + 1] = std::move(v);
      fs[i + 1] = eval(xs[i + 1]);
    }
  };
  build(x0, f0);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  std::size_t restarts_left = opt.restarts;
  double best_at_restart = kInf;

  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    {
      std::vector<std::vector<double>> sx(n + 1);
      std::vector<double> sf(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        sx[i] = std::move(xs[order[i]]);
        sf[i] = fs[order[i]];
      }
      xs.swap(sx);
      fs.swap(sf);
    }
    if (!std::isfinite(fs[0])) fail(ErrorKind::Diverged, "all simplex vertices non-finite");
    res.best_history.push_back(fs[0]);

    bool done = false;
    if (std::isfinite(fs[n]) && fs[n] - fs[0] <= opt.ftol * std::abs(fs[0])) {
      res.termination = Termination::ObjectiveSpread;
      done = true;
    } else {
      double size = 0.0;
      for (std::size_t v = 1; v <= n; ++v)
        for (std::size_t i = 0; i < n; ++i)
          size = std::max(size, std::abs(xs[v][i] - xs[0][i]) / std::max(1.0, std::abs(xs[0][i])));
      if (size < opt.xtol) {
        res.termination = Termination::SimplexSize;
        done = true;
      }
    }
    if (done) {
      if (restarts_left > 0 && fs[0] < best_at_restart && res.n_evaluations + n + 2 <= opt.max_evaluations) {
        --restarts_left;
        best_at_restart = fs[0];
        const std::vector<double> centre = xs[0];
        build(centre, fs[0]);
        continue;
      }
      res.converged = true;
      break;
    }
    if (res.n_evaluations + 2 > opt.max_evaluations) {
      res.termination = Termination::MaxEvaluations;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += xs[v][i];
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto& xw = xs[n];
    for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - xw[i]);
    box.clip(xr);
    const double fr = eval(xr);

    if (fr < fs[0]) {
      for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (centroid[i] - xw[i]);
      box.clip(xe);
      const double fe = eval(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
      continue;
    }
    if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
      continue;
    }
    const bool outside = fr < fs[n];
    for (std::size_t i = 0; i < n; ++i)
      xc[i] = outside ? centroid[i] + 0.5 * (xr[i] - centroid[i])
                      : centroid[i] + 0.5 * (xw[i] - centroid[i]);
    box.clip(xc);
    const double fc = eval(xc);
    if (outside ? fc <= fr : fc < fs[n]) {
      xs[n] = xc;
      fs[n] = fc;
      continue;
    }
    if (res.n_evaluations + n > opt.max_evaluations) {
      res.termination = Termination::MaxEvaluations;
      break;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t i = 0; i < n; ++i) xs[v][i] = xs[0][i] + 0.5 * (xs[v][i] - xs[0][i]);
      box.clip(xs[v]);
      fs[v] = eval(xs[v]);
    }
  }

  res.x = xs[0];
  res.f = fs[0];
  return res;
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  if (!(a < b)) fail(ErrorKind::InvalidInput, "golden section needs a < b");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace lse
