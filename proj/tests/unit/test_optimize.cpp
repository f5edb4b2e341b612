#include <doctest.h>

#include <cmath>
#include <limits>

#include "lse/error.hpp"
#include "lse/optimize.hpp"

using namespace lse;

namespace {

bool throws_kind(ErrorKind kind, const auto& fn) {
  try {
    fn();
  } catch (const LseError& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_SUITE("optimize") {
  TEST_CASE("bounded quadratic") {
    const std::vector<double> x0 = {0.0};
    const auto r = nelder_mead_minimize([](std::span<const double> x) { return (x[0] - 2) * (x[0] - 2); },
                                        x0, Bounds{{-10}, {10}});
    CHECK(std::abs(r.x[0] - 2.0) <= 1e-8);
    CHECK(r.converged);
  }

  TEST_CASE("Rosenbrock") {
    const std::vector<double> x0 = {-1.2, 1.0};
    auto rosen = [](std::span<const double> x) {
      return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    NelderMeadOptions opt;
    opt.restarts = 2;
    const auto r = nelder_mead_minimize(rosen, x0, Bounds{}, opt);
    CHECK(std::abs(r.x[0] - 1.0) <= 1e-5);
    CHECK(std::abs(r.x[1] - 1.0) <= 1e-5);
    // dense grid refinement around the result finds nothing lower
    double best = r.f;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) {
        const double p[2] = {r.x[0] + i * 1e-6, r.x[1] + j * 1e-6};
        best = std::min(best, rosen(p));
      }
    CHECK(r.f <= best + 1e-12);
  }

  TEST_CASE("constant objective converges at start") {
    const std::vector<double> x0 = {0.3, -0.2};
    const auto r = nelder_mead_minimize([](std::span<const double>) { return 4.0; }, x0, Bounds{});
    CHECK(r.converged);
    CHECK(r.x == x0);
    CHECK(r.f == 4.0);
    CHECK(r.termination == Termination::ObjectiveSpread);
  }

  TEST_CASE("errors") {
    const std::vector<double> x0 = {1.0};
    const auto nan = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK(throws_kind(ErrorKind::InvalidStart, [&] { nelder_mead_minimize(nan, x0, Bounds{}); }));
    const auto cliff = [](std::span<const double> x) {
      return x[0] == 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    const auto r = nelder_mead_minimize(cliff, x0, Bounds{});
    CHECK(r.x[0] == 1.0);
  }

  TEST_CASE("property: bounds respected, history non-increasing, deterministic") {
    std::vector<std::vector<double>> seen;
    auto f = [&](std::span<const double> x) {
      seen.emplace_back(x.begin(), x.end());
      return std::pow(x[0] + 5, 2) + std::pow(x[1] - 9, 2) + x[0] * x[1] * 0.1;
    };
    const std::vector<double> x0 = {0.5, 0.5};
    const Bounds b{{-1, -1}, {1, 2}};
    const auto r = nelder_mead_minimize(f, x0, b);
    for (const auto& x : seen) {
      CHECK(x[0] >= -1.0);
      CHECK(x[0] <= 1.0);
      CHECK(x[1] >= -1.0);
      CHECK(x[1] <= 2.0);
    }
    for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
    CHECK(r.x[0] == doctest::Approx(-1.0));
    CHECK(r.x[1] == doctest::Approx(2.0));
    seen.clear();
    const auto r2 = nelder_mead_minimize(f, x0, b);
    CHECK(r2.x == r.x);
    CHECK(r2.n_evaluations == r.n_evaluations);
  }

  TEST_CASE("max evaluations") {
    NelderMeadOptions opt;
    opt.max_evaluations = 30;
    const std::vector<double> x0 = {-1.2, 1.0};
    const auto r = nelder_mead_minimize(
        [](std::span<const double> x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); },
        x0, Bounds{}, opt);
    CHECK(!r.converged);
    CHECK(r.termination == Termination::MaxEvaluations);
    CHECK(r.n_evaluations <= 30);
  }

  TEST_CASE("golden section") {
    CHECK(golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, -2, 5) ==
          doctest::Approx(0.3).epsilon(1e-9));
  }
}
