/**
 * @file synthetic.hpp
 * @brief Random piecewise-linear constrained problems with exactly known
 * Lipschitz constants, for property tests and quick experiments.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "lipgo/acif.hpp"
#include "lipgo/problem.hpp"

namespace lipgo {

/// Continuous piecewise-linear function on [xs.front(), xs.back()].
/// Its exact Lipschitz constant is the largest segment slope magnitude.
struct PiecewiseLinear {
  std::vector<double> xs;  ///< strictly increasing knots
  std::vector<double> ys;

  double operator()(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }

  double exact_lipschitz() const {
    double worst = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      worst = std::max(worst, std::fabs(ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
    return worst;
  }
};

struct SyntheticProblem {
  ConstrainedProblem problem;
  AcifConfig config;
  std::vector<PiecewiseLinear> pieces;  ///< g_1..g_m, f
  std::vector<double> exact_l;          ///< true Lipschitz constants
};

/**
 * Draw a problem with up to three piecewise-linear constraints and a
 * piecewise-linear objective on [0,1]. Constraints are shifted so that a
 * nontrivial part of the interval is feasible; slopes are drawn directly so
 * the exact Lipschitz constants are known, and K = 1.1 L.
 */
inline SyntheticProblem make_random_piecewise_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> m_dist(0, 3);
  std::uniform_int_distribution<int> knots_dist(4, 9);
  std::uniform_real_distribution<double> slope_scale_dist(2.0, 8.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int m = m_dist(rng);

  auto draw_piece = [&]() {
    for (;;) {
      int n = knots_dist(rng);
      std::vector<double> xs{0.0};
      for (int i = 0; i < n - 2; ++i) xs.push_back(unit(rng));
      xs.push_back(1.0);
      std::sort(xs.begin(), xs.end());
      bool distinct = true;
      for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] - xs[i - 1] < 1e-3) distinct = false;
      }
      if (!distinct) continue;

      double scale = slope_scale_dist(rng);
      std::uniform_real_distribution<double> slope(-scale, scale);
      std::vector<double> ys{unit(rng) - 0.5};
      for (std::size_t i = 1; i < xs.size(); ++i)
        ys.push_back(ys[i - 1] + slope(rng) * (xs[i] - xs[i - 1]));
      PiecewiseLinear pl{std::move(xs), std::move(ys)};
      if (pl.exact_lipschitz() >= 0.2) return pl;
    }
  };

  std::vector<PiecewiseLinear> pieces;
  std::vector<Evaluator> evaluators;
  std::vector<double> exact_l;

  for (int j = 0; j < m; ++j) {
    PiecewiseLinear pl = draw_piece();
    // shift so that g crosses zero somewhere strictly inside the value range
    double lo = *std::min_element(pl.ys.begin(), pl.ys.end());
    double hi = *std::max_element(pl.ys.begin(), pl.ys.end());
    double c = lo + (0.25 + 0.5 * unit(rng)) * (hi - lo);
    for (auto& y : pl.ys) y -= c;
    exact_l.push_back(pl.exact_lipschitz());
    pieces.push_back(pl);
    evaluators.push_back([pl](double x) { return pl(x); });
  }
  {
    PiecewiseLinear pl = draw_piece();
    exact_l.push_back(pl.exact_lipschitz());
    pieces.push_back(pl);
    evaluators.push_back([pl](double x) { return pl(x); });
  }

  std::vector<double> k;
  for (double l : exact_l) k.push_back(1.1 * l);

  std::uniform_real_distribution<double> delta_dist(0.02, 0.06);
  double delta = delta_dist(rng);
  double epsilon = delta / (2.0 + 3.0 * unit(rng));

  AcifConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.max_iterations = 100'000;

  return SyntheticProblem{ConstrainedProblem(std::move(evaluators), std::move(k), 0.0, 1.0, delta),
                          cfg, std::move(pieces), std::move(exact_l)};
}

}  // namespace lipgo
