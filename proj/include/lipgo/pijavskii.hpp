/**
 * @file pijavskii.hpp
 * @brief Saw-tooth global minimization and the penalty transform baseline.
 *
 * The penalty route reduces a constrained problem to an unconstrained one,
 * P*(x) = f(x) + P * max{g_1(x), ..., g_m(x), 0}, and minimizes it with the
 * classic saw-tooth cover method. Every penalty evaluation touches all the
 * constraints and the objective, which is exactly the evaluation-count
 * handicap the index scheme is measured against.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "lipgo/problem.hpp"

namespace lipgo {

struct PijavskiiResult {
  double x_min = 0.0;
  double f_min = 0.0;
  std::vector<TrialRecord> trials;
};

/**
 * Saw-tooth (Lipschitz lower envelope) minimization of f over [a,b] with
 * constant K: repeatedly subdivide the interval whose minorant minimum
 * R = 0.5 (f(l) + f(r) - K (r - l)) is smallest, placing the trial at the
 * minorant minimizer. Stops when the selected interval is no longer than
 * epsilon. Ties select the leftmost interval.
 */
inline PijavskiiResult pijavskii_minimize(const Evaluator& f, double a, double b, double K,
                                          double epsilon, long max_iterations = 1'000'000) {
  if (!(a < b)) throw ConfigError("interval must satisfy a < b");
  if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("K must be positive and finite");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");

  auto eval = [&](double x) {
    double v = f(x);
    if (!std::isfinite(v))
      throw NumericError("objective returned a non-finite value at x=" + std::to_string(x), x, 1);
    return v;
  };

  struct Piece {
    double R, l, r, fl, fr;
    bool operator>(const Piece& o) const { return std::tie(R, l) > std::tie(o.R, o.l); }
  };
  auto characteristic = [&](double l, double r, double fl, double fr) {
    return 0.5 * (fl + fr - K * (r - l));
  };

  PijavskiiResult res;
  double fa = eval(a), fb = eval(b);
  res.trials.push_back({a, 1, fa});
  res.trials.push_back({b, 1, fb});

  std::priority_queue<Piece, std::vector<Piece>, std::greater<>> queue;
  queue.push({characteristic(a, b, fa, fb), a, b, fa, fb});

  double best_x = fa <= fb ? a : b;
  double best_f = std::min(fa, fb);

  for (;;) {
    Piece p = queue.top();
    if (p.r - p.l <= epsilon) break;
    queue.pop();
    if (static_cast<long>(res.trials.size()) + 1 > max_iterations)
      throw BudgetError("iteration budget of " + std::to_string(max_iterations) +
                            " trials exhausted",
                        static_cast<long>(res.trials.size()), best_f, best_x);
    double x = 0.5 * (p.l + p.r) - (p.fr - p.fl) / (2.0 * K);
    const double scale = std::max({std::fabs(p.l), std::fabs(p.r), 1.0});
    if (!(x > p.l) || !(x < p.r) || x - p.l < scale * 0x1p-52 || p.r - x < scale * 0x1p-52)
      throw DegeneracyError("trial point collides with an endpoint of [" + std::to_string(p.l) +
                            ", " + std::to_string(p.r) + "]");
    double fx = eval(x);
    res.trials.push_back({x, 1, fx});
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
    queue.push({characteristic(p.l, x, p.fl, fx), p.l, x, p.fl, fx});
    queue.push({characteristic(x, p.r, fx, p.fr), x, p.r, fx, p.fr});
  }

  res.x_min = best_x;
  res.f_min = best_f;
  return res;
}

// ---------------------------------------------------------------------------
// Penalty transform
// ---------------------------------------------------------------------------

struct PenaltyProblem {
  ConstrainedProblem base;
  double P;      ///< penalty coefficient
  double K_pen;  ///< Lipschitz overestimate for the penalty function
};

/// K_pen defaults to K_{m+1} + P * max_j K_j, a valid overestimate for the
/// max-composed penalty; callers may override it.
inline PenaltyProblem make_penalty_problem(ConstrainedProblem base, double P,
                                           std::optional<double> k_pen = std::nullopt) {
  if (!(P > 0.0) || !std::isfinite(P)) throw ConfigError("penalty coefficient must be positive");
  double k_default = base.lipschitz_for(base.objective_index());
  double k_max_constraint = 0.0;
  for (int j = 1; j <= base.constraint_count(); ++j)
    k_max_constraint = std::max(k_max_constraint, base.lipschitz_for(j));
  k_default += P * k_max_constraint;
  double k = k_pen.value_or(k_default);
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("K_pen must be positive and finite");
  return PenaltyProblem{std::move(base), P, k};
}

/// P*(x) = f(x) + P max{g_1(x), ..., g_m(x), 0}. Evaluates every constraint
/// and the objective (m+1 evaluations).
inline double penalty_value(const PenaltyProblem& pp, double x) {
  if (!(x >= pp.base.a() && x <= pp.base.b()))
    throw DomainError("penalty evaluation outside the search interval");
  double worst = 0.0;
  for (int j = 1; j <= pp.base.constraint_count(); ++j)
    worst = std::max(worst, pp.base.evaluate_raw(j, x));
  return pp.base.evaluate_raw(pp.base.objective_index(), x) + pp.P * worst;
}

/// Saw-tooth minimization of the penalty function. Trials are tagged with
/// index m+1: every penalty evaluation touches all m+1 functions, so the
/// index-weighted count gives the (m+1) x iterations accounting.
inline PijavskiiResult pen_minimize(const PenaltyProblem& pp, double epsilon,
                                    long max_iterations = 1'000'000) {
  Evaluator f = [&pp](double x) { return penalty_value(pp, x); };
  PijavskiiResult res =
      pijavskii_minimize(f, pp.base.a(), pp.base.b(), pp.K_pen, epsilon, max_iterations);
  const int m1 = pp.base.objective_index();
  for (auto& tr : res.trials) tr.nu = m1;
  return res;
}

}  // namespace lipgo
