/**
 * @file oracle.hpp
 * @brief Brute-force ground truth: feasible-region grids, Lipschitz-constant
 * estimation, and characteristic validation against the reconstructed
 * continuous index function.
 *
 * Nothing here reuses solver internals: the oracle evaluates the problem
 * functions directly, so it can serve as an independent reference in tests.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "lipgo/acif.hpp"
#include "lipgo/problem.hpp"

namespace lipgo {

struct GridReport {
  long resolution = 0;
  std::vector<std::pair<double, double>> feasible_intervals;  ///< maximal feasible runs
  std::vector<std::pair<double, double>> q_delta_intervals;   ///< runs of length >= delta
  std::optional<double> global_min;     ///< over the delta-admissible runs
  std::optional<double> global_argmin;
  std::vector<double> isolated_points;  ///< runs spanning a single grid node
};

/**
 * Evaluate all constraints on a uniform grid and report the maximal feasible
 * runs, the subset of length >= delta, and the global minimum over that
 * subset. Exact zero touching is resolved only up to the grid spacing.
 */
inline GridReport grid_report(const ConstrainedProblem& p, long resolution) {
  if (resolution < 2) throw ConfigError("grid resolution must be at least 2");
  GridReport rep;
  rep.resolution = resolution;
  const int m = p.constraint_count();
  const double h = (p.b() - p.a()) / static_cast<double>(resolution - 1);

  auto node = [&](long i) {
    return i + 1 == resolution ? p.b() : p.a() + h * static_cast<double>(i);
  };
  auto feasible = [&](double x) {
    for (int j = 1; j <= m; ++j) {
      if (p.evaluate_raw(j, x) > 0.0) return false;
    }
    return true;
  };

  std::optional<double> run_start;
  double run_last = 0.0;
  double run_min = std::numeric_limits<double>::infinity();
  double run_arg = 0.0;

  auto close_run = [&]() {
    if (!run_start) return;
    rep.feasible_intervals.emplace_back(*run_start, run_last);
    if (run_last - *run_start >= p.delta()) {
      rep.q_delta_intervals.emplace_back(*run_start, run_last);
      if (!rep.global_min || run_min < *rep.global_min) {
        rep.global_min = run_min;
        rep.global_argmin = run_arg;
      }
    }
    if (run_last == *run_start) rep.isolated_points.push_back(*run_start);
    run_start.reset();
    run_min = std::numeric_limits<double>::infinity();
  };

  for (long i = 0; i < resolution; ++i) {
    double x = node(i);
    if (feasible(x)) {
      if (!run_start) run_start = x;
      run_last = x;
      double fx = p.evaluate_raw(m + 1, x);
      if (fx < run_min) {
        run_min = fx;
        run_arg = x;
      }
    } else {
      close_run();
    }
  }
  close_run();
  return rep;
}

/// Largest adjacent-node slope magnitude on a uniform grid; callers multiply
/// by a safety factor to get an overestimate.
inline double estimate_lipschitz(const Evaluator& f, double a, double b, long resolution) {
  if (resolution < 3) throw ConfigError("Lipschitz estimation needs at least 3 nodes");
  if (!(a < b)) throw ConfigError("interval must satisfy a < b");
  const double h = (b - a) / static_cast<double>(resolution - 1);
  double prev_x = a;
  double prev = f(a);
  if (!std::isfinite(prev)) throw NumericError("non-finite value at x=" + std::to_string(a), a);
  double worst = 0.0;
  for (long i = 1; i < resolution; ++i) {
    double x = i + 1 == resolution ? b : a + h * static_cast<double>(i);
    double v = f(x);
    if (!std::isfinite(v)) throw NumericError("non-finite value at x=" + std::to_string(x), x);
    worst = std::max(worst, std::fabs(v - prev) / (x - prev_x));
    prev = v;
    prev_x = x;
  }
  return worst;
}

/**
 * Validator for the lower-bound contract of the characteristics: every
 * working interval's R must not exceed the minimum of the reconstructed
 * continuous index function over the grid nodes of the interval whose index
 * is at least the interval's larger endpoint index, up to K * spacing slack.
 *
 * The per-node index and value tables are computed once at construction so
 * that one oracle can validate every iteration of a run cheaply.
 */
class CharacteristicOracle {
 public:
  CharacteristicOracle(const ConstrainedProblem& p, long resolution)
      : problem_(&p), resolution_(resolution) {
    if (resolution < 2) throw ConfigError("grid resolution must be at least 2");
    const int m1 = p.objective_index();
    h_ = (p.b() - p.a()) / static_cast<double>(resolution - 1);
    nu_.resize(static_cast<std::size_t>(resolution));
    g_.resize(static_cast<std::size_t>(resolution));
    for (long i = 0; i < resolution; ++i) {
      double x = i + 1 == resolution ? p.b() : p.a() + h_ * static_cast<double>(i);
      int nu = m1;
      double g = 0.0;
      for (int j = 1; j <= m1; ++j) {
        g = p.evaluate_raw(j, x);
        if (j < m1 && g > 0.0) {
          nu = j;
          break;
        }
      }
      nu_[static_cast<std::size_t>(i)] = nu;
      g_[static_cast<std::size_t>(i)] = g;
    }
    double kmax = 0.0;
    for (double k : p.lipschitz()) kmax = std::max(kmax, k);
    slack_ = kmax * h_;
  }

  /// True when every working interval satisfies the lower-bound contract at
  /// this state. Vacuously true while no minimum estimate exists (the index
  /// function is not defined at feasible nodes then).
  bool validate(const SolverState& st) const {
    if (!st.zstar.value) return true;
    const double zs = *st.zstar.value;
    const int m1 = problem_->objective_index();
    auto K = problem_->lipschitz();

    for (const auto& w : st.working) {
      const int numax = std::max(w.nu_l, w.nu_r);
      long lo = static_cast<long>(std::ceil((w.l - problem_->a()) / h_ - 1e-9));
      long hi = static_cast<long>(std::floor((w.r - problem_->a()) / h_ + 1e-9));
      lo = std::max<long>(lo, 0);
      hi = std::min<long>(hi, resolution_ - 1);
      if (lo > hi) continue;

      // The contract fails iff some node of the restriction set has
      // C(node) < R - slack. The index function alone clears most nodes
      // (C >= J); the cones are only evaluated at nodes that J cannot clear.
      const double bar = w.R - slack_;
      for (long i = lo; i <= hi; ++i) {
        auto ui = static_cast<std::size_t>(i);
        if (nu_[ui] < numax) continue;
        double c = g_[ui] - (nu_[ui] == m1 ? zs : 0.0);
        if (c >= bar) continue;
        double x = node(i);
        for (const auto& tr : st.trials) {
          double jy = tr.g_value - (tr.nu == m1 ? zs : 0.0);
          c = std::max(c, jy - K[static_cast<std::size_t>(tr.nu) - 1] * std::fabs(x - tr.x));
          if (c >= bar) break;
        }
        if (c < bar) return false;
      }
    }
    return true;
  }

  double spacing() const { return h_; }
  double slack() const { return slack_; }
  long node_count() const { return resolution_; }
  int node_index(long i) const { return nu_[static_cast<std::size_t>(i)]; }
  double node_value(long i) const { return g_[static_cast<std::size_t>(i)]; }

 private:
  double node(long i) const {
    return i + 1 == resolution_ ? problem_->b() : problem_->a() + h_ * static_cast<double>(i);
  }

  const ConstrainedProblem* problem_;
  long resolution_;
  double h_ = 0.0;
  double slack_ = 0.0;
  std::vector<int> nu_;
  std::vector<double> g_;
};

/// One-shot form of the validator.
inline bool validate_characteristic(const SolverState& st, const ConstrainedProblem& p,
                                    long resolution) {
  return CharacteristicOracle(p, resolution).validate(st);
}

}  // namespace lipgo
