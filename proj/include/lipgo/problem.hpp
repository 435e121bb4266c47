/**
 * @file problem.hpp
 * @brief Constrained univariate problems and index-scheme trials.
 *
 * A problem holds an ordered list of constraints g_1..g_m and an objective
 * f = g_{m+1} over an interval [a,b], together with Lipschitz overestimates
 * K_1..K_{m+1}. Constraint j+1 is only meaningful where g_j <= 0; a trial at
 * a point evaluates the functions in order until the first violation.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lipgo {

using Evaluator = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid problem or solver configuration (bad interval, non-positive K, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Query outside the search interval [a,b].
struct DomainError : Error {
  using Error::Error;
};

/// An evaluator produced a non-finite value, or a function was applied
/// outside its mathematical domain. Carries the coordinate and the 1-based
/// function index (0 when not tied to a problem function).
struct NumericError : Error {
  NumericError(const std::string& msg, double at, int function_index = 0)
      : Error(msg), x(at), index(function_index) {}
  double x;
  int index;
};

/// Internal solver-state violation (e.g. z-value of a feasible point
/// requested before any estimate of the minimum exists).
struct StateError : Error {
  using Error::Error;
};

/// A subdivision point collided with an existing endpoint.
struct DegeneracyError : Error {
  using Error::Error;
};

/// Iteration cap reached; carries what was known when the budget ran out.
struct BudgetError : Error {
  BudgetError(const std::string& msg, long iters, std::optional<double> best_value,
              std::optional<double> best_point)
      : Error(msg), iterations(iters), zstar(best_value), xstar(best_point) {}
  long iterations;
  std::optional<double> zstar;
  std::optional<double> xstar;
};

/// Text input (expression or problem file) could not be parsed.
struct ParseError : Error {
  ParseError(const std::string& msg, int line_, int column_)
      : Error(msg), line(line_), column(column_) {}
  int line;
  int column;
};

// ---------------------------------------------------------------------------
// Problem and trials
// ---------------------------------------------------------------------------

/// Result of one trial: the first index whose function came out positive
/// (or m+1 when all constraints hold) and the value of that function.
struct TrialRecord {
  double x = 0.0;
  int nu = 0;            ///< starting index, 1..m+1
  double g_value = 0.0;  ///< g_nu(x)
};

/**
 * Ordered constrained problem over [a,b].
 *
 * Evaluators are total functions over [a,b]; the nested-domain restriction
 * (g_{j+1} defined only where g_j <= 0) is enforced by call order, never by
 * the evaluators themselves, so the same problem serves both the ordered
 * index-scheme path and full-evaluation consumers (oracle, penalty method).
 * Immutable after construction and safe to share between concurrent runs as
 * long as the evaluators are side-effect-free.
 */
class ConstrainedProblem {
 public:
  ConstrainedProblem(std::vector<Evaluator> functions, std::vector<double> lipschitz,
                     double a, double b, double delta)
      : functions_(std::move(functions)),
        lipschitz_(std::move(lipschitz)),
        a_(a),
        b_(b),
        delta_(delta) {
    if (functions_.empty()) throw ConfigError("problem needs at least an objective");
    if (lipschitz_.size() != functions_.size())
      throw ConfigError("need one Lipschitz constant per function");
    for (std::size_t j = 0; j < lipschitz_.size(); ++j) {
      if (!(lipschitz_[j] > 0.0) || !std::isfinite(lipschitz_[j]))
        throw ConfigError("Lipschitz constant " + std::to_string(j + 1) +
                          " must be positive and finite");
    }
    if (!(a_ < b_)) throw ConfigError("interval must satisfy a < b");
    if (!(delta_ > 0.0) || !std::isfinite(delta_))
      throw ConfigError("delta must be positive");
    for (const auto& f : functions_) {
      if (!f) throw ConfigError("null evaluator");
    }
  }

  int constraint_count() const { return static_cast<int>(functions_.size()) - 1; }
  int objective_index() const { return static_cast<int>(functions_.size()); }  ///< m+1
  double a() const { return a_; }
  double b() const { return b_; }
  double delta() const { return delta_; }

  std::span<const double> lipschitz() const { return lipschitz_; }
  double lipschitz_for(int nu) const { return lipschitz_[static_cast<std::size_t>(nu) - 1]; }

  /// Evaluate function j (1-based, g_j; j = m+1 is the objective) with no
  /// ordering enforcement. Used by the oracle and the penalty transform.
  double evaluate_raw(int j, double x) const {
    double v = functions_[static_cast<std::size_t>(j) - 1](x);
    if (!std::isfinite(v))
      throw NumericError("function " + std::to_string(j) + " returned a non-finite value at x=" +
                             std::to_string(x),
                         x, j);
    return v;
  }

 private:
  std::vector<Evaluator> functions_;
  std::vector<double> lipschitz_;
  double a_, b_, delta_;
};

/**
 * Execute a trial at x: evaluate g_1, g_2, ... until the first j with
 * g_j(x) > 0 and return (j, g_j(x)); if no constraint is violated, return
 * (m+1, f(x)). Makes exactly nu evaluator calls.
 */
inline TrialRecord evaluate_trial(const ConstrainedProblem& p, double x) {
  if (!(x >= p.a() && x <= p.b()))
    throw DomainError("trial point " + std::to_string(x) + " outside [" +
                      std::to_string(p.a()) + ", " + std::to_string(p.b()) + "]");
  const int m = p.constraint_count();
  for (int j = 1; j <= m; ++j) {
    double v = p.evaluate_raw(j, x);
    if (v > 0.0) return {x, j, v};
  }
  return {x, m + 1, p.evaluate_raw(m + 1, x)};
}

/// Total evaluation count of a trial sequence: sum of the indexes, matching
/// the N_{g_1} + 2 N_{g_2} + ... + (m+1) N_f accounting.
inline long count_evaluations(std::span<const TrialRecord> trials) {
  long total = 0;
  for (const auto& t : trials) total += t.nu;
  return total;
}

}  // namespace lipgo
