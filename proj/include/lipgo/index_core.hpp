/**
 * @file index_core.hpp
 * @brief History/working interval lists and the characteristic machinery.
 *
 * The history list is the immutable record of all trial intervals; the
 * working list is the mutable subset that can still contain a global
 * minimizer. Working entries carry z-values and indexes that may diverge
 * from the history record through the backward/onward motions or through
 * shifts of the running minimum estimate; the history keeps the original
 * trial results throughout.
 */
#pragma once

#include <algorithm>
#include <cfloat>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lipgo/problem.hpp"

namespace lipgo {

/// History-list entry. Never mutated after insertion.
struct IntervalRecord {
  std::size_t id = 0;  ///< stable identity across list edits
  double l = 0.0, r = 0.0;
  int nu_l = 0, nu_r = 0;      ///< starting indexes of the endpoints
  double g_l = 0.0, g_r = 0.0;  ///< raw trial values g_{nu}(endpoint)
};

/// Working-list entry. hist_* fields are immutable copies of the history
/// record; z/nu/R are the live values the solver updates.
struct WorkingInterval {
  std::size_t history_id = 0;
  double l = 0.0, r = 0.0;
  int hist_nu_l = 0, hist_nu_r = 0;
  double hist_g_l = 0.0, hist_g_r = 0.0;
  double z_l = 0.0, z_r = 0.0;
  int nu_l = 0, nu_r = 0;
  double R = 0.0;
};

/// Running estimate of the constrained minimum: value Z*_k (absent until a
/// feasible trial exists) and its coordinate x*_k. max_index_seen is the
/// highest index observed so far, kept as a diagnostic only.
struct ZEstimate {
  std::optional<double> value;
  double arg = std::numeric_limits<double>::quiet_NaN();
  int max_index_seen = 0;
};

/// z-value of a trial: the raw constraint value for indexes below m+1, the
/// objective value minus Z*_k for index m+1.
inline double z_value(const TrialRecord& trial, const ZEstimate& zstar, int objective_index) {
  if (trial.nu < objective_index) return trial.g_value;
  if (!zstar.value)
    throw StateError("z-value of a feasible trial requested with no minimum estimate");
  return trial.g_value - *zstar.value;
}

inline double lipschitz_at(std::span<const double> K, int nu) {
  return K[static_cast<std::size_t>(nu) - 1];
}

/// Auxiliary points y- = l + z(l)/K_{nu(l)} and y+ = r - z(r)/K_{nu(r)}.
/// The pair may be empty or lie outside [l,r]; callers apply the case logic.
inline std::pair<double, double> aux_points(const WorkingInterval& w, std::span<const double> K) {
  double y_minus = w.l + w.z_l / lipschitz_at(K, w.nu_l);
  double y_plus = w.r - w.z_r / lipschitz_at(K, w.nu_r);
  return {y_minus, y_plus};
}

/// Two-endpoint characteristic: a lower bound on the continuous index
/// function over the subregion of the interval that can hold a minimizer.
inline double initial_characteristic(const WorkingInterval& w, std::span<const double> K) {
  if (w.nu_l == w.nu_r)
    return 0.5 * (w.z_l + w.z_r - lipschitz_at(K, w.nu_r) * (w.r - w.l));
  auto [y_minus, y_plus] = aux_points(w, K);
  if (w.nu_l < w.nu_r) return w.z_r - lipschitz_at(K, w.nu_r) * (w.r - y_minus);
  return w.z_l - lipschitz_at(K, w.nu_l) * (y_plus - w.l);
}

/// Outcome of a motion: snapshots of the intervals it removed (left to right)
/// plus positions valid after the removals.
struct MotionResult {
  std::vector<WorkingInterval> removed;
  std::optional<std::size_t> updated;  ///< position of the re-bounded neighbor
  std::size_t new_t = 0;               ///< position of the source interval
};

/**
 * Backward motion from interval t (requires R_t > 0 and nu(l_t) < nu(r_t)).
 *
 * The cone rooted at r_t sweeps left: every interval i < t whose left
 * endpoint still sees a positive cone value is removed; at the first interval
 * j where the cone drops to zero or below, the cone value at r_j replaces the
 * recorded z(r_j) if it yields a smaller characteristic. When every interval
 * down to the first satisfies the sweep inequality they are all removed and
 * no re-bounding happens.
 */
inline MotionResult backward_motion(std::vector<WorkingInterval>& W, std::size_t t,
                                    std::span<const double> K) {
  MotionResult res;
  res.new_t = t;
  if (t == 0) return res;
  const double z_rt = W[t].z_r;
  const int nu_rt = W[t].nu_r;
  const double r_t = W[t].r;
  const double k_rt = lipschitz_at(K, nu_rt);

  std::optional<std::size_t> j;
  std::size_t first_removed = t;  // removals form the contiguous block [first_removed, t-1]
  for (std::size_t ii = t; ii-- > 0;) {
    if (z_rt - k_rt * (r_t - W[ii].l) > 0.0) {
      first_removed = ii;
    } else {
      j = ii;
      break;
    }
  }

  if (j) {
    WorkingInterval& wj = W[*j];
    const double z_minus = z_rt - k_rt * (r_t - wj.r);
    double r_new;
    if (wj.nu_l == nu_rt) {
      r_new = 0.5 * (wj.z_l + z_minus - k_rt * (wj.r - wj.l));
    } else if (wj.nu_l < nu_rt) {
      r_new = z_minus -
              lipschitz_at(K, wj.nu_r) * (wj.r - wj.l - wj.z_l / lipschitz_at(K, wj.nu_l));
    } else {
      r_new = wj.z_l - lipschitz_at(K, wj.nu_l) * (wj.r - wj.l - z_minus / k_rt);
    }
    if (r_new < wj.R) {
      wj.z_r = z_minus;
      wj.nu_r = nu_rt;
      wj.R = r_new;
      res.updated = *j;
    }
  }

  if (first_removed < t) {
    res.removed.assign(W.begin() + static_cast<std::ptrdiff_t>(first_removed),
                       W.begin() + static_cast<std::ptrdiff_t>(t));
    W.erase(W.begin() + static_cast<std::ptrdiff_t>(first_removed),
            W.begin() + static_cast<std::ptrdiff_t>(t));
    res.new_t = t - res.removed.size();
  }
  return res;
}

/// Mirror of backward_motion: the cone rooted at l_t sweeps right (requires
/// R_t > 0 and nu(l_t) > nu(r_t)).
inline MotionResult onward_motion(std::vector<WorkingInterval>& W, std::size_t t,
                                  std::span<const double> K) {
  MotionResult res;
  res.new_t = t;
  const double z_lt = W[t].z_l;
  const int nu_lt = W[t].nu_l;
  const double l_t = W[t].l;
  const double k_lt = lipschitz_at(K, nu_lt);

  std::optional<std::size_t> j;
  std::size_t last_removed = t;  // removals form the contiguous block [t+1, last_removed]
  for (std::size_t ii = t + 1; ii < W.size(); ++ii) {
    if (z_lt - k_lt * (W[ii].r - l_t) > 0.0) {
      last_removed = ii;
    } else {
      j = ii;
      break;
    }
  }

  if (j) {
    WorkingInterval& wj = W[*j];
    const double z_plus = z_lt - k_lt * (wj.l - l_t);
    double r_new;
    if (nu_lt == wj.nu_r) {
      r_new = 0.5 * (z_plus + wj.z_r - lipschitz_at(K, wj.nu_r) * (wj.r - wj.l));
    } else if (nu_lt < wj.nu_r) {
      r_new = wj.z_r - lipschitz_at(K, wj.nu_r) * (wj.r - wj.l - z_plus / k_lt);
    } else {
      r_new = z_plus - k_lt * (wj.r - wj.l - wj.z_r / lipschitz_at(K, wj.nu_r));
    }
    if (r_new < wj.R) {
      wj.z_l = z_plus;
      wj.nu_l = nu_lt;
      wj.R = r_new;
      res.updated = *j - (last_removed - t);  // position after the removals below
    }
  }

  if (last_removed > t) {
    res.removed.assign(W.begin() + static_cast<std::ptrdiff_t>(t) + 1,
                       W.begin() + static_cast<std::ptrdiff_t>(last_removed) + 1);
    W.erase(W.begin() + static_cast<std::ptrdiff_t>(t) + 1,
            W.begin() + static_cast<std::ptrdiff_t>(last_removed) + 1);
  }
  return res;
}

/**
 * After the minimum estimate drops from old_zstar to new_zstar, every
 * endpoint whose current index is m+1 (except the trial point that caused
 * the drop) shifts its z-value up by the difference. Characteristics are
 * stale afterwards; callers recompute them.
 */
inline void shift_z_on_new_zstar(std::vector<WorkingInterval>& W, double old_zstar,
                                 double new_zstar, int objective_index,
                                 std::optional<double> skip_point = std::nullopt) {
  const double shift = old_zstar - new_zstar;
  for (auto& w : W) {
    if (w.nu_l == objective_index && !(skip_point && w.l == *skip_point)) w.z_l += shift;
    if (w.nu_r == objective_index && !(skip_point && w.r == *skip_point)) w.z_r += shift;
  }
}

/// Position of the leftmost interval attaining the minimal characteristic,
/// or nothing when the working list is empty (the infeasibility stop).
inline std::optional<std::size_t> select_interval(std::span<const WorkingInterval> W) {
  if (W.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < W.size(); ++i) {
    if (W[i].R < W[best].R) best = i;
  }
  return best;
}

/// Trial point for the subdivision of interval w. Throws DegeneracyError if
/// the point does not fall strictly inside (l, r) with representable spacing.
inline double subdivision_point(const WorkingInterval& w, std::span<const double> K) {
  auto [y_minus, y_plus] = aux_points(w, K);
  double x;
  if (w.nu_l == w.nu_r) {
    x = 0.5 * (y_minus + y_plus);
  } else if (w.nu_l < w.nu_r) {
    x = 0.5 * (y_minus + w.r);
  } else {
    x = 0.5 * (w.l + y_plus);
  }
  const double scale = std::max({std::fabs(w.l), std::fabs(w.r), 1.0});
  if (!(x > w.l) || !(x < w.r) || (x - w.l) < scale * DBL_EPSILON ||
      (w.r - x) < scale * DBL_EPSILON) {
    throw DegeneracyError("subdivision point " + std::to_string(x) +
                          " collides with an endpoint of [" + std::to_string(w.l) + ", " +
                          std::to_string(w.r) + "]");
  }
  return x;
}

}  // namespace lipgo
