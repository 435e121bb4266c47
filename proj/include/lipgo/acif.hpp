/**
 * @file acif.hpp
 * @brief Index-scheme solver for constrained univariate Lipschitz problems.
 *
 * The solver keeps a history list (immutable trial data) and a working list
 * (intervals that can still contain a minimizer). Each iteration subdivides
 * the working interval with the smallest characteristic, runs a trial at the
 * new point, refreshes z-values and characteristics, and prunes intervals
 * that provably lie outside the delta-admissible feasible set. It terminates
 * with an infeasibility certificate (empty working list), with two-sided
 * bounds on the constrained minimum, or with a support-function lower bound.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipgo/index_core.hpp"
#include "lipgo/problem.hpp"

namespace lipgo {

enum class QdeltaMode { Full, Simplified };

struct AcifConfig {
  double epsilon = 0.0;  ///< search accuracy, 0 < epsilon <= delta
  double delta = 0.0;    ///< minimal admissible feasible-interval length
  long max_iterations = 1'000'000;
  QdeltaMode qdelta_mode = QdeltaMode::Full;
};

enum class OutcomeKind { Infeasible, BoundedSolution, SupportBoundedSolution };

enum class TraceAction { Trial, Exclude, Motion, Restart, Stop };

inline const char* trace_action_name(TraceAction a) {
  switch (a) {
    case TraceAction::Trial: return "trial";
    case TraceAction::Exclude: return "exclude";
    case TraceAction::Motion: return "motion";
    case TraceAction::Restart: return "restart";
    case TraceAction::Stop: return "stop";
  }
  return "?";
}

/// One solver event. The first nine fields form the trace CSV schema;
/// the l/r/xstar fields carry interval bounds and the current minimizer
/// estimate for consumers that need them (tests, diagnostics).
struct TraceEvent {
  long k = 0;  ///< trial count when the event fired
  TraceAction action = TraceAction::Trial;
  std::optional<double> x;
  std::optional<int> nu;
  std::optional<double> g_value;
  std::optional<double> zstar;
  std::size_t q = 0;  ///< working-list size after the event
  std::optional<std::size_t> t;  ///< selected interval, 1-based position
  std::optional<double> r_t;     ///< its characteristic
  std::optional<double> l, r;    ///< bounds of the affected interval
  std::optional<double> xstar;   ///< minimizer estimate when the event fired
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Infeasible;
  std::optional<double> lower, upper;
  std::optional<double> minimizer;
  std::vector<TrialRecord> trace;
  std::vector<double> v_delta;
  std::vector<TraceEvent> events;  ///< full per-iteration event log
};

struct SolverState {
  const ConstrainedProblem* problem = nullptr;
  std::vector<IntervalRecord> history;   ///< partition of [a,b], sorted by l
  std::vector<WorkingInterval> working;  ///< subset of history, sorted by l
  ZEstimate zstar;
  std::vector<double> v_delta;  ///< sorted feasible points excluded as too isolated
  std::vector<TrialRecord> trials;
  std::vector<long> index_counts;  ///< trials per starting index
  long restarts = 0;
  std::vector<TraceEvent> events;
  std::size_t next_history_id = 0;

  long iteration() const { return static_cast<long>(trials.size()); }
};

/// Hook for tests and diagnostics; fired after each iteration's bookkeeping
/// settles (characteristics current).
struct AcifObserver {
  virtual ~AcifObserver() = default;
  virtual void on_iteration(const SolverState&) {}
};

enum class QdeltaResult { MayBelong, Excluded };

// ---------------------------------------------------------------------------
// Small state helpers
// ---------------------------------------------------------------------------

namespace detail {

inline bool in_v_delta(const SolverState& st, double x) {
  return std::binary_search(st.v_delta.begin(), st.v_delta.end(), x);
}

inline void add_v_delta(SolverState& st, double x) {
  auto it = std::lower_bound(st.v_delta.begin(), st.v_delta.end(), x);
  if (it == st.v_delta.end() || *it != x) st.v_delta.insert(it, x);
}

inline std::size_t history_pos(const SolverState& st, const WorkingInterval& w) {
  auto it = std::lower_bound(st.history.begin(), st.history.end(), w.l,
                             [](const IntervalRecord& h, double l) { return h.l < l; });
  if (it == st.history.end() || it->l != w.l || it->r != w.r || it->id != w.history_id)
    throw StateError("working interval has no matching history record");
  return static_cast<std::size_t>(it - st.history.begin());
}

inline std::optional<std::size_t> working_pos_by_left(const SolverState& st, double l) {
  auto it = std::lower_bound(st.working.begin(), st.working.end(), l,
                             [](const WorkingInterval& w, double v) { return w.l < v; });
  if (it == st.working.end() || it->l != l) return std::nullopt;
  return static_cast<std::size_t>(it - st.working.begin());
}

inline void emit_removal(SolverState& st, const WorkingInterval& w, TraceAction reason) {
  TraceEvent ev;
  ev.k = st.iteration();
  ev.action = reason;
  ev.x = w.l;
  ev.zstar = st.zstar.value;
  ev.q = st.working.size();
  ev.l = w.l;
  ev.r = w.r;
  if (st.zstar.value) ev.xstar = st.zstar.arg;
  st.events.push_back(ev);
}

/// Minimum objective value over the recorded feasible trial points that are
/// not excluded by V^delta, scanned over the history partition.
inline ZEstimate history_minimum(const SolverState& st) {
  const int m1 = st.problem->objective_index();
  ZEstimate best;
  best.max_index_seen = st.zstar.max_index_seen;
  auto consider = [&](double x, int nu, double g) {
    if (nu != m1 || in_v_delta(st, x)) return;
    if (!best.value || g < *best.value) {
      best.value = g;
      best.arg = x;
    }
  };
  for (const auto& h : st.history) consider(h.l, h.nu_l, h.g_l);
  if (!st.history.empty()) {
    const auto& last = st.history.back();
    consider(last.r, last.nu_r, last.g_r);
  }
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spec operations
// ---------------------------------------------------------------------------

/**
 * Grid check of delta-admissibility around a candidate minimizer: scans
 * [x-delta, x+delta] clipped to [a,b] at spacing epsilon and looks for a
 * contiguous feasible run of length at least delta containing x.
 */
inline bool local_feasibility_check(const ConstrainedProblem& p, double x,
                                    const AcifConfig& cfg) {
  const int m = p.constraint_count();
  auto feasible = [&](double u) {
    for (int j = 1; j <= m; ++j) {
      if (p.evaluate_raw(j, u) > 0.0) return false;
    }
    return true;
  };
  const long n = static_cast<long>(std::ceil(cfg.delta / cfg.epsilon));
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(2 * n + 1));
  std::size_t xi = 0;
  for (long i = -n; i <= n; ++i) {
    double u = x + static_cast<double>(i) * cfg.epsilon;
    if (u < p.a() || u > p.b()) continue;
    if (i == 0) xi = nodes.size();
    nodes.push_back(u);
  }
  if (nodes.empty() || !feasible(nodes[xi])) return false;
  std::size_t lo = xi, hi = xi;
  while (lo > 0 && feasible(nodes[lo - 1])) --lo;
  while (hi + 1 < nodes.size() && feasible(nodes[hi + 1])) ++hi;
  return nodes[hi] - nodes[lo] >= cfg.delta - 0.5 * cfg.epsilon;
}

/**
 * Saw-tooth lower bound on the objective over the working intervals, built
 * from the feasible trial points with the objective's Lipschitz overestimate.
 * Absent when no feasible trial exists.
 */
inline std::optional<double> support_lower_bound(std::span<const TrialRecord> trials,
                                                 std::span<const WorkingInterval> W,
                                                 double k_objective, int objective_index) {
  std::vector<std::pair<double, double>> pts;  // (x, f)
  for (const auto& tr : trials) {
    if (tr.nu == objective_index) pts.emplace_back(tr.x, tr.g_value);
  }
  if (pts.empty()) return std::nullopt;
  std::sort(pts.begin(), pts.end());

  auto phi = [&](double u) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& [px, pf] : pts) v = std::max(v, pf - k_objective * std::fabs(u - px));
    return v;
  };

  // candidate minimizers: interval endpoints plus pairwise cone intersections
  std::vector<double> crossings;
  crossings.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      crossings.push_back(0.5 * (pts[i].first + pts[j].first) +
                          (pts[i].second - pts[j].second) / (2.0 * k_objective));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : W) {
    best = std::min({best, phi(w.l), phi(w.r)});
    for (double c : crossings) {
      if (c > w.l && c < w.r) best = std::min(best, phi(c));
    }
  }
  return best;
}

namespace detail {

/// Remove the working entries matching history positions [cstart, cend] and
/// record their feasible endpoints in V^delta.
inline void exclude_chain(SolverState& st, std::size_t cstart, std::size_t cend) {
  const int m1 = st.problem->objective_index();
  for (std::size_t i = cstart; i <= cend; ++i) {
    const IntervalRecord& h = st.history[i];
    if (h.nu_l == m1) add_v_delta(st, h.l);
    if (h.nu_r == m1) add_v_delta(st, h.r);
  }
  for (std::size_t i = cstart; i <= cend; ++i) {
    const IntervalRecord& h = st.history[i];
    auto wp = working_pos_by_left(st, h.l);
    if (!wp || st.working[*wp].history_id != h.id) continue;
    WorkingInterval removed = st.working[*wp];
    st.working.erase(st.working.begin() + static_cast<std::ptrdiff_t>(*wp));
    emit_removal(st, removed, TraceAction::Exclude);
  }
}

}  // namespace detail

/**
 * Step-4 admissibility check for the selected interval t: decides whether
 * [l_t, r_t] can intersect a feasible interval of length >= delta. When it
 * cannot, the whole chain of adjacent intervals spanned by the candidate
 * feasible stretch is removed from the working list and its feasible
 * endpoints are recorded in V^delta.
 *
 * Classification and geometry use the starting indexes and raw trial values
 * from the history record; motion-rewritten working data never enters here.
 */
inline QdeltaResult verify_qdelta(SolverState& st, std::size_t t, const AcifConfig& cfg) {
  const auto& H = st.history;
  const int m1 = st.problem->objective_index();
  auto K = st.problem->lipschitz();
  const WorkingInterval w = st.working[t];  // copy: exclusions invalidate positions
  const std::size_t hp = detail::history_pos(st, w);

  const int nul = w.hist_nu_l, nur = w.hist_nu_r;
  const double gl = w.hist_g_l, gr = w.hist_g_r;

  // case i: both endpoints infeasible; only [y-, y+] could hold a minimizer
  if (nul < m1 && nur < m1) {
    double zone = (w.r - w.l) - gr / lipschitz_at(K, nur) - gl / lipschitz_at(K, nul);
    if (zone < cfg.delta) {
      detail::exclude_chain(st, hp, hp);
      return QdeltaResult::Excluded;
    }
    return QdeltaResult::MayBelong;
  }

  // cases ii-iv: quick confirmation that t alone can host a delta-interval
  if (nul == m1 && nur < m1) {
    if ((w.r - w.l) - gr / lipschitz_at(K, nur) > cfg.delta) return QdeltaResult::MayBelong;
  } else if (nul < m1 && nur == m1) {
    if ((w.r - w.l) - gl / lipschitz_at(K, nul) > cfg.delta) return QdeltaResult::MayBelong;
  } else {
    if ((w.r - w.l) > cfg.delta) return QdeltaResult::MayBelong;
  }

  // walk outward through feasible endpoints to bound the candidate stretch
  std::size_t cstart = hp, cend = hp;
  double left_end, right_end;

  if (nul == m1) {
    std::size_t i = hp;
    bool blocked = false;
    while (i > 0) {
      --i;
      if (H[i].nu_l < m1) {
        blocked = true;
        break;
      }
    }
    cstart = i;
    left_end = blocked ? H[i].l + H[i].g_l / lipschitz_at(K, H[i].nu_l) : H[0].l;
  } else {
    left_end = w.l + gl / lipschitz_at(K, nul);
  }

  if (nur == m1) {
    std::size_t i = hp;
    bool blocked = false;
    while (i + 1 < H.size()) {
      ++i;
      if (H[i].nu_r < m1) {
        blocked = true;
        break;
      }
    }
    cend = i;
    right_end = blocked ? H[i].r - H[i].g_r / lipschitz_at(K, H[i].nu_r) : H.back().r;
  } else {
    right_end = w.r - gr / lipschitz_at(K, nur);
  }

  if (right_end - left_end < cfg.delta) {
    detail::exclude_chain(st, cstart, cend);
    return QdeltaResult::Excluded;
  }
  return QdeltaResult::MayBelong;
}

/// Loop-time check in simplified mode: only the both-infeasible-endpoints
/// test runs; the chain walks are deferred to the accuracy stop.
inline QdeltaResult verify_qdelta_simplified(SolverState& st, std::size_t t,
                                             const AcifConfig& cfg) {
  const int m1 = st.problem->objective_index();
  auto K = st.problem->lipschitz();
  const WorkingInterval& w = st.working[t];
  if (w.hist_nu_l < m1 && w.hist_nu_r < m1) {
    double zone = (w.r - w.l) - w.hist_g_r / lipschitz_at(K, w.hist_nu_r) -
                  w.hist_g_l / lipschitz_at(K, w.hist_nu_l);
    if (zone < cfg.delta) {
      detail::exclude_chain(st, detail::history_pos(st, w), detail::history_pos(st, w));
      return QdeltaResult::Excluded;
    }
  }
  return QdeltaResult::MayBelong;
}

/**
 * Step-6 restart after the minimizer estimate turned out to sit outside the
 * delta-admissible set: recompute Z* without the V^delta points, rebuild the
 * working list from history (keeping intervals whose V^delta endpoints still
 * sit above the new estimate), recompute characteristics with the motions,
 * and drop every interval left with a positive characteristic.
 */
inline void restart(SolverState& st, const AcifConfig& cfg) {
  (void)cfg;
  const int m1 = st.problem->objective_index();
  auto K = st.problem->lipschitz();

  ZEstimate z_new = detail::history_minimum(st);

  std::vector<WorkingInterval> old = std::move(st.working);
  st.working.clear();
  for (const auto& h : st.history) {
    const bool l_excluded = h.nu_l == m1 && detail::in_v_delta(st, h.l);
    const bool r_excluded = h.nu_r == m1 && detail::in_v_delta(st, h.r);
    bool keep = true;
    if (l_excluded || r_excluded) {
      if (!z_new.value) {
        keep = false;
      } else {
        if (l_excluded) keep = keep && h.g_l - *z_new.value > 0.0;
        if (r_excluded) keep = keep && h.g_r - *z_new.value > 0.0;
      }
    }
    if (!keep) continue;
    WorkingInterval w;
    w.history_id = h.id;
    w.l = h.l;
    w.r = h.r;
    w.hist_nu_l = h.nu_l;
    w.hist_nu_r = h.nu_r;
    w.hist_g_l = h.g_l;
    w.hist_g_r = h.g_r;
    w.nu_l = h.nu_l;
    w.nu_r = h.nu_r;
    w.z_l = h.nu_l < m1 ? h.g_l : h.g_l - *z_new.value;
    w.z_r = h.nu_r < m1 ? h.g_r : h.g_r - *z_new.value;
    st.working.push_back(w);
  }
  st.zstar.value = z_new.value;
  st.zstar.arg = z_new.arg;

  // removal events for intervals that did not survive the V^delta rules
  for (const auto& ow : old) {
    bool survives = false;
    for (const auto& w : st.working) {
      if (w.history_id == ow.history_id) {
        survives = true;
        break;
      }
    }
    if (!survives) detail::emit_removal(st, ow, TraceAction::Exclude);
  }

  for (auto& w : st.working) w.R = initial_characteristic(w, K);

  for (std::size_t pos = 0; pos < st.working.size(); ++pos) {
    const WorkingInterval& w = st.working[pos];
    if (!(w.R > 0.0)) continue;
    if (w.nu_l < w.nu_r) {
      MotionResult mr = backward_motion(st.working, pos, K);
      for (const auto& rem : mr.removed) detail::emit_removal(st, rem, TraceAction::Motion);
      pos = mr.new_t;
    } else if (w.nu_l > w.nu_r) {
      MotionResult mr = onward_motion(st.working, pos, K);
      for (const auto& rem : mr.removed) detail::emit_removal(st, rem, TraceAction::Motion);
    }
  }

  for (std::size_t pos = st.working.size(); pos-- > 0;) {
    if (st.working[pos].R > 0.0) {
      WorkingInterval removed = st.working[pos];
      st.working.erase(st.working.begin() + static_cast<std::ptrdiff_t>(pos));
      detail::emit_removal(st, removed, TraceAction::Exclude);
    }
  }

  st.restarts += 1;
  TraceEvent ev;
  ev.k = st.iteration();
  ev.action = TraceAction::Restart;
  ev.zstar = st.zstar.value;
  ev.q = st.working.size();
  if (st.zstar.value) ev.xstar = st.zstar.arg;
  st.events.push_back(ev);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

namespace detail {

inline TrialRecord do_trial(SolverState& st, double x, const AcifConfig& cfg) {
  if (st.iteration() + 1 > cfg.max_iterations) {
    throw BudgetError("iteration budget of " + std::to_string(cfg.max_iterations) +
                          " trials exhausted",
                      st.iteration(), st.zstar.value,
                      st.zstar.value ? std::optional<double>(st.zstar.arg) : std::nullopt);
  }
  TrialRecord tr = evaluate_trial(*st.problem, x);
  st.trials.push_back(tr);
  st.index_counts[static_cast<std::size_t>(tr.nu) - 1] += 1;
  st.zstar.max_index_seen = std::max(st.zstar.max_index_seen, tr.nu);
  return tr;
}

inline void emit_trial_event(SolverState& st, const TrialRecord& tr,
                             std::optional<std::size_t> parent_1based,
                             std::optional<double> parent_r,
                             std::optional<double> parent_l = std::nullopt,
                             std::optional<double> parent_right = std::nullopt) {
  TraceEvent ev;
  ev.k = st.iteration();
  ev.action = TraceAction::Trial;
  ev.x = tr.x;
  ev.nu = tr.nu;
  ev.g_value = tr.g_value;
  ev.zstar = st.zstar.value;
  ev.q = st.working.size();
  ev.t = parent_1based;
  ev.r_t = parent_r;
  ev.l = parent_l;
  ev.r = parent_right;
  if (st.zstar.value) ev.xstar = st.zstar.arg;
  st.events.push_back(ev);
}

/// Replace working[t] and its history record by the two subintervals around
/// the new trial; children inherit the live z/nu data of the parent's sides.
/// The z-value at the shared new endpoint is filled by the step-2 update.
inline std::size_t split_interval(SolverState& st, std::size_t t, const TrialRecord& tr) {
  WorkingInterval w = st.working[t];
  std::size_t hp = history_pos(st, w);

  IntervalRecord left{st.next_history_id++, w.l,  tr.x, w.hist_nu_l, tr.nu,
                      w.hist_g_l,           tr.g_value};
  IntervalRecord right{st.next_history_id++, tr.x, w.r, tr.nu, w.hist_nu_r,
                       tr.g_value,           w.hist_g_r};
  st.history[hp] = left;
  st.history.insert(st.history.begin() + static_cast<std::ptrdiff_t>(hp) + 1, right);

  WorkingInterval wl;
  wl.history_id = left.id;
  wl.l = left.l;
  wl.r = left.r;
  wl.hist_nu_l = left.nu_l;
  wl.hist_nu_r = left.nu_r;
  wl.hist_g_l = left.g_l;
  wl.hist_g_r = left.g_r;
  wl.z_l = w.z_l;
  wl.nu_l = w.nu_l;
  wl.nu_r = tr.nu;

  WorkingInterval wr;
  wr.history_id = right.id;
  wr.l = right.l;
  wr.r = right.r;
  wr.hist_nu_l = right.nu_l;
  wr.hist_nu_r = right.nu_r;
  wr.hist_g_l = right.g_l;
  wr.hist_g_r = right.g_r;
  wr.nu_l = tr.nu;
  wr.z_r = w.z_r;
  wr.nu_r = w.nu_r;

  st.working[t] = wl;
  st.working.insert(st.working.begin() + static_cast<std::ptrdiff_t>(t) + 1, wr);
  return t;
}

/// Characteristic-improvement protocol for a freshly characterized interval,
/// identified by its left endpoint (positions shift as motions remove).
inline void run_motion_protocol(SolverState& st, double left_coord) {
  auto pos = working_pos_by_left(st, left_coord);
  if (!pos) return;  // removed by a sibling's motion
  const WorkingInterval& w = st.working[*pos];
  if (!(w.R > 0.0) || w.nu_l == w.nu_r) return;
  auto K = st.problem->lipschitz();
  MotionResult mr = w.nu_l < w.nu_r ? backward_motion(st.working, *pos, K)
                                    : onward_motion(st.working, *pos, K);
  for (const auto& rem : mr.removed) emit_removal(st, rem, TraceAction::Motion);
}

/// Step 2: z bookkeeping for the new trial, Z* update with the z shift, and
/// characteristic recomputation (all intervals after a Z* drop, otherwise the
/// two children only), followed by the motion protocol from the children.
inline void step2_update(SolverState& st, const TrialRecord& tr, std::size_t left_pos,
                         std::optional<std::size_t> parent_1based,
                         std::optional<double> parent_r, double parent_left,
                         double parent_right) {
  const int m1 = st.problem->objective_index();
  auto K = st.problem->lipschitz();
  auto& W = st.working;

  bool recompute_all = false;
  double z_new_pt;
  if (tr.nu == m1) {
    if (!st.zstar.value) {
      st.zstar.value = tr.g_value;
      st.zstar.arg = tr.x;
      z_new_pt = 0.0;
      recompute_all = true;  // the index-(m+1) z branch just became live
    } else if (tr.g_value < *st.zstar.value) {
      double old = *st.zstar.value;
      st.zstar.value = tr.g_value;
      st.zstar.arg = tr.x;
      z_new_pt = 0.0;
      shift_z_on_new_zstar(W, old, tr.g_value, m1, tr.x);
      recompute_all = true;
    } else {
      z_new_pt = tr.g_value - *st.zstar.value;
    }
  } else {
    z_new_pt = tr.g_value;
  }
  W[left_pos].z_r = z_new_pt;
  W[left_pos + 1].z_l = z_new_pt;

  emit_trial_event(st, tr, parent_1based, parent_r, parent_left, parent_right);

  if (recompute_all) {
    for (auto& w : W) w.R = initial_characteristic(w, K);
  } else {
    W[left_pos].R = initial_characteristic(W[left_pos], K);
    W[left_pos + 1].R = initial_characteristic(W[left_pos + 1], K);
  }

  const double left_l = W[left_pos].l;
  const double right_l = tr.x;
  run_motion_protocol(st, left_l);
  run_motion_protocol(st, right_l);
}

inline Outcome make_infeasible(SolverState& st) {
  TraceEvent ev;
  ev.k = st.iteration();
  ev.action = TraceAction::Stop;
  ev.zstar = st.zstar.value;
  ev.q = st.working.size();
  st.events.push_back(ev);
  Outcome out;
  out.kind = OutcomeKind::Infeasible;
  out.trace = st.trials;
  out.v_delta = st.v_delta;
  out.events = st.events;
  return out;
}

/// Accuracy stop handling: the two bounded-termination situations, with the
/// local delta-admissibility check and possible re-entry through the restart.
/// Returns nothing when the search must resume.
inline std::optional<Outcome> finalize_stop(SolverState& st, std::size_t t,
                                            const AcifConfig& cfg) {
  const int m1 = st.problem->objective_index();

  if (cfg.qdelta_mode == QdeltaMode::Simplified) {
    // the chain walks deferred during the loop run once here
    if (verify_qdelta(st, t, cfg) == QdeltaResult::Excluded) {
      if (st.zstar.value && detail::in_v_delta(st, st.zstar.arg)) restart(st, cfg);
      return std::nullopt;
    }
  }

  if (!st.zstar.value)
    throw StateError("accuracy stop reached with no feasible trial on record");
  const double xs = st.zstar.arg;
  const double upper = *st.zstar.value;
  const double stop_r = st.working[t].R;

  bool has_negative_constraint_interval = false;
  for (const auto& w : st.working) {
    if (w.R < 0.0 && std::max(w.nu_l, w.nu_r) < m1) {
      has_negative_constraint_interval = true;
      break;
    }
  }

  if (!local_feasibility_check(*st.problem, xs, cfg)) {
    add_v_delta(st, xs);
    restart(st, cfg);
    return std::nullopt;
  }

  TraceEvent ev;
  ev.k = st.iteration();
  ev.action = TraceAction::Stop;
  ev.zstar = st.zstar.value;
  ev.q = st.working.size();
  ev.t = t + 1;
  ev.r_t = stop_r;
  ev.xstar = xs;
  st.events.push_back(ev);

  Outcome out;
  out.minimizer = xs;
  out.upper = upper;
  out.trace = st.trials;
  out.v_delta = st.v_delta;
  out.events = st.events;
  if (!has_negative_constraint_interval) {
    out.kind = OutcomeKind::BoundedSolution;
    out.lower = stop_r + upper;
  } else {
    out.kind = OutcomeKind::SupportBoundedSolution;
    out.lower = support_lower_bound(st.trials, st.working,
                                    st.problem->lipschitz_for(m1), m1);
  }
  return out;
}

}  // namespace detail

/**
 * Run the solver. Returns an infeasibility certificate (empty working list),
 * two-sided bounds with a minimizer estimate, or a support-function bound.
 * Throws BudgetError when max_iterations trials were not enough and
 * DegeneracyError when subdivision hits the floating-point grain.
 */
inline Outcome run_acif(const ConstrainedProblem& p, const AcifConfig& cfg,
                        AcifObserver* observer = nullptr) {
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon <= cfg.delta))
    throw ConfigError("search accuracy must satisfy 0 < epsilon <= delta");
  if (cfg.max_iterations < 2) throw ConfigError("max_iterations must be at least 2");

  const int m1 = p.objective_index();
  auto K = p.lipschitz();

  SolverState st;
  st.problem = &p;
  st.index_counts.assign(static_cast<std::size_t>(m1), 0);

  TrialRecord tr_a = detail::do_trial(st, p.a(), cfg);
  TrialRecord tr_b = detail::do_trial(st, p.b(), cfg);
  st.history.push_back(IntervalRecord{st.next_history_id++, p.a(), p.b(), tr_a.nu, tr_b.nu,
                                      tr_a.g_value, tr_b.g_value});
  st.zstar = detail::history_minimum(st);

  {
    WorkingInterval w;
    const IntervalRecord& h = st.history.front();
    w.history_id = h.id;
    w.l = h.l;
    w.r = h.r;
    w.hist_nu_l = h.nu_l;
    w.hist_nu_r = h.nu_r;
    w.hist_g_l = h.g_l;
    w.hist_g_r = h.g_r;
    w.nu_l = h.nu_l;
    w.nu_r = h.nu_r;
    w.z_l = h.nu_l < m1 ? h.g_l : h.g_l - *st.zstar.value;
    w.z_r = h.nu_r < m1 ? h.g_r : h.g_r - *st.zstar.value;
    w.R = initial_characteristic(w, K);
    st.working.push_back(w);
  }
  // the trial events for a and b fire once the estimate they report exists
  detail::emit_trial_event(st, tr_a, std::nullopt, std::nullopt);
  st.events.back().k = 1;
  detail::emit_trial_event(st, tr_b, std::nullopt, std::nullopt);
  if (observer) observer->on_iteration(st);

  std::size_t t = 0;  // the first subdivision target is fixed at setup

  for (;;) {
    // ---- Step 1: subdivision and the new trial ----
    const WorkingInterval parent = st.working[t];
    double x_new = subdivision_point(parent, K);
    TrialRecord tr = detail::do_trial(st, x_new, cfg);
    std::size_t left_pos = detail::split_interval(st, t, tr);

    // ---- Step 2: estimate and characteristics ----
    detail::step2_update(st, tr, left_pos, t + 1, parent.R, parent.l, parent.r);
    if (observer) observer->on_iteration(st);

    // ---- Steps 3-5: selection, admissibility, accuracy ----
    for (;;) {
      if (st.working.empty()) return detail::make_infeasible(st);
      t = *select_interval(st.working);

      QdeltaResult qr = cfg.qdelta_mode == QdeltaMode::Full
                            ? verify_qdelta(st, t, cfg)
                            : verify_qdelta_simplified(st, t, cfg);
      if (qr == QdeltaResult::Excluded) {
        if (st.zstar.value && detail::in_v_delta(st, st.zstar.arg)) restart(st, cfg);
        continue;
      }

      if (st.working[t].r - st.working[t].l > cfg.epsilon) break;  // on to Step 1

      auto outcome = detail::finalize_stop(st, t, cfg);
      if (outcome) return std::move(*outcome);
      // restart re-entered the loop; select again
    }
  }
}

}  // namespace lipgo
