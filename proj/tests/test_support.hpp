// Shared helpers for the solver test suites: hand-coded closed forms of the
// shipped benchmark, a state builder for the step-level operations, and an
// observer asserting the structural invariants on every iteration.
#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "lipgo/acif.hpp"
#include "lipgo/problem.hpp"

namespace lipgo_test {

// Closed forms of the fsp-9 benchmark, written independently of the
// expression DSL.
inline double fsp9_objective(double x) {
  return 3.0 - 2.0 * std::exp(-0.5 * (22.0 / 5.0 - x)) *
                   std::fabs(std::sin(M_PI * (22.0 / 5.0 - x)));
}
inline double fsp9_g1(double x) {
  return 3.0 * (std::exp(-std::fabs(std::sin(2.5 * std::sin(2.2 * x)))) + 0.01 * x * x - 0.5);
}
inline double fsp9_g2(double x) {
  if (x <= 0.5) return 6.0 * (x - 0.5) * (x - 0.5) - 0.5;
  return 0.25 * (x - 2.5);
}
inline double fsp9_g3(double x) {
  return 0.8 - (std::fabs(std::sin(24.0 / 5.0 - x)) + 6.0 / 25.0 - x / 20.0);
}

/// Build a solver state from a row of trial points (x, nu, g) over a fixed
/// problem; all intervals start in the working list with pristine z-values.
inline lipgo::SolverState make_state(const lipgo::ConstrainedProblem& p,
                                     const std::vector<lipgo::TrialRecord>& points,
                                     const std::vector<double>& v_delta = {}) {
  const int m1 = p.objective_index();
  lipgo::SolverState st;
  st.problem = &p;
  st.index_counts.assign(static_cast<std::size_t>(m1), 0);
  st.trials = points;
  for (const auto& tr : points) {
    st.index_counts[static_cast<std::size_t>(tr.nu) - 1] += 1;
    st.zstar.max_index_seen = std::max(st.zstar.max_index_seen, tr.nu);
  }
  st.v_delta = v_delta;
  std::sort(st.v_delta.begin(), st.v_delta.end());
  for (const auto& tr : points) {
    if (tr.nu != m1 || lipgo::detail::in_v_delta(st, tr.x)) continue;
    if (!st.zstar.value || tr.g_value < *st.zstar.value) {
      st.zstar.value = tr.g_value;
      st.zstar.arg = tr.x;
    }
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const auto& a = points[i];
    const auto& b = points[i + 1];
    st.history.push_back(
        {st.next_history_id++, a.x, b.x, a.nu, b.nu, a.g_value, b.g_value});
    lipgo::WorkingInterval w;
    const auto& h = st.history.back();
    w.history_id = h.id;
    w.l = h.l;
    w.r = h.r;
    w.hist_nu_l = w.nu_l = h.nu_l;
    w.hist_nu_r = w.nu_r = h.nu_r;
    w.hist_g_l = h.g_l;
    w.hist_g_r = h.g_r;
    auto z_of = [&](int nu, double g) {
      return nu < m1 ? g : g - st.zstar.value.value_or(g);
    };
    w.z_l = z_of(h.nu_l, h.g_l);
    w.z_r = z_of(h.nu_r, h.g_r);
    w.R = lipgo::initial_characteristic(w, p.lipschitz());
    st.working.push_back(w);
  }
  return st;
}

/// Asserts the structural invariants after every iteration: the history is a
/// partition of [a,b], the working list references live history records, the
/// minimum estimate never increases between restarts, and the estimate's
/// point carries z = 0 wherever it appears as a pristine working endpoint.
struct InvariantObserver : lipgo::AcifObserver {
  const lipgo::ConstrainedProblem* problem = nullptr;
  std::optional<double> prev_zstar;
  long prev_restarts = 0;
  long iterations_seen = 0;

  void on_iteration(const lipgo::SolverState& st) override {
    ++iterations_seen;
    const int m1 = st.problem->objective_index();

    ASSERT_FALSE(st.history.empty());
    EXPECT_DOUBLE_EQ(st.history.front().l, st.problem->a());
    EXPECT_DOUBLE_EQ(st.history.back().r, st.problem->b());
    for (std::size_t i = 0; i < st.history.size(); ++i) {
      EXPECT_LT(st.history[i].l, st.history[i].r);
      if (i + 1 < st.history.size())
        EXPECT_DOUBLE_EQ(st.history[i].r, st.history[i + 1].l);
    }

    for (const auto& w : st.working) {
      auto it = std::lower_bound(st.history.begin(), st.history.end(), w.l,
                                 [](const lipgo::IntervalRecord& h, double l) { return h.l < l; });
      ASSERT_NE(it, st.history.end());
      EXPECT_EQ(it->id, w.history_id);
      EXPECT_DOUBLE_EQ(it->l, w.l);
      EXPECT_DOUBLE_EQ(it->r, w.r);
      EXPECT_EQ(it->nu_l, w.hist_nu_l);
      EXPECT_EQ(it->nu_r, w.hist_nu_r);
      EXPECT_DOUBLE_EQ(it->g_l, w.hist_g_l);
      EXPECT_DOUBLE_EQ(it->g_r, w.hist_g_r);
    }

    if (st.restarts == prev_restarts && prev_zstar && st.zstar.value) {
      EXPECT_LE(*st.zstar.value, *prev_zstar + 1e-12);
    }
    prev_restarts = st.restarts;
    prev_zstar = st.zstar.value;

    if (st.zstar.value) {
      for (const auto& w : st.working) {
        if (w.l == st.zstar.arg && w.nu_l == m1 && w.hist_nu_l == m1 &&
            w.hist_g_l == *st.zstar.value)
          EXPECT_NEAR(w.z_l, 0.0, 1e-12);
        if (w.r == st.zstar.arg && w.nu_r == m1 && w.hist_nu_r == m1 &&
            w.hist_g_r == *st.zstar.value)
          EXPECT_NEAR(w.z_r, 0.0, 1e-12);
      }
    }
  }
};

/// Post-run checks shared by registry and randomized runs: trial points are
/// pairwise distinct and every subdivision trial lies strictly inside its
/// parent interval.
inline void expect_trials_distinct_and_interior(const lipgo::Outcome& out) {
  std::set<double> seen;
  for (const auto& tr : out.trace) {
    EXPECT_TRUE(seen.insert(tr.x).second) << "duplicate trial at x=" << tr.x;
  }
  for (const auto& ev : out.events) {
    if (ev.action != lipgo::TraceAction::Trial || !ev.l || !ev.r) continue;
    EXPECT_GT(*ev.x, *ev.l);
    EXPECT_LT(*ev.x, *ev.r);
  }
}

}  // namespace lipgo_test
