// Acceptance suite: one test per criterion, each printing a pass/fail line.
//
// The randomized sweeps draw piecewise-linear problems with exactly known
// Lipschitz constants (seeds 1..100) and audit the solver against the
// brute-force oracle.
#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "lipgo/acif.hpp"
#include "lipgo/oracle.hpp"
#include "lipgo/pijavskii.hpp"
#include "lipgo/problem_file.hpp"
#include "lipgo/report.hpp"
#include "lipgo/synthetic.hpp"
#include "test_support.hpp"

namespace {

using namespace lipgo;

void report_criterion(int n, const char* what) {
  std::printf("[ACCEPTANCE] criterion %d (%s): %s\n", n, what,
              ::testing::Test::HasFailure() ? "FAIL" : "PASS");
  std::fflush(stdout);
}

ResolvedProblem resolve_registry(const char* name, double delta_mult,
                                 long k_resolution = 1'000'000) {
  auto reg = builtin_registry();
  ResolveOptions opt;
  opt.lipschitz_resolution = k_resolution;
  opt.delta = DeltaSpec{std::nullopt, delta_mult};
  return resolve_problem(reg.at(name), opt);
}

TEST(Acceptance, C1_Problem9MinimizerAndBounds) {
  auto t0 = std::chrono::steady_clock::now();
  ResolvedProblem rp = resolve_registry("fsp-9", 10.0);
  Outcome out = run_acif(rp.problem, rp.config);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double eps = rp.config.epsilon;
  EXPECT_DOUBLE_EQ(eps, 1e-4 * 4.0);
  ASSERT_TRUE(out.minimizer.has_value());
  EXPECT_NEAR(*out.minimizer, 0.95019236, eps);

  GridReport oracle = grid_report(rp.problem, 1'000'000);
  ASSERT_TRUE(oracle.global_min.has_value());
  ASSERT_TRUE(out.lower && out.upper);
  const double grid_slack =
      rp.problem.lipschitz_for(rp.problem.objective_index()) * (4.0 / 1e6);
  EXPECT_LE(*out.lower, *oracle.global_min);
  EXPECT_LE(*oracle.global_min, *out.upper + grid_slack);

  EXPECT_LT(seconds, 5.0);
  report_criterion(1, "problem 9 correctness");
}

TEST(Acceptance, C2_Problem9EfficiencyOrdering) {
  ResolvedProblem rp1 = resolve_registry("fsp-9", 1.0);
  ResolvedProblem rp10 = resolve_registry("fsp-9", 10.0);
  Outcome eps_run = run_acif(rp1.problem, rp1.config);
  Outcome ten_run = run_acif(rp10.problem, rp10.config);
  long acif_eps = count_evaluations(eps_run.trace);
  long acif_ten = count_evaluations(ten_run.trace);

  PenaltyProblem pp = make_penalty_problem(rp1.problem, 15.0);
  PijavskiiResult pen = pen_minimize(pp, rp1.config.epsilon);
  long pen_evals = count_evaluations(pen.trials);

  std::printf("[ACCEPTANCE]   evaluations: acif(eps)=%ld acif(10eps)=%ld pen=%ld\n", acif_eps,
              acif_ten, pen_evals);
  EXPECT_LT(acif_eps, pen_evals / 2);
  EXPECT_LT(acif_ten, pen_evals / 2);
  EXPECT_LE(acif_ten, acif_eps);  // the delta effect
  report_criterion(2, "problem 9 efficiency ordering");
}

TEST(Acceptance, C3_InfeasibilityDetection) {
  {
    ResolvedProblem rp = resolve_registry("infeasible-const", 1.0, 100'000);
    Outcome out = run_acif(rp.problem, rp.config);
    EXPECT_EQ(out.kind, OutcomeKind::Infeasible);
    EXPECT_LT(static_cast<long>(out.trace.size()), 10'000);
    ASSERT_FALSE(out.events.empty());
    const TraceEvent& stop = out.events.back();
    EXPECT_EQ(stop.action, TraceAction::Stop);
    EXPECT_EQ(stop.q, 0u);  // empty working list at the stop
  }
  {
    ResolvedProblem rp = resolve_registry("isolated", 1.0, 100'000);
    Outcome out = run_acif(rp.problem, rp.config);
    EXPECT_EQ(out.kind, OutcomeKind::Infeasible);
    EXPECT_LT(static_cast<long>(out.trace.size()), 10'000);
    ASSERT_FALSE(out.events.empty());
    EXPECT_EQ(out.events.back().q, 0u);
    ASSERT_EQ(out.v_delta.size(), 1u);  // the touching point is recorded
    EXPECT_NEAR(out.v_delta[0], 1.0, 1e-9);
  }
  report_criterion(3, "infeasibility detection");
}

TEST(Acceptance, C4_CharacteristicSoundness) {
  long validated_iterations = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SyntheticProblem syn = make_random_piecewise_problem(seed);
    CharacteristicOracle oracle(syn.problem, 1'000'000);
    struct Check : AcifObserver {
      const CharacteristicOracle* oracle = nullptr;
      std::uint64_t seed = 0;
      long* counter = nullptr;
      void on_iteration(const SolverState& st) override {
        ++*counter;
        EXPECT_TRUE(oracle->validate(st))
            << "seed " << seed << " iteration " << st.iteration();
      }
    } check;
    check.oracle = &oracle;
    check.seed = seed;
    check.counter = &validated_iterations;
    try {
      run_acif(syn.problem, syn.config, &check);
    } catch (const BudgetError&) {
    }
  }
  std::printf("[ACCEPTANCE]   validated %ld iterations over 100 randomized problems\n",
              validated_iterations);
  EXPECT_GT(validated_iterations, 1000);
  report_criterion(4, "characteristic soundness");
}

TEST(Acceptance, C5_ExclusionSoundness) {
  long audited_removals = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SyntheticProblem syn = make_random_piecewise_problem(seed);
    Outcome out;
    try {
      out = run_acif(syn.problem, syn.config);
    } catch (const BudgetError&) {
      continue;
    }
    if (!out.upper) continue;  // infeasible: nothing to undercut

    GridReport oracle = grid_report(syn.problem, 1'000'000);
    if (oracle.q_delta_intervals.empty()) continue;
    CharacteristicOracle nodes(syn.problem, 1'000'000);
    const double cell = 1.0 / 999'999.0;
    const int m1 = syn.problem.objective_index();
    const double value_slack = syn.problem.lipschitz_for(m1) * cell;

    auto in_q_delta = [&](double x) {
      for (const auto& [ql, qr] : oracle.q_delta_intervals) {
        if (x >= ql - cell && x <= qr + cell) return true;
      }
      return false;
    };

    for (const auto& ev : out.events) {
      if (ev.action != TraceAction::Exclude && ev.action != TraceAction::Motion) continue;
      if (!ev.l || !ev.r || !ev.xstar) continue;
      if (!in_q_delta(*ev.xstar)) continue;  // the estimate sat outside the admissible set
      ++audited_removals;
      long lo = static_cast<long>(std::ceil((*ev.l + cell) / cell));
      long hi = static_cast<long>(std::floor((*ev.r - cell) / cell));
      for (long i = std::max(lo, 0L); i <= std::min(hi, 999'999L); ++i) {
        if (nodes.node_index(i) != m1) continue;
        double x = i * cell;
        if (!in_q_delta(x)) continue;
        EXPECT_GE(nodes.node_value(i), *out.upper - value_slack)
            << "seed " << seed << ": removed [" << *ev.l << ", " << *ev.r
            << "] contains admissible x=" << x << " below the final upper bound";
      }
    }
  }
  std::printf("[ACCEPTANCE]   audited %ld removals against the admissible set\n",
              audited_removals);
  report_criterion(5, "exclusion soundness");
}

TEST(Acceptance, C6_InvariantSuite) {
  // registry problems
  struct RegistryRun {
    const char* name;
    double delta_mult;
  };
  for (const RegistryRun& run : {RegistryRun{"fsp-9", 1.0}, RegistryRun{"fsp-9", 10.0},
                                 RegistryRun{"mono", 1.0}, RegistryRun{"infeasible-const", 1.0},
                                 RegistryRun{"isolated", 1.0}, RegistryRun{"two-region", 1.0}}) {
    ResolvedProblem rp = resolve_registry(run.name, run.delta_mult, 200'000);
    lipgo_test::InvariantObserver obs;
    Outcome out = run_acif(rp.problem, rp.config, &obs);
    EXPECT_GT(obs.iterations_seen, 0) << run.name;
    lipgo_test::expect_trials_distinct_and_interior(out);
  }
  // randomized problems
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SyntheticProblem syn = make_random_piecewise_problem(seed);
    lipgo_test::InvariantObserver obs;
    try {
      Outcome out = run_acif(syn.problem, syn.config, &obs);
      lipgo_test::expect_trials_distinct_and_interior(out);
    } catch (const BudgetError&) {
    }
  }
  report_criterion(6, "structural invariants");
}

TEST(Acceptance, C7_BaselineSanity) {
  {
    const double K = 1.5, eps = 1e-4;
    PijavskiiResult res = pijavskii_minimize([](double x) { return std::fabs(x - 0.3); }, 0.0,
                                             1.0, K, eps);
    EXPECT_LE(std::fabs(res.f_min - 0.0), K * eps);
  }
  {
    // multiextremal objective with several near-optimal basins
    auto f = [](double x) { return std::sin(x) + std::sin(10.0 * x / 3.0); };
    const double a = 2.7, b = 7.5;
    double oracle_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1'000'000; ++i) {
      oracle_min = std::min(oracle_min, f(a + (b - a) * i / 1e6));
    }
    const double K = estimate_lipschitz(f, a, b, 1'000'000) * 1.1;
    const double eps = 1e-4 * (b - a);
    PijavskiiResult res = pijavskii_minimize(f, a, b, K, eps);
    EXPECT_LE(std::fabs(res.f_min - oracle_min), K * eps);
  }
  report_criterion(7, "baseline sanity");
}

TEST(Acceptance, C8_ParserFidelity) {
  ProblemSpec spec =
      load_problem_file(std::string(LIPGO_SOURCE_DIR) + "/problems/problem9.toml");
  ASSERT_EQ(spec.constraints.size(), 3u);
  std::mt19937 rng(20240810);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    double x = u(rng);
    auto close = [&](double got, double want) {
      EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, std::fabs(want))) << "x=" << x;
    };
    close(evaluate(*spec.objective, x), lipgo_test::fsp9_objective(x));
    close(evaluate(*spec.constraints[0].expr, x), lipgo_test::fsp9_g1(x));
    close(evaluate(*spec.constraints[1].expr, x), lipgo_test::fsp9_g2(x));
    close(evaluate(*spec.constraints[2].expr, x), lipgo_test::fsp9_g3(x));
  }

  // parser properties: render/reparse identity and positioned errors
  for (const auto& c : spec.constraints) {
    ExprPtr back = parse_expression(to_string(*c.expr));
    for (int i = 0; i < 100; ++i) {
      double x = u(rng);
      EXPECT_EQ(evaluate(*back, x), evaluate(*c.expr, x));
    }
  }
  try {
    parse_expression("sin(x");
    ADD_FAILURE() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 1);
    EXPECT_EQ(e.column, 6);
  }
  report_criterion(8, "parser fidelity");
}

TEST(Acceptance, C9_EvaluationAccounting) {
  for (const char* name : {"fsp-9", "mono", "infeasible-const", "two-region"}) {
    for (double mult : {1.0, 10.0}) {
      ResolvedProblem rp = resolve_registry(name, mult, 200'000);
      std::vector<TraceEvent> events;
      RunSummary s = run_acif_summary(rp, nullptr, &events);
      long weighted = 0, total = 0;
      for (std::size_t j = 0; j < s.index_counts.size(); ++j) {
        weighted += static_cast<long>(j + 1) * s.index_counts[j];
        total += s.index_counts[j];
      }
      EXPECT_EQ(s.evaluations, weighted) << name;
      EXPECT_EQ(s.iterations, total) << name;
      long trial_rows = 0;
      for (const auto& ev : events)
        if (ev.action == TraceAction::Trial) ++trial_rows;
      EXPECT_EQ(trial_rows, s.iterations) << name;
    }
    ResolvedProblem rp = resolve_registry(name, 1.0, 200'000);
    RunSummary pen = run_pen_summary(rp, 15.0);
    EXPECT_EQ(pen.evaluations,
              static_cast<long>(rp.problem.objective_index()) * pen.iterations)
        << name;
  }
  report_criterion(9, "evaluation accounting");
}

}  // namespace
