/**
 * @file report.hpp
 * @brief Run summaries and comparison tables.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lipgo/acif.hpp"
#include "lipgo/pijavskii.hpp"
#include "lipgo/problem_file.hpp"
#include "lipgo/trace_io.hpp"

namespace lipgo {

struct RunSummary {
  std::string problem;
  std::string method;                ///< "acif" or "pen"
  std::optional<double> delta_mult;  ///< delta as a multiple of epsilon
  std::vector<long> index_counts;    ///< N_{g_1}..N_{g_m}, N_f
  long iterations = 0;
  long evaluations = 0;
  std::string outcome;  ///< bounded | support-bounded | infeasible | error: ...
  std::optional<double> lower, upper, minimizer;
  std::vector<double> v_delta;  ///< feasible points excluded as too isolated
  double wall_seconds = 0.0;
};

inline const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Infeasible: return "infeasible";
    case OutcomeKind::BoundedSolution: return "bounded";
    case OutcomeKind::SupportBoundedSolution: return "support-bounded";
  }
  return "?";
}

/// Run the index-scheme solver and summarize. Events are appended to
/// events_out when given.
inline RunSummary run_acif_summary(const ResolvedProblem& rp, AcifObserver* observer = nullptr,
                                   std::vector<TraceEvent>* events_out = nullptr) {
  RunSummary s;
  s.problem = rp.name;
  s.method = "acif";
  s.delta_mult = rp.config.delta / rp.config.epsilon;
  const int m1 = rp.problem.objective_index();
  s.index_counts.assign(static_cast<std::size_t>(m1), 0);

  auto t0 = std::chrono::steady_clock::now();
  try {
    Outcome out = run_acif(rp.problem, rp.config, observer);
    s.outcome = outcome_name(out.kind);
    s.lower = out.lower;
    s.upper = out.upper;
    s.minimizer = out.minimizer;
    s.iterations = static_cast<long>(out.trace.size());
    s.evaluations = count_evaluations(out.trace);
    for (const auto& tr : out.trace) s.index_counts[static_cast<std::size_t>(tr.nu) - 1] += 1;
    s.v_delta = std::move(out.v_delta);
    if (events_out) *events_out = std::move(out.events);
  } catch (const BudgetError& e) {
    s.outcome = std::string("error: ") + e.what();
    s.iterations = e.iterations;
    s.upper = e.zstar;
    s.minimizer = e.xstar;
  }
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

/// Run the penalty baseline with Pijavskii's method and summarize.
inline RunSummary run_pen_summary(const ResolvedProblem& rp, double penalty,
                                  std::vector<TraceEvent>* events_out = nullptr) {
  RunSummary s;
  s.problem = rp.name;
  s.method = "pen";
  const int m1 = rp.problem.objective_index();
  s.index_counts.assign(static_cast<std::size_t>(m1), 0);

  auto t0 = std::chrono::steady_clock::now();
  try {
    PenaltyProblem pp = make_penalty_problem(rp.problem, penalty);
    PijavskiiResult res = pen_minimize(pp, rp.config.epsilon, rp.config.max_iterations);
    s.outcome = "bounded";
    s.minimizer = res.x_min;
    s.upper = res.f_min;
    s.iterations = static_cast<long>(res.trials.size());
    s.evaluations = count_evaluations(res.trials);
    s.index_counts.back() = s.iterations;
    if (events_out) {
      for (const auto& tr : res.trials) {
        TraceEvent ev;
        ev.k = static_cast<long>(&tr - res.trials.data()) + 1;
        ev.action = TraceAction::Trial;
        ev.x = tr.x;
        ev.nu = tr.nu;
        ev.g_value = tr.g_value;
        ev.q = 0;
        events_out->push_back(ev);
      }
    }
  } catch (const BudgetError& e) {
    s.outcome = std::string("error: ") + e.what();
    s.iterations = e.iterations;
    s.upper = e.zstar;
    s.minimizer = e.xstar;
  }
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

namespace detail {

inline std::string delta_label(const std::optional<double>& mult) {
  if (!mult) return "-";
  std::ostringstream os;
  double m = *mult;
  if (std::fabs(m - std::round(m)) < 1e-9) {
    os << static_cast<long>(std::round(m)) << "eps";
  } else {
    os << std::setprecision(4) << m << "eps";
  }
  return os.str();
}

inline std::string opt_num(const std::optional<double>& v, int prec = 8) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::setprecision(prec) << *v;
  return os.str();
}

}  // namespace detail

inline void print_summary(std::ostream& out, const RunSummary& s) {
  out << "problem:     " << s.problem << "\n"
      << "method:      " << s.method << "\n"
      << "delta:       " << detail::delta_label(s.delta_mult) << "\n";
  const std::size_t m = s.index_counts.empty() ? 0 : s.index_counts.size() - 1;
  for (std::size_t j = 0; j < m; ++j)
    out << "N_g" << j + 1 << ":        " << s.index_counts[j] << "\n";
  if (!s.index_counts.empty()) out << "N_f:         " << s.index_counts.back() << "\n";
  out << "iterations:  " << s.iterations << "\n"
      << "evaluations: " << s.evaluations << "\n"
      << "outcome:     " << s.outcome << "\n"
      << "lower:       " << detail::opt_num(s.lower) << "\n"
      << "upper:       " << detail::opt_num(s.upper) << "\n"
      << "minimizer:   " << detail::opt_num(s.minimizer) << "\n"
      << "wall time:   " << std::setprecision(3) << s.wall_seconds << " s\n";
}

/// Fixed-width comparison table in the per-index-count column layout.
/// Rows are sorted by problem name, then method, then delta; an Average row
/// over the successfully solved rows closes each (method, delta) group.
inline void print_bench_table(std::ostream& out, std::vector<RunSummary> rows) {
  std::size_t max_counts = 1;
  for (const auto& r : rows) max_counts = std::max(max_counts, r.index_counts.size());
  const std::size_t m = max_counts - 1;

  std::sort(rows.begin(), rows.end(), [](const RunSummary& a, const RunSummary& b) {
    auto ka = std::tie(a.problem, a.method, a.delta_mult);
    auto kb = std::tie(b.problem, b.method, b.delta_mult);
    return ka < kb;
  });

  out << std::left << std::setw(18) << "problem" << std::setw(7) << "method" << std::setw(8)
      << "delta";
  for (std::size_t j = 0; j < m; ++j) out << std::setw(8) << ("N_g" + std::to_string(j + 1));
  out << std::setw(8) << "N_f" << std::setw(8) << "iter" << std::setw(9) << "eval"
      << std::setw(17) << "outcome" << std::setw(14) << "best" << "\n";

  struct Acc {
    double iters = 0, evals = 0;
    std::vector<double> counts;
    long n = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> groups;  // (method, delta label)

  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.problem << std::setw(7) << r.method << std::setw(8)
        << detail::delta_label(r.delta_mult);
    for (std::size_t j = 0; j < m; ++j) {
      if (r.method == "pen" || j + 1 >= r.index_counts.size()) {
        out << std::setw(8) << "-";
      } else {
        out << std::setw(8) << r.index_counts[j];
      }
    }
    out << std::setw(8) << (r.index_counts.empty() ? 0L : r.index_counts.back());
    out << std::setw(8) << r.iterations << std::setw(9) << r.evaluations << std::setw(17)
        << r.outcome << std::setw(14) << detail::opt_num(r.upper, 8) << "\n";
    if (r.outcome == "bounded" || r.outcome == "support-bounded" || r.outcome == "infeasible") {
      auto& acc = groups[{r.method, detail::delta_label(r.delta_mult)}];
      acc.counts.resize(max_counts, 0.0);
      for (std::size_t j = 0; j < r.index_counts.size(); ++j)
        acc.counts[j] += static_cast<double>(r.index_counts[j]);
      acc.iters += static_cast<double>(r.iterations);
      acc.evals += static_cast<double>(r.evaluations);
      acc.n += 1;
    }
  }

  for (const auto& [key, acc] : groups) {
    if (acc.n == 0) continue;
    out << std::left << std::setw(18) << "Average" << std::setw(7) << key.first << std::setw(8)
        << key.second;
    for (std::size_t j = 0; j < m; ++j) {
      if (key.first == "pen") {
        out << std::setw(8) << "-";
      } else {
        std::ostringstream os;
        os << std::setprecision(4) << acc.counts[j] / static_cast<double>(acc.n);
        out << std::setw(8) << os.str();
      }
    }
    std::ostringstream nf, it, ev;
    nf << std::setprecision(4) << acc.counts[max_counts - 1] / static_cast<double>(acc.n);
    it << std::setprecision(4) << acc.iters / static_cast<double>(acc.n);
    ev << std::setprecision(5) << acc.evals / static_cast<double>(acc.n);
    out << std::setw(8) << nf.str() << std::setw(8) << it.str() << std::setw(9) << ev.str()
        << std::setw(17) << "-" << std::setw(14) << "-" << "\n";
  }
}

inline void write_bench_csv(std::ostream& out, std::vector<RunSummary> rows) {
  std::size_t max_counts = 1;
  for (const auto& r : rows) max_counts = std::max(max_counts, r.index_counts.size());
  const std::size_t m = max_counts - 1;
  std::sort(rows.begin(), rows.end(), [](const RunSummary& a, const RunSummary& b) {
    auto ka = std::tie(a.problem, a.method, a.delta_mult);
    auto kb = std::tie(b.problem, b.method, b.delta_mult);
    return ka < kb;
  });
  out << "problem,method,delta";
  for (std::size_t j = 0; j < m; ++j) out << ",N_g" << j + 1;
  out << ",N_f,iterations,evaluations,outcome,lower,upper,minimizer,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.problem << ',' << r.method << ',' << detail::delta_label(r.delta_mult);
    for (std::size_t j = 0; j < m; ++j) {
      if (j + 1 < r.index_counts.size()) {
        out << ',' << r.index_counts[j];
      } else {
        out << ',';
      }
    }
    out << ',' << (r.index_counts.empty() ? 0L : r.index_counts.back());
    out << ',' << r.iterations << ',' << r.evaluations << ',' << r.outcome << ','
        << detail::cell(r.lower) << ',' << detail::cell(r.upper) << ','
        << detail::cell(r.minimizer) << ',' << detail::format_double(r.wall_seconds) << '\n';
  }
}

}  // namespace lipgo
