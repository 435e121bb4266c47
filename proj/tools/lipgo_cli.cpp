// Command-line front end: solve / bench / oracle / trace-plotdata.
//
// Exit codes: 0 solution with bounds, 2 infeasible, 1 runtime failure,
// 64 usage or input-file errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lipgo/acif.hpp"
#include "lipgo/oracle.hpp"
#include "lipgo/pijavskii.hpp"
#include "lipgo/problem_file.hpp"
#include "lipgo/report.hpp"
#include "lipgo/synthetic.hpp"
#include "lipgo/trace_io.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

struct CommonArgs {
  std::string problem;
  std::string file;
  std::optional<double> eps;
  std::string delta;
  long max_iter = 1'000'000;
  std::string qdelta_mode = "full";
  std::uint64_t seed = 1;
};

lipgo::ProblemSpec spec_from_args(const CommonArgs& args) {
  if (!args.file.empty()) return lipgo::load_problem_file(args.file);
  auto reg = lipgo::builtin_registry();
  auto it = reg.find(args.problem);
  if (it == reg.end())
    throw lipgo::ConfigError("unknown problem '" + args.problem +
                             "' (registry: fsp-9, mono, infeasible-const, isolated, two-region, "
                             "synthetic)");
  return it->second;
}

lipgo::ResolveOptions resolve_options(const CommonArgs& args) {
  lipgo::ResolveOptions opt;
  opt.epsilon = args.eps;
  if (!args.delta.empty()) opt.delta = lipgo::parse_delta_spec(args.delta);
  opt.max_iterations = args.max_iter;
  opt.qdelta_mode = args.qdelta_mode == "simplified" ? lipgo::QdeltaMode::Simplified
                                                     : lipgo::QdeltaMode::Full;
  return opt;
}

lipgo::ResolvedProblem resolved_from_args(const CommonArgs& args) {
  if (args.problem == "synthetic" && args.file.empty()) {
    lipgo::SyntheticProblem syn = lipgo::make_random_piecewise_problem(args.seed);
    lipgo::AcifConfig cfg = syn.config;
    if (args.eps) cfg.epsilon = *args.eps;
    if (!args.delta.empty()) {
      auto ds = lipgo::parse_delta_spec(args.delta);
      cfg.delta = ds.value ? *ds.value : ds.eps_multiple.value_or(1.0) * cfg.epsilon;
    }
    cfg.max_iterations = args.max_iter;
    cfg.qdelta_mode = args.qdelta_mode == "simplified" ? lipgo::QdeltaMode::Simplified
                                                       : lipgo::QdeltaMode::Full;
    std::vector<double> k(syn.problem.lipschitz().begin(), syn.problem.lipschitz().end());
    std::vector<lipgo::Evaluator> fs;
    for (const auto& piece : syn.pieces)
      fs.push_back([pl = piece](double x) { return pl(x); });
    return lipgo::ResolvedProblem{
        "synthetic-" + std::to_string(args.seed),
        lipgo::ConstrainedProblem(std::move(fs), k, syn.problem.a(), syn.problem.b(), cfg.delta),
        cfg, k, std::nullopt};
  }
  return lipgo::resolve_problem(spec_from_args(args), resolve_options(args));
}

void write_trace_file(const std::string& path, const std::vector<lipgo::TraceEvent>& events) {
  std::ofstream out(path);
  if (!out) throw lipgo::ConfigError("cannot write trace file '" + path + "'");
  lipgo::write_trace_csv(out, events);
}

int cmd_solve(const CommonArgs& args, const std::string& method, double penalty,
              const std::string& trace_path) {
  lipgo::ResolvedProblem rp = resolved_from_args(args);
  std::vector<lipgo::TraceEvent> events;
  lipgo::RunSummary summary;
  if (method == "pen") {
    summary = lipgo::run_pen_summary(rp, rp.penalty_P.value_or(penalty), &events);
  } else {
    summary = lipgo::run_acif_summary(rp, nullptr, &events);
  }
  lipgo::print_summary(std::cout, summary);
  if (summary.outcome == "infeasible") {
    std::cout << "v_delta:     ";
    if (summary.v_delta.empty()) {
      std::cout << "(empty)";
    } else {
      for (double v : summary.v_delta) std::cout << v << ' ';
    }
    std::cout << "\n";
  }
  if (!trace_path.empty()) write_trace_file(trace_path, events);
  if (summary.outcome == "infeasible") return kExitInfeasible;
  if (summary.outcome.rfind("error", 0) == 0) return kExitRuntime;
  return kExitSolved;
}

int cmd_bench(const CommonArgs& args, const std::vector<std::string>& problems,
              const std::string& dir, double penalty, const std::string& csv_path) {
  std::vector<lipgo::ProblemSpec> specs;
  auto reg = lipgo::builtin_registry();
  for (const auto& name : problems) {
    auto it = reg.find(name);
    if (it == reg.end()) throw lipgo::ConfigError("unknown problem '" + name + "'");
    specs.push_back(it->second);
  }
  if (!dir.empty()) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".toml")
        specs.push_back(lipgo::load_problem_file(entry.path().string()));
    }
  }
  if (specs.empty()) throw CLI::ValidationError("bench", "no problems given");

  std::vector<lipgo::RunSummary> rows;
  for (const auto& spec : specs) {
    for (double mult : {1.0, 10.0}) {
      lipgo::ResolveOptions opt = resolve_options(args);
      opt.delta = lipgo::DeltaSpec{std::nullopt, mult};
      try {
        rows.push_back(lipgo::run_acif_summary(lipgo::resolve_problem(spec, opt)));
      } catch (const lipgo::Error& e) {
        lipgo::RunSummary s;
        s.problem = spec.name;
        s.method = "acif";
        s.delta_mult = mult;
        s.outcome = std::string("error: ") + e.what();
        rows.push_back(s);
      }
    }
    try {
      lipgo::ResolvedProblem rp = lipgo::resolve_problem(spec, resolve_options(args));
      rows.push_back(lipgo::run_pen_summary(rp, spec.penalty_P.value_or(penalty)));
    } catch (const lipgo::Error& e) {
      lipgo::RunSummary s;
      s.problem = spec.name;
      s.method = "pen";
      s.outcome = std::string("error: ") + e.what();
      rows.push_back(s);
    }
  }
  lipgo::print_bench_table(std::cout, rows);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw lipgo::ConfigError("cannot write CSV '" + csv_path + "'");
    lipgo::write_bench_csv(out, rows);
  }
  return kExitSolved;
}

int cmd_oracle(const CommonArgs& args, long resolution, const std::string& csv_path) {
  lipgo::ResolvedProblem rp = resolved_from_args(args);
  lipgo::GridReport rep = lipgo::grid_report(rp.problem, resolution);
  std::cout << "resolution:        " << rep.resolution << "\n";
  std::cout << "feasible runs:     " << rep.feasible_intervals.size() << "\n";
  for (const auto& [l, r] : rep.feasible_intervals)
    std::cout << "  [" << l << ", " << r << "]  length " << r - l << "\n";
  std::cout << "delta-admissible:  " << rep.q_delta_intervals.size() << " (delta = "
            << rp.problem.delta() << ")\n";
  for (const auto& [l, r] : rep.q_delta_intervals) std::cout << "  [" << l << ", " << r << "]\n";
  if (!rep.isolated_points.empty()) {
    std::cout << "isolated points:   ";
    for (double p : rep.isolated_points) std::cout << p << ' ';
    std::cout << "\n";
  }
  if (rep.global_min) {
    std::cout << "global min:        " << std::setprecision(10) << *rep.global_min << " at x = "
              << *rep.global_argmin << "\n";
  } else {
    std::cout << "global min:        none (delta-admissible set empty)\n";
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw lipgo::ConfigError("cannot write CSV '" + csv_path + "'");
    out << "left,right,length,delta_admissible\n";
    for (const auto& [l, r] : rep.feasible_intervals) {
      bool adm = false;
      for (const auto& [ql, qr] : rep.q_delta_intervals)
        if (ql == l && qr == r) adm = true;
      out << l << ',' << r << ',' << r - l << ',' << (adm ? 1 : 0) << '\n';
    }
  }
  return kExitSolved;
}

int cmd_trace_plotdata(const std::string& trace_path, const std::string& out_dir,
                       std::string prefix) {
  std::ifstream in(trace_path);
  if (!in) throw lipgo::ConfigError("cannot open trace '" + trace_path + "'");
  std::vector<lipgo::TraceEvent> events = lipgo::read_trace_csv(in);
  if (prefix.empty()) {
    prefix = std::filesystem::path(trace_path).stem().string();
  }
  auto written = lipgo::write_plotdata(events, out_dir, prefix);
  for (const auto& path : written) std::cout << path << "\n";
  return kExitSolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Univariate Lipschitz global optimization with multiextremal constraints"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string method = "acif";
  double penalty = 15.0;
  std::string trace_path, csv_path, dir, out_dir = ".", prefix;
  std::vector<std::string> problems;
  long resolution = 1'000'000;

  auto add_common = [&](CLI::App* cmd, bool needs_source) {
    auto* p = cmd->add_option("--problem", args.problem, "registry problem name");
    auto* f = cmd->add_option("--file", args.file, "problem definition file");
    if (needs_source) {
      p->excludes(f);
    }
    cmd->add_option("--eps", args.eps, "search accuracy (default 1e-4 * (b - a))");
    cmd->add_option("--delta", args.delta,
                    "minimal admissible feasible length: number or Neps (e.g. 10eps)");
    cmd->add_option("--max-iter", args.max_iter, "trial budget");
    cmd->add_option("--qdelta-mode", args.qdelta_mode, "full | simplified")
        ->check(CLI::IsMember({"full", "simplified"}));
    cmd->add_option("--seed", args.seed, "seed for --problem synthetic");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one problem");
  add_common(solve, true);
  solve->add_option("--method", method, "acif | pen")
      ->check(CLI::IsMember({"acif", "pen"}));
  solve->add_option("--penalty", penalty, "penalty coefficient for --method pen");
  solve->add_option("--trace", trace_path, "write the trial trace CSV here");

  CLI::App* bench = app.add_subcommand("bench", "compare methods over a list of problems");
  add_common(bench, false);
  bench->add_option("--problems", problems, "registry problem names")->delimiter(',');
  bench->add_option("--dir", dir, "directory of .toml problem files");
  bench->add_option("--penalty", penalty, "default penalty coefficient");
  bench->add_option("--csv", csv_path, "write machine-readable results here");

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force feasibility/minimum report");
  add_common(oracle, true);
  oracle->add_option("--resolution", resolution, "grid node count");
  oracle->add_option("--csv", csv_path, "write the feasible-interval list here");

  CLI::App* plot = app.add_subcommand("trace-plotdata", "split a trace CSV into plot files");
  plot->add_option("--trace", trace_path, "input trace CSV")->required();
  plot->add_option("--out-dir", out_dir, "output directory");
  plot->add_option("--prefix", prefix, "output file prefix (default: trace file stem)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (solve->parsed()) {
      if (args.problem.empty() && args.file.empty())
        throw CLI::ValidationError("solve", "need --problem or --file");
      return cmd_solve(args, method, penalty, trace_path);
    }
    if (bench->parsed()) return cmd_bench(args, problems, dir, penalty, csv_path);
    if (oracle->parsed()) {
      if (args.problem.empty() && args.file.empty())
        throw CLI::ValidationError("oracle", "need --problem or --file");
      return cmd_oracle(args, resolution, csv_path);
    }
    if (plot->parsed()) return cmd_trace_plotdata(trace_path, out_dir, prefix);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const lipgo::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const lipgo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const lipgo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
