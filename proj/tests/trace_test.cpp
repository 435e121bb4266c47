#include "lipgo/trace_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lipgo/problem_file.hpp"
#include "lipgo/report.hpp"

namespace {

using namespace lipgo;

std::vector<TraceEvent> problem9_events(double delta_mult) {
  static std::map<double, std::vector<TraceEvent>> cache;
  auto it = cache.find(delta_mult);
  if (it != cache.end()) return it->second;
  auto reg = builtin_registry();
  ResolveOptions opt;
  opt.lipschitz_resolution = 200'000;
  opt.delta = DeltaSpec{std::nullopt, delta_mult};
  ResolvedProblem rp = resolve_problem(reg.at("fsp-9"), opt);
  Outcome out = run_acif(rp.problem, rp.config);
  cache[delta_mult] = out.events;
  return out.events;
}

TEST(TraceCsv, RoundTripPreservesTheCsvColumns) {
  std::vector<TraceEvent> events = problem9_events(10.0);
  std::ostringstream os;
  write_trace_csv(os, events);
  std::istringstream is(os.str());
  std::vector<TraceEvent> back = read_trace_csv(is);
  ASSERT_EQ(back.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(back[i].k, events[i].k);
    EXPECT_EQ(back[i].action, events[i].action);
    EXPECT_EQ(back[i].x.has_value(), events[i].x.has_value());
    if (events[i].x) EXPECT_EQ(*back[i].x, *events[i].x);  // %.17g round-trips
    EXPECT_EQ(back[i].nu, events[i].nu);
    if (events[i].g_value) EXPECT_EQ(*back[i].g_value, *events[i].g_value);
    if (events[i].zstar) EXPECT_EQ(*back[i].zstar, *events[i].zstar);
    EXPECT_EQ(back[i].q, events[i].q);
    EXPECT_EQ(back[i].t, events[i].t);
  }
}

TEST(TraceCsv, HeaderIsMandatory) {
  std::istringstream empty("");
  EXPECT_THROW(read_trace_csv(empty), ParseError);
  std::istringstream bad("k,action\n");
  EXPECT_THROW(read_trace_csv(bad), ParseError);
}

TEST(TraceCsv, MalformedRowsCarryLineNumbers) {
  std::istringstream is(std::string(kTraceCsvHeader) +
                        "\n1,trial,0.5,1,0.2,,1,,\nnot-a-number,trial,,,,,0,,\n");
  try {
    read_trace_csv(is);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
  }
  std::istringstream bad_action(std::string(kTraceCsvHeader) + "\n1,jump,,,,,0,,\n");
  EXPECT_THROW(read_trace_csv(bad_action), ParseError);
}

TEST(PlotData, GroupsTrialsByIndexAndCountsMatchIterations) {
  std::vector<TraceEvent> events = problem9_events(10.0);
  std::string dir = (std::filesystem::temp_directory_path() / "lipgo_plotdata").string();
  std::filesystem::remove_all(dir);
  auto files = write_plotdata(events, dir, "p9");

  long trial_rows = 0;
  for (const auto& ev : events)
    if (ev.action == TraceAction::Trial) ++trial_rows;

  long total_points = 0;
  int index_files = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    long rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    if (path.find("_index_") != std::string::npos) {
      ++index_files;
      total_points += rows;
    } else {
      EXPECT_NE(path.find("_dynamics"), std::string::npos);
      EXPECT_EQ(rows, trial_rows);
    }
  }
  EXPECT_EQ(index_files, 4);  // one per starting index of the three-constraint problem
  EXPECT_EQ(total_points, trial_rows);
}

TEST(PlotData, EmptyTraceWritesEmptyDynamics) {
  std::string dir = (std::filesystem::temp_directory_path() / "lipgo_plotdata_empty").string();
  std::filesystem::remove_all(dir);
  auto files = write_plotdata(std::vector<TraceEvent>{}, dir, "none");
  ASSERT_EQ(files.size(), 1u);  // no index files, just the empty dynamics
  std::ifstream in(files[0]);
  std::string line;
  EXPECT_FALSE(std::getline(in, line));
}

TEST(PlotData, PenTraceIsASingleGroup) {
  auto reg = builtin_registry();
  ResolveOptions opt;
  opt.lipschitz_resolution = 100'000;
  ResolvedProblem rp = resolve_problem(reg.at("fsp-9"), opt);
  std::vector<TraceEvent> events;
  RunSummary s = run_pen_summary(rp, 15.0, &events);
  std::string dir = (std::filesystem::temp_directory_path() / "lipgo_plotdata_pen").string();
  std::filesystem::remove_all(dir);
  auto files = write_plotdata(events, dir, "pen");
  int index_files = 0;
  for (const auto& path : files)
    if (path.find("_index_") != std::string::npos) ++index_files;
  EXPECT_EQ(index_files, 1);
}

TEST(Summary, ArithmeticTiesOut) {
  auto reg = builtin_registry();
  ResolveOptions opt;
  opt.lipschitz_resolution = 200'000;
  opt.delta = DeltaSpec{std::nullopt, 10.0};
  ResolvedProblem rp = resolve_problem(reg.at("fsp-9"), opt);
  RunSummary s = run_acif_summary(rp);
  long weighted = 0, total = 0;
  for (std::size_t j = 0; j < s.index_counts.size(); ++j) {
    weighted += static_cast<long>(j + 1) * s.index_counts[j];
    total += s.index_counts[j];
  }
  EXPECT_EQ(s.evaluations, weighted);
  EXPECT_EQ(s.iterations, total);

  RunSummary pen = run_pen_summary(rp, 15.0);
  EXPECT_EQ(pen.evaluations, 4 * pen.iterations);
}

TEST(Bench, TableAndCsvContainEveryRow) {
  auto reg = builtin_registry();
  std::vector<RunSummary> rows;
  for (const char* name : {"mono", "infeasible-const"}) {
    for (double mult : {1.0, 10.0}) {
      ResolveOptions opt;
      opt.lipschitz_resolution = 10'000;
      opt.delta = DeltaSpec{std::nullopt, mult};
      rows.push_back(run_acif_summary(resolve_problem(reg.at(name), opt)));
    }
  }
  std::ostringstream table;
  print_bench_table(table, rows);
  EXPECT_NE(table.str().find("mono"), std::string::npos);
  EXPECT_NE(table.str().find("infeasible-const"), std::string::npos);
  EXPECT_NE(table.str().find("Average"), std::string::npos);

  std::ostringstream csv;
  write_bench_csv(csv, rows);
  std::string text = csv.str();
  long lines = static_cast<long>(std::count(text.begin(), text.end(), '\n'));
  EXPECT_EQ(lines, 1 + static_cast<long>(rows.size()));
}

}  // namespace
