// End-to-end checks of the command-line tool: exit codes, output shape, and
// the trace -> plot-data pipeline.
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  std::string cmd = std::string(LIPGO_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  CommandResult res;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "lipgo_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Cli, SolveMonoExitsZero) {
  CommandResult res = run_cli("solve --problem mono");
  EXPECT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("outcome:     bounded"), std::string::npos) << res.output;
  EXPECT_NE(res.output.find("evaluations:"), std::string::npos);
}

TEST(Cli, SolveInfeasibleExitsTwoAndNamesVDelta) {
  CommandResult res = run_cli("solve --problem infeasible-const");
  EXPECT_EQ(res.exit_code, 2) << res.output;
  EXPECT_NE(res.output.find("infeasible"), std::string::npos);
  EXPECT_NE(res.output.find("v_delta:"), std::string::npos);
}

TEST(Cli, SolveIsolatedReportsTheTouchPoint) {
  CommandResult res = run_cli("solve --problem isolated");
  EXPECT_EQ(res.exit_code, 2) << res.output;
  EXPECT_NE(res.output.find("v_delta:     1"), std::string::npos) << res.output;
}

TEST(Cli, UnknownProblemIsUsageError) {
  CommandResult res = run_cli("solve --problem not-a-problem");
  EXPECT_EQ(res.exit_code, 64) << res.output;
}

TEST(Cli, BadFlagIsUsageError) {
  CommandResult res = run_cli("solve --no-such-flag");
  EXPECT_EQ(res.exit_code, 64) << res.output;
}

TEST(Cli, MissingFileIsUsageError) {
  CommandResult res = run_cli("solve --file /does/not/exist.toml");
  EXPECT_EQ(res.exit_code, 64) << res.output;
}

TEST(Cli, PenMethodUsesFullEvaluationAccounting) {
  CommandResult res = run_cli("solve --problem fsp-9 --method pen --penalty 15");
  EXPECT_EQ(res.exit_code, 0) << res.output;
  // iterations and evaluations lines with evaluations = 4 * iterations
  long iters = 0, evals = 0;
  std::sscanf(res.output.substr(res.output.find("iterations:")).c_str(), "iterations:  %ld",
              &iters);
  std::sscanf(res.output.substr(res.output.find("evaluations:")).c_str(), "evaluations: %ld",
              &evals);
  ASSERT_GT(iters, 0);
  EXPECT_EQ(evals, 4 * iters);
}

TEST(Cli, SolveFromFileMatchesRegistry) {
  CommandResult file_run = run_cli("solve --file " + std::string(LIPGO_SOURCE_DIR) +
                                   "/problems/problem9.toml --delta 10eps");
  CommandResult reg_run = run_cli("solve --problem fsp-9 --delta 10eps");
  EXPECT_EQ(file_run.exit_code, 0) << file_run.output;
  auto minimizer_line = [](const std::string& s) {
    auto pos = s.find("minimizer:");
    return s.substr(pos, s.find('\n', pos) - pos);
  };
  EXPECT_EQ(minimizer_line(file_run.output), minimizer_line(reg_run.output));
}

TEST(Cli, TracePlotDataPipeline) {
  auto dir = temp_dir();
  auto trace = (dir / "fsp9.csv").string();
  CommandResult solve =
      run_cli("solve --problem fsp-9 --delta 10eps --trace " + trace);
  EXPECT_EQ(solve.exit_code, 0) << solve.output;
  ASSERT_TRUE(std::filesystem::exists(trace));

  CommandResult plot = run_cli("trace-plotdata --trace " + trace + " --out-dir " +
                               (dir / "plot").string());
  EXPECT_EQ(plot.exit_code, 0) << plot.output;
  int index_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "plot")) {
    if (entry.path().filename().string().find("_index_") != std::string::npos) ++index_files;
  }
  EXPECT_EQ(index_files, 4);
}

TEST(Cli, BenchEmitsTableAndCsv) {
  auto dir = temp_dir();
  auto csv = (dir / "bench.csv").string();
  CommandResult res = run_cli("bench --problems mono,infeasible-const --csv " + csv);
  EXPECT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("Average"), std::string::npos);
  ASSERT_TRUE(std::filesystem::exists(csv));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("problem,method,delta", 0), 0u) << header;
}

TEST(Cli, BenchWithoutProblemsIsUsageError) {
  CommandResult res = run_cli("bench");
  EXPECT_EQ(res.exit_code, 64) << res.output;
}

TEST(Cli, OracleReportsProblem9Structure) {
  CommandResult res = run_cli("oracle --problem fsp-9 --resolution 200000");
  EXPECT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("feasible runs:     3"), std::string::npos) << res.output;
  EXPECT_NE(res.output.find("global min:"), std::string::npos);
}

TEST(Cli, SyntheticProblemRunsFromSeed) {
  CommandResult res = run_cli("solve --problem synthetic --seed 42");
  EXPECT_TRUE(res.exit_code == 0 || res.exit_code == 2) << res.output;
  CommandResult again = run_cli("solve --problem synthetic --seed 42");
  EXPECT_EQ(res.output, again.output);  // deterministic per seed
}

}  // namespace
