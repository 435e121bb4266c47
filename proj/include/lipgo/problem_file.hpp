/**
 * @file problem_file.hpp
 * @brief Problem definitions: TOML-shaped text files, the built-in registry,
 * and resolution into a runnable problem + solver configuration.
 *
 * File format (UTF-8, '#' comments):
 *
 *   [problem]
 *   name = "example"
 *   interval = [0.0, 1.0]
 *   delta = "10*eps"            # or a number; default "1*eps"
 *   epsilon = 0.0001            # optional; default 1e-4 * (b - a)
 *   objective = "x"
 *   objective_lipschitz = "auto"  # or a number; default "auto"
 *   penalty_P = 15.0            # optional
 *
 *   [[constraint]]              # ordered; order is significant
 *   expr = "(x - 1)^2"
 *   lipschitz = "auto"
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lipgo/acif.hpp"
#include "lipgo/expr.hpp"
#include "lipgo/oracle.hpp"
#include "lipgo/problem.hpp"

namespace lipgo {

struct ConstraintSpec {
  std::string expr_text;
  ExprPtr expr;
  std::optional<double> lipschitz;  ///< empty = "auto"
};

/// A delta given either as an absolute value or as a multiple of epsilon.
struct DeltaSpec {
  std::optional<double> value;
  std::optional<double> eps_multiple;
};

struct ProblemSpec {
  std::string name;
  double a = 0.0, b = 0.0;
  DeltaSpec delta;                     ///< default: 1 * eps
  std::optional<double> epsilon;       ///< default: 1e-4 * (b - a)
  std::string objective_text;
  ExprPtr objective;
  std::optional<double> objective_lipschitz;  ///< empty = "auto"
  std::vector<ConstraintSpec> constraints;
  std::optional<double> penalty_P;

  double resolved_epsilon() const { return epsilon.value_or(1e-4 * (b - a)); }
  double resolved_delta() const {
    double eps = resolved_epsilon();
    if (delta.value) return *delta.value;
    return delta.eps_multiple.value_or(1.0) * eps;
  }
};

// ---------------------------------------------------------------------------
// "N*eps" parsing (shared with the CLI's --delta flag)
// ---------------------------------------------------------------------------

/// Accepts "10*eps", "10eps", "eps", or a plain number.
inline DeltaSpec parse_delta_spec(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s == "eps") return DeltaSpec{std::nullopt, 1.0};
  auto star = s.find("*eps");
  auto bare = s.find("eps");
  std::string num = s;
  bool is_mult = false;
  if (star != std::string::npos && star + 4 == s.size()) {
    num = s.substr(0, star);
    is_mult = true;
  } else if (bare != std::string::npos && bare + 3 == s.size()) {
    num = s.substr(0, bare);
    is_mult = true;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
  if (ec != std::errc() || ptr != num.data() + num.size())
    throw ConfigError("cannot parse delta specification '" + std::string(text) + "'");
  if (is_mult) return DeltaSpec{std::nullopt, v};
  return DeltaSpec{v, std::nullopt};
}

// ---------------------------------------------------------------------------
// TOML-subset reader
// ---------------------------------------------------------------------------

namespace detail {

struct TomlValue {
  enum class Kind { String, Number, Array } kind = Kind::Number;
  std::string str;
  double num = 0.0;
  std::vector<double> arr;
};

struct TomlTable {
  std::string name;
  int line = 0;
  std::map<std::string, std::pair<TomlValue, int>> entries;  // value + line
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline TomlValue parse_toml_value(const std::string& raw, int line) {
  TomlValue v;
  if (raw.empty()) throw ParseError("missing value at line " + std::to_string(line), line, 1);
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ParseError("unterminated string at line " + std::to_string(line), line, 1);
    v.kind = TomlValue::Kind::String;
    v.str = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ParseError("unterminated array at line " + std::to_string(line), line, 1);
    v.kind = TomlValue::Kind::Array;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::string it = trim(item);
      if (it.empty()) continue;
      double d = 0.0;
      auto [ptr, ec] = std::from_chars(it.data(), it.data() + it.size(), d);
      if (ec != std::errc() || ptr != it.data() + it.size())
        throw ParseError("bad array element '" + it + "' at line " + std::to_string(line), line,
                         1);
      v.arr.push_back(d);
    }
    return v;
  }
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw ParseError("bad value '" + raw + "' at line " + std::to_string(line), line, 1);
  v.kind = TomlValue::Kind::Number;
  v.num = d;
  return v;
}

inline std::vector<TomlTable> parse_toml_tables(std::string_view text) {
  std::vector<TomlTable> tables;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    // strip comments outside strings
    bool in_str = false;
    std::string stripped;
    for (char c : line) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      stripped += c;
    }
    std::string t = trim(stripped);
    if (t.empty()) continue;
    if (t.front() == '[') {
      bool array_table = t.size() >= 2 && t[1] == '[';
      std::string name = array_table ? t.substr(2, t.size() - 4) : t.substr(1, t.size() - 2);
      if ((array_table && (t.size() < 4 || t.substr(t.size() - 2) != "]]")) ||
          (!array_table && t.back() != ']'))
        throw ParseError("malformed table header at line " + std::to_string(lineno), lineno, 1);
      tables.push_back(TomlTable{trim(name), lineno, {}});
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value' at line " + std::to_string(lineno), lineno, 1);
    if (tables.empty())
      throw ParseError("key outside of any table at line " + std::to_string(lineno), lineno, 1);
    std::string key = trim(t.substr(0, eq));
    std::string raw = trim(t.substr(eq + 1));
    tables.back().entries[key] = {parse_toml_value(raw, lineno), lineno};
  }
  return tables;
}

inline std::optional<double> lipschitz_from_value(const TomlValue& v, int line) {
  if (v.kind == TomlValue::Kind::Number) {
    if (!(v.num > 0.0))
      throw ParseError("lipschitz must be positive at line " + std::to_string(line), line, 1);
    return v.num;
  }
  if (v.kind == TomlValue::Kind::String && v.str == "auto") return std::nullopt;
  throw ParseError("lipschitz must be a positive number or \"auto\" at line " +
                       std::to_string(line),
                   line, 1);
}

}  // namespace detail

inline ProblemSpec parse_problem_text(std::string_view text) {
  auto tables = detail::parse_toml_tables(text);
  ProblemSpec spec;
  bool saw_problem = false;

  for (const auto& tbl : tables) {
    if (tbl.name == "problem") {
      if (saw_problem)
        throw ParseError("duplicate [problem] table at line " + std::to_string(tbl.line),
                         tbl.line, 1);
      saw_problem = true;
      auto get = [&](const char* key) -> const std::pair<detail::TomlValue, int>* {
        auto it = tbl.entries.find(key);
        return it == tbl.entries.end() ? nullptr : &it->second;
      };
      if (auto* v = get("name")) spec.name = v->first.str;
      auto* iv = get("interval");
      if (!iv || iv->first.kind != detail::TomlValue::Kind::Array || iv->first.arr.size() != 2)
        throw ParseError("[problem] needs interval = [a, b]", tbl.line, 1);
      spec.a = iv->first.arr[0];
      spec.b = iv->first.arr[1];
      if (!(spec.a < spec.b))
        throw ParseError("interval must satisfy a < b at line " + std::to_string(iv->second),
                         iv->second, 1);
      auto* ob = get("objective");
      if (!ob || ob->first.kind != detail::TomlValue::Kind::String)
        throw ParseError("[problem] needs objective = \"<expression>\"", tbl.line, 1);
      spec.objective_text = ob->first.str;
      spec.objective = parse_expression(spec.objective_text);
      if (auto* v = get("objective_lipschitz"))
        spec.objective_lipschitz = detail::lipschitz_from_value(v->first, v->second);
      if (auto* v = get("epsilon")) {
        if (!(v->first.num > 0.0))
          throw ParseError("epsilon must be positive at line " + std::to_string(v->second),
                           v->second, 1);
        spec.epsilon = v->first.num;
      }
      if (auto* v = get("delta")) {
        if (v->first.kind == detail::TomlValue::Kind::Number) {
          if (!(v->first.num > 0.0))
            throw ParseError("delta must be positive at line " + std::to_string(v->second),
                             v->second, 1);
          spec.delta = DeltaSpec{v->first.num, std::nullopt};
        } else {
          spec.delta = parse_delta_spec(v->first.str);
          if (spec.delta.eps_multiple && !(*spec.delta.eps_multiple > 0.0))
            throw ParseError("delta multiple must be positive at line " +
                                 std::to_string(v->second),
                             v->second, 1);
        }
      }
      if (auto* v = get("penalty_P")) spec.penalty_P = v->first.num;
    } else if (tbl.name == "constraint") {
      ConstraintSpec c;
      auto it = tbl.entries.find("expr");
      if (it == tbl.entries.end() || it->second.first.kind != detail::TomlValue::Kind::String)
        throw ParseError("[[constraint]] needs expr = \"<expression>\" at line " +
                             std::to_string(tbl.line),
                         tbl.line, 1);
      c.expr_text = it->second.first.str;
      c.expr = parse_expression(c.expr_text);
      auto lk = tbl.entries.find("lipschitz");
      if (lk != tbl.entries.end())
        c.lipschitz = detail::lipschitz_from_value(lk->second.first, lk->second.second);
      spec.constraints.push_back(std::move(c));
    } else {
      throw ParseError("unknown table [" + tbl.name + "] at line " + std::to_string(tbl.line),
                       tbl.line, 1);
    }
  }
  if (!saw_problem) throw ParseError("missing [problem] table", 1, 1);
  return spec;
}

inline ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ProblemSpec spec = parse_problem_text(buf.str());
  if (spec.name.empty()) {
    auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    spec.name = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Built-in registry
// ---------------------------------------------------------------------------

/// Problems shipped with the toolkit. "fsp-9" is the multiextremal
/// three-constraint benchmark; the others are small structural probes
/// (monotone unconstrained, constant-infeasible, single-touch feasible set,
/// and a two-region feasible set for delta filtering).
inline std::map<std::string, ProblemSpec> builtin_registry() {
  std::map<std::string, ProblemSpec> reg;

  auto make = [](std::string name, double a, double b, std::string objective,
                 std::vector<std::pair<std::string, std::optional<double>>> constraints,
                 std::optional<double> penalty = std::nullopt) {
    ProblemSpec s;
    s.name = std::move(name);
    s.a = a;
    s.b = b;
    s.objective_text = std::move(objective);
    s.objective = parse_expression(s.objective_text);
    for (auto& [text, lip] : constraints) {
      ConstraintSpec c;
      c.expr_text = text;
      c.expr = parse_expression(c.expr_text);
      c.lipschitz = lip;
      s.constraints.push_back(std::move(c));
    }
    s.penalty_P = penalty;
    return s;
  };

  reg["fsp-9"] = make(
      "fsp-9", 0.0, 4.0,
      "3 - 2*exp(-1/2*(22/5 - x))*abs(sin(pi*(22/5 - x)))",
      {{"3*(exp(-abs(sin(5/2*sin(11/5*x)))) + 1/100*x^2 - 1/2)", std::nullopt},
       {"piecewise(x <= 1/2 -> 6*(x - 1/2)^2 - 1/2, else -> 1/4*(x - 5/2))", std::nullopt},
       {"4/5 - (abs(sin(24/5 - x)) + 6/25 - x/20)", std::nullopt}},
      15.0);

  reg["mono"] = make("mono", 0.0, 1.0, "x", {});

  reg["infeasible-const"] = make("infeasible-const", 0.0, 1.0, "x", {{"1", 1.0}});

  reg["isolated"] = make("isolated", 0.0, 2.0, "x", {{"(x - 1)^2", std::nullopt}});

  reg["two-region"] = make("two-region", 0.0, 1.0, "x",
                           {{"(x - 1/10)*(x - 7/50)*(x - 1/2)*(x - 9/10)", std::nullopt}});

  return reg;
}

// ---------------------------------------------------------------------------
// Resolution into a runnable problem
// ---------------------------------------------------------------------------

struct ResolveOptions {
  std::optional<double> epsilon;   ///< overrides the spec
  std::optional<DeltaSpec> delta;  ///< overrides the spec
  long lipschitz_resolution = 1'000'000;
  long max_iterations = 1'000'000;
  QdeltaMode qdelta_mode = QdeltaMode::Full;
};

struct ResolvedProblem {
  std::string name;
  ConstrainedProblem problem;
  AcifConfig config;
  std::vector<double> resolved_k;
  std::optional<double> penalty_P;
};

/// Materialize evaluators, fill "auto" Lipschitz constants from the grid
/// estimator with a 1.1 safety factor, and derive the solver configuration.
inline ResolvedProblem resolve_problem(const ProblemSpec& spec, const ResolveOptions& opt = {}) {
  double eps = opt.epsilon.value_or(spec.resolved_epsilon());
  double delta;
  if (opt.delta) {
    delta = opt.delta->value ? *opt.delta->value : opt.delta->eps_multiple.value_or(1.0) * eps;
  } else if (opt.epsilon && !spec.delta.value) {
    delta = spec.delta.eps_multiple.value_or(1.0) * eps;
  } else {
    delta = spec.resolved_delta();
  }
  if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");

  std::vector<Evaluator> evaluators;
  std::vector<double> k;
  auto resolve_k = [&](const Evaluator& f, std::optional<double> given,
                       const std::string& what) {
    if (given) return *given;
    double est = estimate_lipschitz(f, spec.a, spec.b, opt.lipschitz_resolution) * 1.1;
    if (!(est > 0.0))
      throw ConfigError("auto Lipschitz estimation found a constant " + what +
                        "; give an explicit positive constant");
    return est;
  };

  for (const auto& c : spec.constraints) {
    Evaluator f = make_evaluator(c.expr);
    k.push_back(resolve_k(f, c.lipschitz, "for constraint '" + c.expr_text + "'"));
    evaluators.push_back(std::move(f));
  }
  {
    Evaluator f = make_evaluator(spec.objective);
    k.push_back(resolve_k(f, spec.objective_lipschitz,
                          "for objective '" + spec.objective_text + "'"));
    evaluators.push_back(std::move(f));
  }

  AcifConfig cfg;
  cfg.epsilon = eps;
  cfg.delta = delta;
  cfg.max_iterations = opt.max_iterations;
  cfg.qdelta_mode = opt.qdelta_mode;

  std::vector<double> k_copy = k;
  return ResolvedProblem{spec.name,
                         ConstrainedProblem(std::move(evaluators), std::move(k_copy), spec.a,
                                            spec.b, delta),
                         cfg, std::move(k), spec.penalty_P};
}

}  // namespace lipgo
