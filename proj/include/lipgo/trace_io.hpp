/**
 * @file trace_io.hpp
 * @brief Trace CSV serialization and plot-data export.
 *
 * CSV schema (fixed column order, header mandatory, '.' decimal point):
 *   k,action,x,nu,g_value,zstar,q,t,R_t
 * Empty cells mean "not applicable to this action".
 */
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lipgo/acif.hpp"

namespace lipgo {

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
inline std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace detail

inline constexpr const char* kTraceCsvHeader = "k,action,x,nu,g_value,zstar,q,t,R_t";

inline void write_trace_csv(std::ostream& out, std::span<const TraceEvent> events) {
  out << kTraceCsvHeader << '\n';
  for (const auto& ev : events) {
    out << ev.k << ',' << trace_action_name(ev.action) << ',' << detail::cell(ev.x) << ','
        << detail::cell(ev.nu) << ',' << detail::cell(ev.g_value) << ','
        << detail::cell(ev.zstar) << ',' << ev.q << ',' << detail::cell(ev.t) << ','
        << detail::cell(ev.r_t) << '\n';
  }
}

/// Parse a trace CSV back into events (the CSV columns only).
inline std::vector<TraceEvent> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty trace: missing header row", 1, 1);
  if (line.ends_with('\r')) line.pop_back();
  if (line != kTraceCsvHeader)
    throw ParseError("bad trace header '" + line + "'", 1, 1);

  std::vector<TraceEvent> events;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.ends_with('\r')) line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    while (cells.size() < 9) cells.emplace_back();
    if (cells.size() != 9)
      throw ParseError("expected 9 columns at line " + std::to_string(lineno), lineno, 1);

    auto opt_double = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      try {
        return std::stod(s);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + s + "' at line " + std::to_string(lineno), lineno, 1);
      }
    };
    TraceEvent ev;
    try {
      ev.k = std::stol(cells[0]);
    } catch (const std::exception&) {
      throw ParseError("bad iteration count '" + cells[0] + "' at line " + std::to_string(lineno),
                       lineno, 1);
    }
    const std::string& act = cells[1];
    if (act == "trial") ev.action = TraceAction::Trial;
    else if (act == "exclude") ev.action = TraceAction::Exclude;
    else if (act == "motion") ev.action = TraceAction::Motion;
    else if (act == "restart") ev.action = TraceAction::Restart;
    else if (act == "stop") ev.action = TraceAction::Stop;
    else
      throw ParseError("unknown action '" + act + "' at line " + std::to_string(lineno), lineno,
                       1);
    ev.x = opt_double(cells[2]);
    if (!cells[3].empty()) ev.nu = static_cast<int>(std::stol(cells[3]));
    ev.g_value = opt_double(cells[4]);
    ev.zstar = opt_double(cells[5]);
    ev.q = cells[6].empty() ? 0 : static_cast<std::size_t>(std::stoul(cells[6]));
    if (!cells[7].empty()) ev.t = static_cast<std::size_t>(std::stoul(cells[7]));
    ev.r_t = opt_double(cells[8]);
    events.push_back(ev);
  }
  return events;
}

/**
 * Split a trace into per-index trial-point files (one x per line, one file
 * per last-evaluated index) plus an iteration-vs-x dynamics file. Returns
 * the paths written.
 */
inline std::vector<std::string> write_plotdata(std::span<const TraceEvent> events,
                                               const std::string& out_dir,
                                               const std::string& prefix) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::map<int, std::vector<double>> by_index;
  std::vector<std::pair<long, double>> dynamics;
  for (const auto& ev : events) {
    if (ev.action != TraceAction::Trial || !ev.x || !ev.nu) continue;
    by_index[*ev.nu].push_back(*ev.x);
    dynamics.emplace_back(ev.k, *ev.x);
  }
  std::vector<std::string> written;
  for (const auto& [nu, xs] : by_index) {
    std::string path = (fs::path(out_dir) / (prefix + "_index_" + std::to_string(nu) + ".txt"))
                           .string();
    std::ofstream f(path);
    for (double x : xs) f << detail::format_double(x) << '\n';
    written.push_back(path);
  }
  std::string dyn_path = (fs::path(out_dir) / (prefix + "_dynamics.txt")).string();
  std::ofstream f(dyn_path);
  for (const auto& [k, x] : dynamics) f << k << ' ' << detail::format_double(x) << '\n';
  written.push_back(dyn_path);
  return written;
}

}  // namespace lipgo
