// Copyright 2026 The qpft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qpft/dmorph.hpp"
#include "qpft/dynamics.hpp"

namespace qpft::io {

using json = nlohmann::json;

/// Shortest-exact decimal form with 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error("not a number: '" + s + "'");
  return v;
}

/// A rectangular table of numbers or strings, emitted as CSV or as a JSON
/// array of row objects.
class Table {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw Error("Table: row width does not match header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        std::visit([&](const auto& v) { os << cell_text(v); }, row[i]);
      }
      os << '\n';
    }
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows_) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i)
        std::visit([&](const auto& v) { obj[header_[i]] = v; }, row[i]);
      arr.push_back(std::move(obj));
    }
    return arr;
  }

  /// Writes `<stem>.csv` or `<stem>.json`.
  void save(const std::string& stem, bool as_json) const {
    std::ofstream out(stem + (as_json ? ".json" : ".csv"));
    if (!out) throw Error("cannot write " + stem);
    if (as_json)
      out << to_json().dump(2) << '\n';
    else
      write_csv(out);
  }

 private:
  static std::string cell_text(double v) { return format_double(v); }
  static std::string cell_text(long long v) { return std::to_string(v); }
  static std::string cell_text(const std::string& v) { return v; }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

// ---------------------------------------------------------------------------
// Field sets

/// Columns t, eps_1, ..., eps_n; one row per knob.
inline void write_fields_csv(std::ostream& os, const ControlFieldSet& f) {
  os << 't';
  for (int k = 0; k < f.fields(); ++k) os << ",eps_" << (k + 1);
  os << '\n';
  for (int j = 0; j < f.steps(); ++j) {
    os << format_double(f.grid.knob_time(j));
    for (int k = 0; k < f.fields(); ++k) os << ',' << format_double(f.values(k, j));
    os << '\n';
  }
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}
}  // namespace detail

/// Inverse of write_fields_csv; T is the last knob time.
inline ControlFieldSet read_fields_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("fields csv: empty input");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header[0] != "t") throw Error("fields csv: bad header");
  const auto nf = static_cast<int>(header.size() - 1);
  std::vector<std::vector<double>> cols(nf);
  double last_t = 0.0;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) != nf + 1)
      throw Error("fields csv: line " + std::to_string(row) + " has wrong width");
    last_t = parse_double(cells[0]);
    for (int k = 0; k < nf; ++k) cols[k].push_back(parse_double(cells[k + 1]));
  }
  const auto steps = static_cast<int>(cols[0].size());
  if (steps == 0) throw Error("fields csv: no rows");
  RMatrix values(nf, steps);
  for (int k = 0; k < nf; ++k)
    for (int j = 0; j < steps; ++j) values(k, j) = cols[k][j];
  return {TimeGrid(last_t, steps), std::move(values)};
}

inline json fields_to_json(const ControlFieldSet& f, std::uint64_t seed) {
  json j;
  j["T"] = f.grid.final_time();
  j["steps"] = f.grid.steps();
  j["dt"] = f.grid.dt();
  j["seed"] = seed;
  json rows = json::array();
  for (int k = 0; k < f.fields(); ++k) {
    std::vector<double> r(f.steps());
    for (int i = 0; i < f.steps(); ++i) r[i] = f.values(k, i);
    rows.push_back(r);
  }
  j["fields"] = std::move(rows);
  return j;
}

inline ControlFieldSet fields_from_json(const json& j) {
  const TimeGrid grid(j.at("T").get<double>(), j.at("steps").get<int>());
  const auto& rows = j.at("fields");
  RMatrix values(static_cast<Eigen::Index>(rows.size()), grid.steps());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (static_cast<int>(rows[k].size()) != grid.steps())
      throw Error("fields json: row length does not match steps");
    for (int i = 0; i < grid.steps(); ++i)
      values(static_cast<Eigen::Index>(k), i) = rows[k][i].get<double>();
  }
  return {grid, std::move(values)};
}

// ---------------------------------------------------------------------------
// Optimization traces

inline Table trace_table(const OptimizationTrace& trace) {
  std::vector<std::string> header{"step", "s", "ds", "objective", "sigma", "lambda",
                                  "fluence_total"};
  const std::size_t nf = trace.steps.empty() ? 0 : trace.steps.front().fluences.size();
  for (std::size_t k = 0; k < nf; ++k) header.push_back("fluence_" + std::to_string(k + 1));
  Table t(std::move(header));
  for (const auto& row : trace.steps) {
    std::vector<Table::Cell> cells{static_cast<long long>(row.step), row.s, row.ds,
                                   row.objective, row.sigma, row.lambda, row.fluence_total};
    for (double f : row.fluences) cells.emplace_back(f);
    t.add_row(std::move(cells));
  }
  return t;
}

inline json settings_to_json(const DmorphSettings& s) {
  return {{"target_value", s.target_value},     {"rel_improvement", s.rel_improvement},
          {"stall_window", s.stall_window},     {"rtol", s.rtol},
          {"atol", s.atol},                     {"max_steps", s.max_steps},
          {"gradient_mode", to_string(s.gradient_mode)},
          {"descent_slack", s.descent_slack},   {"flow_objective_scale", "normalized"}};
}

inline json trace_summary(const OptimizationTrace& trace, std::uint64_t seed,
                          ObjectiveKind kind, const DmorphSettings& settings) {
  return {{"termination", to_string(trace.termination)},
          {"effort", trace.accepted},
          {"rejected", trace.rejected},
          {"gradient_evaluations", trace.gradient_evaluations},
          {"final_objective", trace.final_objective()},
          {"lambda_star", trace.lambda_star()},
          {"fluence_star", trace.fluence_star()},
          {"objective", to_string(kind)},
          {"seed", seed},
          {"settings", settings_to_json(settings)}};
}

}  // namespace qpft::io
