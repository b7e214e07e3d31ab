#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rearr/approx.hpp"
#include "rearr/constructs.hpp"
#include "rearr/errors.hpp"
#include "rearr/expr.hpp"
#include "rearr/functional.hpp"
#include "rearr/harness.hpp"
#include "rearr/integrand.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/pl_literal.hpp"
#include "rearr/weight.hpp"
#include "rearr/weightlab.hpp"

namespace rearr {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// ---- inputs ----------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace detail

/// Grid weight from CSV: header row holds the x-nodes (first cell is a
/// label), each further row a v-sample followed by the node values.
inline Weight load_grid_csv(std::istream& in, const std::string& description) {
  std::string line;
  std::vector<std::vector<double>> table;
  int lineno = 0;
  std::vector<double> xs;
  GridTable t;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (xs.empty()) {
      for (std::size_t i = 1; i < cells.size(); ++i) xs.push_back(detail::parse_number(cells[i], 0));
      continue;
    }
    if (cells.size() != xs.size() + 1) {
      throw Error(ErrorCode::InvalidArgument, "grid row " + std::to_string(lineno) + " has the wrong cell count");
    }
    t.v_samples.push_back(detail::parse_number(cells[0], 0));
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(detail::parse_number(cells[i], 0));
    t.rows.push_back(std::move(row));
  }
  if (xs.size() < 3) throw Error(ErrorCode::InvalidArgument, "grid needs at least three x-nodes");
  t.k = static_cast<int>(xs.size()) - 1;
  for (int i = 0; i <= t.k; ++i) {
    if (std::abs(xs[i] - t.node(i)) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "grid x-nodes must be -1 + 2i/k with k even");
    }
  }
  return Weight::from_grid(std::move(t), description);
}

/// Expression in x, v or "grid:@path".
inline Weight parse_weight(const std::string& text, std::optional<Interval> v_range = std::nullopt) {
  constexpr std::string_view kGrid = "grid:@";
  if (text.rfind(kGrid, 0) == 0) {
    const std::string path = text.substr(kGrid.size());
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open grid file " + path);
    Weight w = load_grid_csv(f, text);
    return v_range ? w.with_v_range(*v_range) : w;
  }
  return Weight::from_expr(text, v_range.value_or(Interval{0.0, 1.0}));
}

/// "power:alpha", "quadratic:gamma" or an expression in v, p.
inline Integrand parse_integrand(const std::string& text) {
  if (text.rfind("power:", 0) == 0) return Integrand::power(detail::parse_number(std::string_view(text).substr(6), 6));
  if (text.rfind("quadratic:", 0) == 0) {
    return Integrand::quadratic(detail::parse_number(std::string_view(text).substr(10), 10));
  }
  return Integrand::from_expr(text);
}

// ---- JSON ------------------------------------------------------------------

inline Json to_json(const PiecewiseLinear& u) {
  return Json{{"xs", std::vector<double>(u.xs().begin(), u.xs().end())},
              {"ys", std::vector<double>(u.ys().begin(), u.ys().end())}};
}

inline Json to_json(const PlMetrics& m) {
  return Json{{"integral", m.integral},
              {"total_variation", m.total_variation},
              {"min", m.min},
              {"max", m.max},
              {"max_slope", m.max_slope}};
}

inline Json to_json(const ConditionReport& c) {
  Json j;
  j["method"] = c.method;
  j["x_resolution"] = c.x_resolution;
  j["v_resolution"] = c.v_resolution;
  j["even"] = c.even;
  j["even_worst"] = {{"x", c.even_worst.x}, {"v", c.even_worst.v}, {"magnitude", c.even_worst.magnitude}};
  auto triple = [](const TripleViolation& t) {
    return Json{{"s", t.s}, {"t", t.t}, {"v", t.v}, {"magnitude", t.magnitude}};
  };
  if (c.cond_c_checked) {
    j["cond_c"] = c.cond_c;
    j["cond_c_worst"] = triple(c.cond_c_worst);
    j["admissible"] = c.admissible();
  }
  if (c.cond_sym_checked) {
    j["cond_sym"] = c.cond_sym;
    j["cond_sym_worst"] = triple(c.cond_sym_worst);
    j["convex"] = c.convex;
    j["characterization_agrees"] = c.characterization_agrees;
  }
  return j;
}

inline Json to_json(const FunctionalValue& v) {
  return Json{{"value", v.value},
              {"err_estimate", v.error},
              {"baseline", v.baseline},
              {"normalized", v.normalized()}};
}

inline Json to_json(const VerifyReport& r) {
  Json j;
  j["mode"] = std::string(to_string(r.mode));
  j["I_u"] = r.I_u;
  j["I_rearranged"] = r.I_rearranged;
  j["gap"] = r.gap;
  j["quad_err"] = r.quad_err;
  j["baseline_u"] = r.baseline_u;
  j["baseline_rearranged"] = r.baseline_rearranged;
  j["normalized_gap"] = r.normalized_gap();
  j["holds"] = r.holds;
  j["guaranteed"] = r.guaranteed;
  j["integrand_certified"] = r.certificate.ok();
  if (r.conditions) j["conditions"] = to_json(*r.conditions);
  j["rearranged"] = format_pl(r.rearranged);
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const ZeroSetReport& z) {
  Json j{{"verdict", std::string(to_string(z.verdict))}, {"zeros", z.zeros}};
  if (z.verdict == ZeroVerdict::Periodic) j["period"] = z.period;
  return j;
}

inline Json to_json(const ConvergenceReport& r) {
  Json j;
  j["I_u"] = r.I_u;
  j["I_u_err"] = r.I_u_error;
  j["total_variation"] = r.total_variation;
  j["weight_hypothesis"] = r.weight_hypothesis;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"h", row.h},
                        {"l1", row.l1},
                        {"l1_derivative", row.l1_derivative},
                        {"I", row.I},
                        {"I_err", row.I_error},
                        {"abs_diff", row.abs_diff},
                        {"rel_diff", row.rel_diff},
                        {"steep_measure", row.steep_measure},
                        {"sum_abs_beta", row.sum_abs_beta},
                        {"phi_image", row.phi_image},
                        {"P1", row.p1},
                        {"P2", row.p2},
                        {"P3", row.p3},
                        {"min_phi_slope", row.min_phi_slope},
                        {"phi_slope_ok", row.phi_slope_ok},
                        {"phi_integral_ok", row.phi_integral_ok}});
  }
  j["rows"] = std::move(rows);
  return j;
}

inline Json to_json(const SweepReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  const SweepConfig& c = r.config;
  j["config"] = Json{{"seed", c.seed},
                     {"count", c.count},
                     {"min_breakpoints", c.min_breakpoints},
                     {"max_breakpoints", c.max_breakpoints},
                     {"value_max", c.value_max},
                     {"plateau_probability", c.plateau_probability},
                     {"mode", std::string(to_string(c.mode))},
                     {"family", std::string(to_string(c.family))},
                     {"tol", c.tol},
                     {"quad_tol", c.quad_tol}};
  j["summary"] = Json{{"instances", static_cast<int>(r.results.size())},
                      {"failures", r.failures},
                      {"errors", r.errors},
                      {"constructed", r.constructed},
                      {"confirmations", r.confirmations},
                      {"min_gap", r.min_gap},
                      {"max_quad_err", r.max_quad_err},
                      {"ok", r.ok()}};
  Json items = Json::array();
  for (const auto& x : r.results) {
    Json e{{"index", x.index}};
    if (x.error) {
      e["error"] = *x.error;
    } else {
      e["weight"] = x.weight;
      e["weight_family"] = x.weight_family;
      e["integrand"] = x.integrand;
      e["integrand_family"] = x.integrand_family;
      if (x.construction) e["construction"] = *x.construction;
      e["u"] = x.u;
      e["I_u"] = x.I_u;
      e["I_rearranged"] = x.I_rearranged;
      e["gap"] = x.gap;
      e["quad_err"] = x.quad_err;
      e["guaranteed"] = x.guaranteed;
      e["failure"] = x.failure;
      if (x.construction) e["confirmed"] = x.confirmed;
    }
    items.push_back(std::move(e));
  }
  j["instances"] = std::move(items);
  return j;
}

// ---- output formats ---------------------------------------------------------

enum class OutputFormat { Json, Csv, Human };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "human") return OutputFormat::Human;
  throw Error(ErrorCode::InvalidArgument, "format must be json, csv or human");
}

/// Leaf values of a JSON document as (path, text) pairs in document order.
/// Numbers keep their JSON spelling so every format carries the same digits.
inline void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    if (j.empty()) out.emplace_back(prefix, "");
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_report(const Json& j, OutputFormat fmt, std::ostream& os) {
  if (fmt == OutputFormat::Json) {
    os << j.dump(2) << '\n';
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  if (fmt == OutputFormat::Csv) {
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << csv_escape(k) << ',' << csv_escape(v) << '\n';
  } else {
    for (const auto& [k, v] : rows) os << k << ": " << v << '\n';
  }
}

}  // namespace rearr
