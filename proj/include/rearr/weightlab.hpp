#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/rearrangement.hpp"
#include "rearr/weight.hpp"

namespace rearr {

/// Tolerance for condition verdicts.
inline constexpr double kConditionTol = 1e-9;

struct CheckResolution {
  int x_nodes = kDefaultCheckXNodes;  ///< sampled mode only; grids use their own nodes
  int v_samples = kDefaultCheckVSamples;
  std::optional<Interval> v_range;  ///< defaults to the weight's own range
};

struct PointViolation {
  double x = 0.0;
  double v = 0.0;
  double magnitude = 0.0;
};

struct TripleViolation {
  double s = 0.0;
  double t = 0.0;
  double v = 0.0;
  double magnitude = 0.0;
};

/// Verdicts of the evenness, chain (a(s)+a(t) >= a(1-t+s)) and symmetric
/// (a(s)+a(t) >= a((s-t)/2)+a((t-s)/2)) conditions. A worst violation has
/// positive magnitude exactly when the corresponding flag is false.
struct ConditionReport {
  bool even = true;
  PointViolation even_worst;
  bool cond_c = true;
  TripleViolation cond_c_worst;
  bool cond_c_checked = false;
  bool cond_sym = true;
  TripleViolation cond_sym_worst;
  bool cond_sym_checked = false;
  bool convex = true;  ///< discrete convexity in x (symmetric check only)
  bool characterization_agrees = true;
  std::string method;
  int x_resolution = 0;
  int v_resolution = 0;

  bool admissible() const { return even && cond_c; }
};

namespace detail {

struct CheckGrid {
  std::vector<double> xs;
  std::vector<double> vs;
  std::vector<std::vector<double>> values;  ///< values[j][i] = a(xs[i], vs[j])
  bool exact = false;
};

inline std::vector<double> uniform_nodes(int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[i] = (i == n - 1) ? 1.0 : -1.0 + 2.0 * i / (n - 1);
  return xs;
}

inline std::vector<double> uniform_levels(Interval r, int n) {
  std::vector<double> vs;
  if (n <= 1 || r.hi == r.lo) return {r.lo};
  for (int j = 0; j < n; ++j) vs.push_back(j == n - 1 ? r.hi : r.lo + (r.hi - r.lo) * j / (n - 1));
  return vs;
}

inline CheckGrid build_check_grid(const Weight& a, const CheckResolution& res) {
  if (res.x_nodes < 3 || res.v_samples < 1) {
    throw Error(ErrorCode::InvalidArgument, "check resolution needs at least 3 x-nodes");
  }
  CheckGrid g;
  const Interval vr = res.v_range.value_or(a.v_range());
  if (a.is_grid()) {
    const int k = a.grid_k();
    g.xs = uniform_nodes(k + 1);
    g.exact = true;
    if (const GridTable* t = a.table(); t != nullptr) {
      // Linear blending in v preserves every condition, so the stored rows
      // inside the range plus the two range ends cover all levels exactly.
      g.vs.push_back(vr.lo);
      for (double v : t->v_samples) {
        if (v > vr.lo && v < vr.hi) g.vs.push_back(v);
      }
      if (vr.hi > vr.lo) g.vs.push_back(vr.hi);
    } else {
      g.vs = uniform_levels(vr, res.v_samples);
    }
    for (double v : g.vs) g.values.push_back(a.grid_node_values(v));
  } else {
    if (res.x_nodes % 2 == 0) throw Error(ErrorCode::InvalidArgument, "x-node count must be odd");
    g.xs = uniform_nodes(res.x_nodes);
    g.vs = uniform_levels(vr, res.v_samples);
    for (double v : g.vs) {
      std::vector<double> row(g.xs.size());
      for (std::size_t i = 0; i < g.xs.size(); ++i) row[i] = a(g.xs[i], v);
      g.values.push_back(std::move(row));
    }
  }
  for (std::size_t j = 0; j < g.vs.size(); ++j) {
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
      if (!(g.values[j][i] >= 0.0)) {
        throw Error(ErrorCode::NegativeWeight, "weight negative at x = " + std::to_string(g.xs[i]) +
                                                   ", v = " + std::to_string(g.vs[j]));
      }
    }
  }
  return g;
}

inline void check_evenness(const CheckGrid& g, ConditionReport& rep) {
  const std::size_t n = g.xs.size();
  for (std::size_t j = 0; j < g.vs.size(); ++j) {
    const auto& row = g.values[j];
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double diff = std::abs(row[i] - row[n - 1 - i]);
      if (diff > kConditionTol && diff > rep.even_worst.magnitude) {
        rep.even = false;
        rep.even_worst = {g.xs[i], g.vs[j], diff};
      }
    }
  }
}

}  // namespace detail

/// Evenness and a(s, v) + a(t, v) >= a(1 - t + s, v) for s <= t. On the
/// uniform node grid 1 - t + s is again a node, so no interpolation is
/// needed; for grid-backed weights the node check is exact.
inline ConditionReport check_admissible(const Weight& a, const CheckResolution& res = {}) {
  const detail::CheckGrid g = detail::build_check_grid(a, res);
  ConditionReport rep;
  rep.method = g.exact ? "exact-node" : "grid-sampled";
  rep.x_resolution = static_cast<int>(g.xs.size());
  rep.v_resolution = static_cast<int>(g.vs.size());
  rep.cond_c_checked = true;
  detail::check_evenness(g, rep);

  const std::size_t n = g.xs.size();
  for (std::size_t jv = 0; jv < g.vs.size(); ++jv) {
    const auto& row = g.values[jv];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const std::size_t target = n - 1 - j + i;  // index of 1 - t + s
        const double deficit = row[target] - row[i] - row[j];
        if (deficit > kConditionTol && deficit > rep.cond_c_worst.magnitude) {
          rep.cond_c = false;
          rep.cond_c_worst = {g.xs[i], g.xs[j], g.vs[jv], deficit};
        }
      }
    }
  }
  return rep;
}

/// a(s) + a(t) >= a((s-t)/2) + a((t-s)/2) on all node pairs, together with the
/// equivalent "even and convex in x" characterization. The reported verdict
/// requires both routes to agree.
inline ConditionReport check_symmetric_condition(const Weight& a, const CheckResolution& res = {}) {
  const detail::CheckGrid g = detail::build_check_grid(a, res);
  ConditionReport rep;
  rep.method = g.exact ? "exact-node" : "grid-sampled";
  rep.x_resolution = static_cast<int>(g.xs.size());
  rep.v_resolution = static_cast<int>(g.vs.size());
  rep.cond_sym_checked = true;
  detail::check_evenness(g, rep);

  const std::size_t n = g.xs.size();
  const double h = 2.0 / static_cast<double>(n - 1);
  bool sym_ok = true;
  for (std::size_t jv = 0; jv < g.vs.size(); ++jv) {
    const double v = g.vs[jv];
    const auto& row = g.values[jv];
    // half-differences (s - t)/2 = (i - j) h / 2
    std::vector<double> half(2 * n - 1);
    for (std::size_t d = 0; d < half.size(); ++d) {
      const double offset = static_cast<double>(d) - static_cast<double>(n - 1);
      half[d] = a(0.5 * offset * h, v);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double rhs = half[i + (n - 1) - j] + half[j + (n - 1) - i];
        const double deficit = rhs - row[i] - row[j];
        if (deficit > kConditionTol && deficit > rep.cond_sym_worst.magnitude) {
          sym_ok = false;
          rep.cond_sym_worst = {g.xs[i], g.xs[j], v, deficit};
        }
      }
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (row[i - 1] - 2.0 * row[i] + row[i + 1] < -kConditionTol) rep.convex = false;
    }
  }
  const bool characterization = rep.even && rep.convex;
  rep.characterization_agrees = characterization == sym_ok;
  rep.cond_sym = sym_ok && rep.characterization_agrees;
  if (!rep.cond_sym && rep.cond_sym_worst.magnitude == 0.0) {
    // Disagreement without a sampled witness: report the characterization failure.
    rep.cond_sym_worst.magnitude = std::max(rep.even_worst.magnitude, kConditionTol);
  }
  return rep;
}

/// Piecewise linear interpolant of a(., v) at the nodes -1 + 2i/k for every v.
inline Weight interpolate_weight(const Weight& a, int k) {
  if (k < 2 || k % 2 != 0) throw Error(ErrorCode::InvalidArgument, "k must be even and >= 2");
  std::vector<double> nodes(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) nodes[i] = (i == k) ? 1.0 : -1.0 + 2.0 * i / k;
  const std::string desc = "interp" + std::to_string(k) + "(" + a.description() + ")";
  if (const GridTable* t = a.table(); t != nullptr) {
    GridTable out{k, t->v_samples, {}};
    for (const auto& row : t->rows) {
      std::vector<double> r(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) r[i] = GridTable::interpolate_nodes(row, t->k, nodes[i]);
      out.rows.push_back(std::move(r));
    }
    Weight w = Weight::from_grid(std::move(out), desc);
    return w.with_v_range(a.v_range());
  }
  auto node_fn = [a, nodes](double v) {
    std::vector<double> r(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) r[i] = a(nodes[i], v);
    return r;
  };
  return Weight::from_node_function(k, node_fn, a.v_range(), desc, a.v_nodes());
}

enum class CombineMode { Max, Sum };

inline Weight combine_weights(const Weight& a1, const Weight& a2, CombineMode mode) {
  const Interval r1 = a1.v_range();
  const Interval r2 = a2.v_range();
  const Interval r{std::max(r1.lo, r2.lo), std::min(r1.hi, r2.hi)};
  if (r.hi < r.lo) throw Error(ErrorCode::InvalidArgument, "weights have disjoint value ranges");
  const bool is_max = mode == CombineMode::Max;
  const std::string desc = std::string(is_max ? "max(" : "sum(") + a1.description() + ", " + a2.description() + ")";

  const GridTable* t1 = a1.table();
  const GridTable* t2 = a2.table();
  if (!is_max && t1 && t2 && t1->k == t2->k && t1->v_samples == t2->v_samples) {
    GridTable out{t1->k, t1->v_samples, t1->rows};
    for (std::size_t j = 0; j < out.rows.size(); ++j) {
      for (std::size_t i = 0; i < out.rows[j].size(); ++i) out.rows[j][i] += t2->rows[j][i];
    }
    return Weight::from_grid(std::move(out), desc).with_v_range(r);
  }

  std::vector<double> xn = a1.x_nodes();
  xn.insert(xn.end(), a2.x_nodes().begin(), a2.x_nodes().end());
  std::sort(xn.begin(), xn.end());
  xn.erase(std::unique(xn.begin(), xn.end()), xn.end());
  std::vector<double> vn = a1.v_nodes();
  vn.insert(vn.end(), a2.v_nodes().begin(), a2.v_nodes().end());
  std::sort(vn.begin(), vn.end());
  vn.erase(std::unique(vn.begin(), vn.end()), vn.end());

  Weight::EvalFn fn;
  if (is_max) {
    fn = [a1, a2](double x, double v) { return std::max(a1(x, v), a2(x, v)); };
  } else {
    fn = [a1, a2](double x, double v) { return a1(x, v) + a2(x, v); };
  }
  return Weight::from_function(std::move(fn), r, desc, WeightKind::Combined, std::move(xn), std::move(vn));
}

/// Result of the alternating chain bound. `rhs` uses the point
/// 1 - sum (-1)^k t_k (even n) or -sum (-1)^k t_k (odd n); `rhs_even` the
/// mirrored point available for even weights.
struct ChainBound {
  double lhs = 0.0;
  double point = 0.0;
  double rhs = 0.0;
  double point_even = 0.0;
  double rhs_even = 0.0;
  bool point_outside_domain = false;
  bool holds = true;
};

inline ChainBound chain_bound_check(const Weight& a, double v, std::span<const double> ts) {
  if (ts.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one point");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < -1.0 || ts[i] > 1.0) throw Error(ErrorCode::InvalidArgument, "points must lie in [-1, 1]");
    if (i > 0 && ts[i] < ts[i - 1]) throw Error(ErrorCode::InvalidArgument, "points must be sorted");
  }
  ChainBound out;
  double alternating = 0.0;
  std::vector<double> terms;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    alternating += (k % 2 == 0) ? -ts[k] : ts[k];
    terms.push_back(a(ts[k], v));
  }
  out.lhs = pairwise_sum(terms);
  const bool even = ts.size() % 2 == 0;
  out.point = even ? 1.0 - alternating : -alternating;
  out.point_even = even ? -1.0 + alternating : alternating;
  // For sorted points inside [-1, 1] both alternating points stay inside;
  // clamp one-ulp excursions and flag anything larger.
  auto settle = [&](double& p) {
    if (p < -1.0 - 1e-12 || p > 1.0 + 1e-12) {
      out.point_outside_domain = true;
      return false;
    }
    p = std::clamp(p, -1.0, 1.0);
    return true;
  };
  out.holds = true;
  if (settle(out.point)) {
    out.rhs = a(out.point, v);
    out.holds = out.holds && out.lhs >= out.rhs - kConditionTol;
  }
  if (settle(out.point_even)) {
    out.rhs_even = a(out.point_even, v);
    out.holds = out.holds && out.lhs >= out.rhs_even - kConditionTol;
  }
  return out;
}

enum class ZeroVerdict { NoZeros, AllZero, Periodic, Violates };

inline std::string_view to_string(ZeroVerdict z) {
  switch (z) {
    case ZeroVerdict::NoZeros: return "no-zeros";
    case ZeroVerdict::AllZero: return "all-zero";
    case ZeroVerdict::Periodic: return "periodic";
    case ZeroVerdict::Violates: return "violates";
  }
  return "?";
}

struct ZeroSetReport {
  std::vector<double> zeros;  ///< centres of the zero clusters found on the scan grid
  ZeroVerdict verdict = ZeroVerdict::NoZeros;
  double period = 0.0;
  double x0 = 0.0;  ///< leftmost zero
};

/// Zero set of a(., v) on a uniform scan grid. For weights satisfying the
/// chain condition the zeros to the right of the first zero x0 are either
/// all of [x0, 1] or an arithmetic progression ending at 1 whose step
/// divides 1 - x0.
inline ZeroSetReport zero_set_analysis(const Weight& a, double v, double tol, int scan_intervals = 2048) {
  if (scan_intervals < 2) throw Error(ErrorCode::InvalidArgument, "scan needs at least two intervals");
  const auto xs = detail::uniform_nodes(scan_intervals + 1);
  const double h = 2.0 / scan_intervals;
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = a(xs[i], v);
  std::vector<bool> zero(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    zero[i] = vals[i] <= tol;
    if (zero[i] || i == 0 || i + 1 == xs.size() || vals[i] > vals[i - 1] || vals[i] > vals[i + 1]) continue;
    // zero between scan nodes: ternary search around the discrete minimum
    double lo = xs[i - 1], hi = xs[i + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (a(m1, v) <= a(m2, v)) hi = m2;
      else lo = m1;
    }
    zero[i] = a(0.5 * (lo + hi), v) <= tol;
  }

  ZeroSetReport rep;
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < xs.size();) {
    if (!zero[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < xs.size() && zero[j + 1]) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }
  if (runs.empty()) return rep;
  for (auto [lo, hi] : runs) rep.zeros.push_back(0.5 * (xs[lo] + xs[hi]));
  rep.x0 = xs[runs.front().first];

  // identically zero from x0 on
  if (runs.size() == 1 && runs.front().second == xs.size() - 1) {
    rep.verdict = ZeroVerdict::AllZero;
    return rep;
  }
  // isolated zeros only (a run wider than two cells is a flat zero stretch)
  for (auto [lo, hi] : runs) {
    if (hi - lo > 2) {
      rep.verdict = ZeroVerdict::Violates;
      return rep;
    }
  }
  const double slack = 2.0 * h;
  if (std::abs(rep.zeros.back() - 1.0) > slack) {
    rep.verdict = ZeroVerdict::Violates;
    return rep;
  }
  if (rep.zeros.size() == 1) {
    // only x0 = 1 itself
    rep.verdict = ZeroVerdict::Periodic;
    rep.period = 0.0;
    return rep;
  }
  const double period = (rep.zeros.back() - rep.zeros.front()) / static_cast<double>(rep.zeros.size() - 1);
  for (std::size_t i = 1; i < rep.zeros.size(); ++i) {
    if (std::abs(rep.zeros[i] - rep.zeros[i - 1] - period) > slack) {
      rep.verdict = ZeroVerdict::Violates;
      return rep;
    }
  }
  const double ratio = (1.0 - rep.zeros.front()) / period;
  if (std::abs(ratio - std::round(ratio)) * period > slack) {
    rep.verdict = ZeroVerdict::Violates;
    return rep;
  }
  rep.verdict = ZeroVerdict::Periodic;
  rep.period = period;
  return rep;
}

namespace detail {

/// Sliding-window max - min over windows of `width` consecutive cells.
inline double max_window_oscillation(const std::vector<double>& vals, std::size_t width) {
  std::deque<std::size_t> qmax, qmin;
  double best = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    while (!qmax.empty() && vals[qmax.back()] <= vals[i]) qmax.pop_back();
    while (!qmin.empty() && vals[qmin.back()] >= vals[i]) qmin.pop_back();
    qmax.push_back(i);
    qmin.push_back(i);
    while (qmax.front() + width < i) qmax.pop_front();
    while (qmin.front() + width < i) qmin.pop_front();
    best = std::max(best, vals[qmax.front()] - vals[qmin.front()]);
  }
  return best;
}

/// {x : u(x) = v} as closed intervals (points are degenerate intervals).
inline std::vector<Interval> level_set(const PiecewiseLinear& u, double v) {
  const auto xs = u.xs();
  const auto ys = u.ys();
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double y0 = ys[i], y1 = ys[i + 1];
    if (y0 == v && y1 == v) {
      out.push_back({xs[i], xs[i + 1]});
    } else if (y0 == v) {
      out.push_back({xs[i], xs[i]});
    } else if (y1 == v) {
      out.push_back({xs[i + 1], xs[i + 1]});
    } else if ((y0 < v) != (y1 < v)) {
      const double x = xs[i] + (v - y0) * (xs[i + 1] - xs[i]) / (y1 - y0);
      out.push_back({x, x});
    }
  }
  return out;
}

}  // namespace detail

/// Ratio of the largest oscillation of a(., v) over windows of width 2/k to
/// the smallest weight within 2/k of the level set u^{-1}(v), maximized over
/// sampled levels v in the range of u where a(., v) does not vanish.
/// A vanishing denominator yields +infinity.
inline double compute_Dk(const Weight& a, const PiecewiseLinear& u, int k, int v_samples = 257) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  const int cells_per_window = std::max(1, (1024 + k - 1) / k);
  const int cells = k * cells_per_window;
  const auto xs = detail::uniform_nodes(cells + 1);
  const double reach = 2.0 / k;
  const auto levels = detail::uniform_levels({u.min_value(), u.max_value()}, v_samples);

  double sup = 0.0;
  bool any_nonzero = false;
  std::vector<double> vals(xs.size());
  for (double v : levels) {
    double peak = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      vals[i] = a(xs[i], v);
      peak = std::max(peak, vals[i]);
    }
    if (peak <= 0.0) continue;  // v outside U(a)
    any_nonzero = true;
    const double osc = detail::max_window_oscillation(vals, static_cast<std::size_t>(cells_per_window));

    double denom = std::numeric_limits<double>::infinity();
    for (const Interval& iv : detail::level_set(u, v)) {
      const double lo = std::max(-1.0, iv.lo - reach);
      const double hi = std::min(1.0, iv.hi + reach);
      denom = std::min({denom, a(lo, v), a(hi, v)});
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] >= lo && xs[i] <= hi) denom = std::min(denom, vals[i]);
      }
    }
    if (!std::isfinite(denom)) continue;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    sup = std::max(sup, osc / denom);
  }
  if (!any_nonzero) throw Error(ErrorCode::EmptyU, "weight vanishes at every sampled level of u");
  return sup;
}

/// Closed value set given as a finite union of closed intervals (points allowed).
struct ValueSet {
  std::vector<Interval> parts;

  double distance(double v) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& iv : parts) d = std::min(d, std::max({0.0, iv.lo - v, v - iv.hi}));
    return d;
  }
};

/// b_l(x, v) = a(x, v) * clamp(l * dist(v, W) - 1, 0, 1): zero on the
/// (1/l)-neighbourhood of W, equal to a outside its (2/l)-neighbourhood.
inline Weight zero_mollify(const Weight& a, const ValueSet& w, int ell) {
  if (ell < 1) throw Error(ErrorCode::InvalidArgument, "l must be >= 1");
  if (w.parts.empty()) return a;
  const double l = ell;
  std::vector<double> vn = a.v_nodes();
  for (const auto& iv : w.parts) {
    for (double off : {1.0 / l, 2.0 / l}) {
      vn.push_back(iv.lo - off);
      vn.push_back(iv.hi + off);
    }
    vn.push_back(iv.lo);
    vn.push_back(iv.hi);
  }
  std::sort(vn.begin(), vn.end());
  vn.erase(std::unique(vn.begin(), vn.end()), vn.end());
  auto fn = [a, w, l](double x, double v) {
    const double rho = std::clamp(l * w.distance(v) - 1.0, 0.0, 1.0);
    return rho == 0.0 ? 0.0 : a(x, v) * rho;
  };
  return Weight::from_function(fn, a.v_range(), "mollify" + std::to_string(ell) + "(" + a.description() + ")",
                               WeightKind::Mollified, a.x_nodes(), std::move(vn));
}

/// Discrete inf-convolution with |.|: out_i = min_j (t_j + |v_i - v_j|).
/// Two sweeps suffice because |.| is a path metric on the line.
inline std::vector<double> lipschitz_envelope(std::span<const double> values, std::span<const double> grid) {
  if (values.size() != grid.size() || values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "values and grid must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::InvalidArgument, "samples must be finite and nonnegative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid must be increasing");
  }
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::min(out[i], out[i - 1] + (grid[i] - grid[i - 1]));
  for (std::size_t i = out.size() - 1; i-- > 0;) out[i] = std::min(out[i], out[i + 1] + (grid[i + 1] - grid[i]));
  return out;
}

/// Lambda(x) = 1 - |x|, the even concave auxiliary weight.
inline Weight tent_weight(Interval v_range = {0.0, 1.0}) {
  GridTable t{2, {v_range.lo}, {{0.0, 1.0, 0.0}}};
  return Weight::from_grid(std::move(t), "1-abs(x)").with_v_range(v_range);
}

/// True if a(., v) is nondecreasing on [-1, 0] and nonincreasing on [0, 1]
/// for every sampled level in `vr`.
inline bool peaked_at_origin(const Weight& a, Interval vr, int x_nodes = 257, int v_samples = 33) {
  const auto xs = detail::uniform_nodes(x_nodes);
  for (double v : detail::uniform_levels(vr, v_samples)) {
    double prev = a(xs.front(), v);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double cur = a(xs[i], v);
      if (xs[i] <= 0.0 && cur < prev - kConditionTol) return false;
      if (xs[i] > 0.0 && cur > prev + kConditionTol) return false;
      prev = cur;
    }
  }
  return true;
}

}  // namespace rearr
