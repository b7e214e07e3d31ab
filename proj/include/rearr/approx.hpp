#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/functional.hpp"
#include "rearr/integrand.hpp"
#include "rearr/numeric.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/weight.hpp"
#include "rearr/weightlab.hpp"

namespace rearr {

enum class Side { Left, Right };

inline std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

/// One component (b-, b+) of the steep cover.
struct SteepRun {
  double b_minus = 0.0;
  double b_plus = 0.0;
  double alpha = 0.0;  ///< b+ - b-
  double beta = 0.0;   ///< u(b+) - u(b-)
};

/// One threshold of the pipeline on a half interval, in local coordinates
/// z in [0, 1] (for the left side z = -x).
struct ApproxStage {
  double h = 0.0;
  Side side = Side::Right;
  std::vector<SteepRun> runs;
  PiecewiseLinear u_local = PiecewiseLinear::constant(0.0, 0.0, 1.0);
  PiecewiseLinear v_h = PiecewiseLinear::constant(0.0, 0.0, 1.0);
  PiecewiseLinear phi = PiecewiseLinear({0.0, 1.0}, {0.0, 1.0});
  /// phi' on each segment of v_h, as assigned (not recomputed from nodes).
  std::vector<double> phi_slopes;
  PiecewiseLinear u_h = PiecewiseLinear::constant(0.0, 0.0, 1.0);

  double steep_measure() const {
    double acc = 0.0;
    for (const auto& r : runs) acc += r.alpha;
    return acc;
  }
  double sum_abs_beta() const {
    double acc = 0.0;
    for (const auto& r : runs) acc += std::abs(r.beta);
    return acc;
  }
  /// |phi(A_h)| = sum max(|beta|, alpha).
  double phi_image_measure() const {
    double acc = 0.0;
    for (const auto& r : runs) acc += std::max(std::abs(r.beta), r.alpha);
    return acc;
  }
  /// Integral of |phi'| over [0, 1] from the assigned slopes.
  double phi_integral() const {
    std::vector<double> parts;
    const auto zs = v_h.xs();
    for (std::size_t j = 0; j < phi_slopes.size(); ++j) parts.push_back(phi_slopes[j] * (zs[j + 1] - zs[j]));
    return pairwise_sum(parts);
  }
  double min_phi_slope() const {
    return phi_slopes.empty() ? 1.0 : *std::min_element(phi_slopes.begin(), phi_slopes.end());
  }
};

namespace detail {

inline PiecewiseLinear local_half(const PiecewiseLinear& u, Side side) {
  u.require_unit_domain();
  const PiecewiseLinear base = side == Side::Right ? u : u.reflected();
  return base.restrict_to(0.0, 1.0);
}

}  // namespace detail

/// Replaces every maximal run of segments with |u'| > h by its chord (v_h),
/// stretches those runs by phi' = max(|beta| / alpha, 1) (phi(0) = 0,
/// phi' = 1 elsewhere) and returns u_h = v_h o phi^{-1} on [0, 1].
inline ApproxStage lipschitz_approximate(const PiecewiseLinear& u, double h, Side side) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  u.require_nonnegative();
  ApproxStage st;
  st.h = h;
  st.side = side;
  st.u_local = detail::local_half(u, side);
  const PiecewiseLinear& r = st.u_local;
  const auto xs = r.xs();
  const auto ys = r.ys();
  const std::size_t nseg = r.segment_count();

  std::vector<bool> steep(nseg);
  bool all = true, any = false;
  for (std::size_t i = 0; i < nseg; ++i) {
    steep[i] = std::abs(r.slope(i)) > h;
    all = all && steep[i];
    any = any || steep[i];
  }
  if (all) throw Error(ErrorCode::ThresholdTooSmall, "every segment is steeper than the threshold");
  if (!any) {
    st.v_h = r;
    st.phi = PiecewiseLinear({0.0, 1.0}, {0.0, 1.0});
    st.phi_slopes.assign(nseg, 1.0);
    st.u_h = r;
    return st;
  }

  // v_h: drop breakpoints interior to a run
  std::vector<double> vx, vy;
  std::vector<bool> vsteep;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const bool interior = j > 0 && j + 1 < r.size() && steep[j - 1] && steep[j];
    if (interior) continue;
    if (!vx.empty()) vsteep.push_back(steep[j - 1]);
    vx.push_back(xs[j]);
    vy.push_back(ys[j]);
  }
  st.v_h = PiecewiseLinear(vx, vy);
  for (std::size_t j = 0; j + 1 < vx.size(); ++j) {
    if (vsteep[j]) st.runs.push_back({vx[j], vx[j + 1], vx[j + 1] - vx[j], vy[j + 1] - vy[j]});
  }

  // phi
  std::vector<double> px{0.0}, py{0.0};
  for (std::size_t j = 0; j + 1 < vx.size(); ++j) {
    const double len = vx[j + 1] - vx[j];
    const double slope = vsteep[j] ? std::max(std::abs(vy[j + 1] - vy[j]) / len, 1.0) : 1.0;
    st.phi_slopes.push_back(slope);
    px.push_back(vx[j + 1]);
    py.push_back(py.back() + slope * len);
  }
  st.phi = PiecewiseLinear(px, py);

  // u_h = v_h o phi^{-1} restricted to [0, 1]
  std::vector<double> hx, hy;
  for (std::size_t j = 0; j < vx.size(); ++j) {
    if (py[j] >= 1.0) {
      const std::size_t k = j - 1;
      const double z = vx[k] + (1.0 - py[k]) / st.phi_slopes[k];
      const double lam = (z - vx[k]) / (vx[j] - vx[k]);
      const double val = vy[k] + lam * (vy[j] - vy[k]);
      if (hx.back() < 1.0) {
        hx.push_back(1.0);
        hy.push_back(py[j] == 1.0 ? vy[j] : val);
      }
      break;
    }
    hx.push_back(py[j]);
    hy.push_back(vy[j]);
  }
  if (hx.back() < 1.0) hx.back() = 1.0;  // phi(1) rounded just below 1
  st.u_h = PiecewiseLinear(hx, hy);
  return st;
}

/// Left and right stages glued at 0 into functions on [-1, 1].
struct FullApprox {
  double h = 0.0;
  ApproxStage left;
  ApproxStage right;
  PiecewiseLinear v_h = PiecewiseLinear::constant(0.0);
  PiecewiseLinear u_h = PiecewiseLinear::constant(0.0);
};

namespace detail {

inline PiecewiseLinear glue(const PiecewiseLinear& left_local, const PiecewiseLinear& right) {
  const PiecewiseLinear left = left_local.reflected();
  std::vector<double> xs(left.xs().begin(), left.xs().end() - 1);
  std::vector<double> ys(left.ys().begin(), left.ys().end() - 1);
  xs.insert(xs.end(), right.xs().begin(), right.xs().end());
  ys.insert(ys.end(), right.ys().begin(), right.ys().end());
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

}  // namespace detail

inline FullApprox lipschitz_approximate_full(const PiecewiseLinear& u, double h) {
  FullApprox out{h, lipschitz_approximate(u, h, Side::Left), lipschitz_approximate(u, h, Side::Right),
                 PiecewiseLinear::constant(0.0), PiecewiseLinear::constant(0.0)};
  out.v_h = detail::glue(out.left.v_h, out.right.v_h);
  out.u_h = detail::glue(out.left.u_h, out.right.u_h);
  return out;
}

/// Terms of the derivative error bound on one side: P1 over [0,1] minus
/// phi(A_h), P2 and P3 the integrals of |u_h'| and |u'| over [0,1] cap phi(A_h).
struct ErrorSplit {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
};

inline ErrorSplit derivative_error_split(const ApproxStage& st) {
  std::vector<Interval> mask;
  for (const auto& r : st.runs) {
    const double lo = st.phi(r.b_minus), hi = st.phi(r.b_plus);
    if (lo < 1.0) mask.push_back({lo, std::min(hi, 1.0)});
  }
  std::vector<double> pts = merged_breakpoints(st.u_h, st.u_local);
  for (const auto& m : mask) {
    pts.push_back(m.lo);
    pts.push_back(m.hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> a1, a2, a3;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = pts[i + 1] - pts[i];
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const double dh = st.u_h.slope(st.u_h.segment_of(mid));
    const double du = st.u_local.slope(st.u_local.segment_of(mid));
    const bool inside = std::any_of(mask.begin(), mask.end(), [&](const Interval& m) { return mid > m.lo && mid < m.hi; });
    if (inside) {
      a2.push_back(std::abs(dh) * len);
      a3.push_back(std::abs(du) * len);
    } else {
      a1.push_back(std::abs(dh - du) * len);
    }
  }
  return {pairwise_sum(a1), pairwise_sum(a2), pairwise_sum(a3)};
}

struct ConvergenceRow {
  double h = 0.0;
  double l1 = 0.0;             ///< ||u_h - u||_L1
  double l1_derivative = 0.0;  ///< ||u_h' - u'||_L1
  double I = 0.0;
  double I_error = 0.0;
  double abs_diff = 0.0;  ///< |I(u_h) - I(u)|
  double rel_diff = 0.0;
  double steep_measure = 0.0;  ///< |A_h|, both sides
  double sum_abs_beta = 0.0;
  double phi_image = 0.0;
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  double min_phi_slope = 1.0;
  double phi_integral_left = 0.0;
  double phi_integral_right = 0.0;
  double sum_abs_beta_left = 0.0;
  double sum_abs_beta_right = 0.0;
  bool phi_slope_ok = true;     ///< phi' >= 1 on every segment
  bool phi_integral_ok = true;  ///< int |phi'| <= 1 + sum |beta| per side
};

struct ConvergenceReport {
  double I_u = 0.0;
  double I_u_error = 0.0;
  double total_variation = 0.0;
  /// a(., v) increasing on [-1, 0] and decreasing on [0, 1] over range(u).
  bool weight_hypothesis = false;
  std::vector<ConvergenceRow> rows;
};

/// Rounding allowance for the phi integral bound, relative to 1 + sum |beta|.
inline constexpr double kPhiIntegralSlack = 1e-12;

inline ConvergenceReport convergence_report(const Integrand& F, const Weight& a, const PiecewiseLinear& u,
                                            const std::vector<double>& ladder, double tol = kDefaultQuadTol) {
  ConvergenceReport rep;
  const FunctionalValue base = evaluate_functional(F, a, u, tol);
  rep.I_u = base.value;
  rep.I_u_error = base.error;
  rep.total_variation = pl_metrics(u).total_variation;
  rep.weight_hypothesis = peaked_at_origin(a, {u.min_value(), u.max_value()});
  const PiecewiseLinear u_split = u.with_breakpoint(0.0);
  for (double h : ladder) {
    const FullApprox fa = lipschitz_approximate_full(u, h);
    ConvergenceRow row;
    row.h = h;
    row.l1 = l1_distance(fa.u_h, u_split);
    row.l1_derivative = l1_derivative_distance(fa.u_h, u_split);
    const FunctionalValue val = evaluate_functional(F, a, fa.u_h, tol);
    row.I = val.value;
    row.I_error = val.error;
    row.abs_diff = std::abs(val.value - base.value);
    row.rel_diff = base.value != 0.0 ? row.abs_diff / std::abs(base.value) : row.abs_diff;
    for (const ApproxStage* st : {&fa.left, &fa.right}) {
      row.steep_measure += st->steep_measure();
      row.sum_abs_beta += st->sum_abs_beta();
      row.phi_image += st->phi_image_measure();
      const ErrorSplit sp = derivative_error_split(*st);
      row.p1 += sp.p1;
      row.p2 += sp.p2;
      row.p3 += sp.p3;
      row.min_phi_slope = std::min(row.min_phi_slope, st->min_phi_slope());
      const double bound = 1.0 + st->sum_abs_beta();
      if (!(st->phi_integral() <= bound * (1.0 + kPhiIntegralSlack))) row.phi_integral_ok = false;
      if (st->min_phi_slope() < 1.0) row.phi_slope_ok = false;
    }
    row.phi_integral_left = fa.left.phi_integral();
    row.phi_integral_right = fa.right.phi_integral();
    row.sum_abs_beta_left = fa.left.sum_abs_beta();
    row.sum_abs_beta_right = fa.right.sum_abs_beta();
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace rearr
