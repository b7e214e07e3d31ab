#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/integrand.hpp"
#include "rearr/numeric.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/quadrature.hpp"
#include "rearr/rearrangement.hpp"
#include "rearr/weight.hpp"
#include "rearr/weightlab.hpp"

namespace rearr {

inline constexpr double kDefaultQuadTol = 1e-10;
/// Slack added to the quadrature error when judging a gap.
inline constexpr double kGapSlack = 1e-9;

struct FunctionalValue {
  double value = 0.0;     ///< integral of F(u, a |u'|)
  double error = 0.0;     ///< summed |K15 - G7| estimates
  double baseline = 0.0;  ///< integral of F(u, 0)
  double baseline_error = 0.0;

  /// Value with F(., 0) subtracted, i.e. for the integrand F(v, p) - F(v, 0).
  double normalized() const { return value - baseline; }
};

namespace detail {

/// Sub-intervals of segment i of u on which x -> a(x, u(x)) has no kink
/// coming from the weight's declared x- or v-nodes.
inline std::vector<double> segment_cuts(const PiecewiseLinear& u, std::size_t i, const Weight& a) {
  const double x0 = u.xs()[i], x1 = u.xs()[i + 1];
  const double y0 = u.ys()[i], y1 = u.ys()[i + 1];
  std::vector<double> cuts{x0, x1};
  for (double xn : a.x_nodes()) {
    if (xn > x0 && xn < x1) cuts.push_back(xn);
  }
  if (y0 != y1) {
    const double lo = std::min(y0, y1), hi = std::max(y0, y1);
    for (double w : a.v_nodes()) {
      if (w > lo && w < hi) {
        const double x = x0 + (w - y0) * (x1 - x0) / (y1 - y0);
        if (x > x0 && x < x1) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace detail

/// I(a, u) = int F(u, a(x, u) |u'|) dx, integrated segment by segment with
/// adaptive Gauss-Kronrod; segments are further cut at the weight's nodes.
inline FunctionalValue evaluate_functional(const Integrand& F, const Weight& a, const PiecewiseLinear& u,
                                           double tol = kDefaultQuadTol) {
  u.require_nonnegative();
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const double total = u.upper() - u.lower();
  std::vector<double> values, errors, base_values, base_errors;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double x0 = u.xs()[i];
    const double y0 = u.ys()[i];
    const double slope = u.slope(i);
    const double grad = std::abs(slope);
    const auto cuts = detail::segment_cuts(u, i, a);
    auto value_at = [&](double x) { return y0 + slope * (x - x0); };
    auto f = [&](double x) {
      const double v = value_at(x);
      return F(v, a(x, v) * grad);
    };
    auto g = [&](double x) { return F(value_at(x), 0.0); };
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double share = tol * (cuts[c + 1] - cuts[c]) / total;
      const QuadResult r = integrate(f, cuts[c], cuts[c + 1], share, tol);
      values.push_back(r.value);
      errors.push_back(r.error);
      const QuadResult b = integrate(g, cuts[c], cuts[c + 1], share, tol);
      base_values.push_back(b.value);
      base_errors.push_back(b.error);
    }
  }
  return FunctionalValue{pairwise_sum(values), pairwise_sum(errors), pairwise_sum(base_values),
                         pairwise_sum(base_errors)};
}

enum class RearrangeMode { Monotone, Symmetric };

inline std::string_view to_string(RearrangeMode m) {
  return m == RearrangeMode::Monotone ? "monotone" : "symmetric";
}

inline RearrangeMode parse_mode(std::string_view s) {
  if (s == "monotone") return RearrangeMode::Monotone;
  if (s == "symmetric") return RearrangeMode::Symmetric;
  throw Error(ErrorCode::InvalidArgument, "mode must be monotone or symmetric");
}

inline PiecewiseLinear rearrange(const PiecewiseLinear& u, RearrangeMode m) {
  return m == RearrangeMode::Monotone ? monotone_rearrange(u) : symmetric_rearrange(u);
}

struct VerifyOptions {
  double tol = kDefaultQuadTol;
  bool check_conditions = true;
  CheckResolution resolution{};
};

struct VerifyReport {
  RearrangeMode mode = RearrangeMode::Monotone;
  PiecewiseLinear rearranged = PiecewiseLinear::constant(0.0);
  double I_u = 0.0;
  double I_rearranged = 0.0;
  double gap = 0.0;  ///< I_u - I_rearranged
  double quad_err = 0.0;
  double baseline_u = 0.0;
  double baseline_rearranged = 0.0;
  std::optional<ConditionReport> conditions;
  IntegrandCertificate certificate;
  /// Weight passes the condition for the mode and F passes its certificate.
  bool guaranteed = false;
  /// gap >= -(quad_err + slack)
  bool holds = false;
  std::vector<std::string> warnings;

  double normalized_gap() const { return (I_u - baseline_u) - (I_rearranged - baseline_rearranged); }
};

/// Both sides of the rearrangement inequality for u, with the weight's
/// conditions checked on the value range of u.
inline VerifyReport verify_rearrangement(const Integrand& F, const Weight& a, const PiecewiseLinear& u,
                                         RearrangeMode mode, const VerifyOptions& opts = {}) {
  VerifyReport rep;
  rep.mode = mode;
  rep.rearranged = rearrange(u, mode);
  const FunctionalValue lhs = evaluate_functional(F, a, u, opts.tol);
  const FunctionalValue rhs = evaluate_functional(F, a, rep.rearranged, opts.tol);
  rep.I_u = lhs.value;
  rep.I_rearranged = rhs.value;
  rep.gap = lhs.value - rhs.value;
  rep.quad_err = lhs.error + rhs.error;
  rep.baseline_u = lhs.baseline;
  rep.baseline_rearranged = rhs.baseline;
  rep.holds = rep.gap >= -(rep.quad_err + kGapSlack);

  const Interval range{u.min_value(), u.max_value()};
  rep.certificate = F.certify(range);
  if (!rep.certificate.ok()) rep.warnings.push_back("integrand certificate failed: inequality not guaranteed");

  bool cond_ok = false;
  if (opts.check_conditions) {
    CheckResolution res = opts.resolution;
    if (!res.v_range) res.v_range = range;
    rep.conditions =
        mode == RearrangeMode::Monotone ? check_admissible(a, res) : check_symmetric_condition(a, res);
    cond_ok = mode == RearrangeMode::Monotone ? rep.conditions->admissible() : rep.conditions->cond_sym;
  }
  bool boundary_ok = true;
  if (mode == RearrangeMode::Symmetric) {
    const double left = u.ys().front(), right = u.ys().back();
    if (left != right) {
      boundary_ok = false;
      rep.warnings.push_back("u(-1) != u(1): symmetric inequality expects equal boundary values");
    }
    if (u.min_value() < std::min(left, right)) {
      boundary_ok = false;
      rep.warnings.push_back("u dips below its boundary value: symmetric inequality not guaranteed");
    }
  }
  rep.guaranteed = cond_ok && rep.certificate.ok() && boundary_ok;
  return rep;
}

}  // namespace rearr
