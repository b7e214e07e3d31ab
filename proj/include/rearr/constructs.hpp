#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/integrand.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/rearrangement.hpp"
#include "rearr/weight.hpp"

namespace rearr {

/// Resolution of the precondition grids (y or z samples x v samples).
inline constexpr int kPreconditionSamples = 101;
inline constexpr int kPreconditionLevels = 33;
/// Resolution of the grid maximization for the weight bound A.
inline constexpr int kBoundXNodes = 513;
inline constexpr int kBoundVSamples = 129;

enum class CounterexampleKind { Asymmetry, Nonconcavity, Nonconvexity };

struct CounterexampleSpec {
  double s = 0.0;
  double t = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double vbar = 0.0;
  /// Upper bound of the weight on [-1, 1] x range(u); computed when absent.
  std::optional<double> A;
  CounterexampleKind kind = CounterexampleKind::Nonconcavity;
};

struct Counterexample {
  PiecewiseLinear u = PiecewiseLinear::constant(0.0);
  /// Closed-form rearrangement (u* or u bar).
  PiecewiseLinear rearranged = PiecewiseLinear::constant(0.0);
  Integrand F = Integrand::power(1.0);
  double A = 0.0;
  double alpha_max = 0.0;  ///< nonconcavity only
  double gamma = 0.0;      ///< symmetric only
};

namespace detail {

inline PiecewiseLinear pl_from_points(std::vector<Knot> pts) {
  std::vector<Knot> clean;
  for (const Knot& k : pts) {
    if (!clean.empty() && k.x <= clean.back().x) continue;  // coincident corner
    clean.push_back(k);
  }
  return from_knots(clean);
}

inline double sample(double lo, double hi, int i, int n) {
  return n == 1 ? lo : (i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
}

[[noreturn]] inline void precondition_failed(const std::string& what) {
  throw Error(ErrorCode::PreconditionFailed, what);
}

}  // namespace detail

/// A = max a over [-1, 1] x [vlo, vhi]: exact node maximum for tables,
/// otherwise the grid maximum plus half the largest neighbour difference in
/// x and in v (the most a Lipschitz function can rise within half a cell).
inline double weight_bound(const Weight& a, Interval vr) {
  double best = 0.0;
  if (const GridTable* t = a.table(); t != nullptr) {
    std::vector<std::vector<double>> rows{t->node_values(vr.lo), t->node_values(vr.hi)};
    for (std::size_t j = 0; j < t->v_samples.size(); ++j) {
      if (t->v_samples[j] > vr.lo && t->v_samples[j] < vr.hi) rows.push_back(t->rows[j]);
    }
    for (const auto& r : rows) best = std::max(best, *std::max_element(r.begin(), r.end()));
    return best;
  }
  std::vector<double> prev_row, row(kBoundXNodes);
  double jump_x = 0.0, jump_v = 0.0;
  for (int j = 0; j < kBoundVSamples; ++j) {
    const double v = detail::sample(vr.lo, vr.hi, j, kBoundVSamples);
    for (int i = 0; i < kBoundXNodes; ++i) {
      row[i] = a(detail::sample(-1.0, 1.0, i, kBoundXNodes), v);
      best = std::max(best, row[i]);
      if (i > 0) jump_x = std::max(jump_x, std::abs(row[i] - row[i - 1]));
      if (!prev_row.empty()) jump_v = std::max(jump_v, std::abs(row[i] - prev_row[i]));
    }
    prev_row = row;
  }
  return best + 0.5 * (jump_x + jump_v);
}

/// Step-ramp function: vbar + eps left of xbar - eps, unit downward ramp,
/// vbar right of xbar. With F = p its rearrangement gap is the integral of
/// a(x, .) - a(-x, .) over the ramp, negative when a is larger on the mirror side.
inline Counterexample build_asymmetry_counterexample(const Weight& a, double xbar, double vbar, double eps) {
  if (!(eps > 0.0) || xbar - eps < -1.0 || xbar > 1.0 || vbar < 0.0) {
    throw Error(ErrorCode::InfeasibleSpec, "need eps > 0, xbar - eps >= -1, xbar <= 1, vbar >= 0");
  }
  for (int i = 0; i < kPreconditionSamples; ++i) {
    const double x = detail::sample(xbar - eps, xbar, i, kPreconditionSamples);
    for (int j = 0; j < kPreconditionLevels; ++j) {
      const double v = detail::sample(vbar, vbar + eps, j, kPreconditionLevels);
      if (!(a(x, v) < a(-x, v))) {
        detail::precondition_failed("a(x, v) < a(-x, v) fails at x = " + std::to_string(x) +
                                    ", v = " + std::to_string(v));
      }
    }
  }
  Counterexample out;
  out.u = detail::pl_from_points({{-1.0, vbar + eps}, {xbar - eps, vbar + eps}, {xbar, vbar}, {1.0, vbar}});
  out.rearranged = detail::pl_from_points({{-1.0, vbar}, {-xbar, vbar}, {-xbar + eps, vbar + eps}, {1.0, vbar + eps}});
  out.F = Integrand::power(1.0);
  out.A = weight_bound(a, {vbar, vbar + eps});
  return out;
}

/// The plateau function (flat vbar, unit ramps up at s and down at t, top
/// plateau vbar + eps) and its closed-form monotone rearrangement.
struct PlateauPair {
  PiecewiseLinear u = PiecewiseLinear::constant(0.0);
  PiecewiseLinear u_star = PiecewiseLinear::constant(0.0);
};

inline void validate_plateau_spec(const CounterexampleSpec& spec) {
  const double s = spec.s, t = spec.t, e = spec.eps;
  if (!(e > 0.0) || s < -1.0 || t > 1.0 || s > t || spec.vbar < 0.0) {
    throw Error(ErrorCode::InfeasibleSpec, "need -1 <= s <= t <= 1, eps > 0, vbar >= 0");
  }
  if (s + e > t - e) throw Error(ErrorCode::InfeasibleSpec, "need s + eps <= t - eps");
  if (1.0 - t + s + 2.0 * e > 1.0) throw Error(ErrorCode::InfeasibleSpec, "need 1 - t + s + 2 eps <= 1");
}

inline PlateauPair build_plateau_pair(const CounterexampleSpec& spec) {
  validate_plateau_spec(spec);
  const double s = spec.s, t = spec.t, e = spec.eps, v = spec.vbar;
  PlateauPair out;
  out.u = detail::pl_from_points({{-1.0, v}, {s, v}, {s + e, v + e}, {t - e, v + e}, {t, v}, {1.0, v}});
  const double c = 1.0 - t + s;
  out.u_star = detail::pl_from_points({{-1.0, v}, {c, v}, {c + 2.0 * e, v + e}, {1.0, v + e}});
  return out;
}

/// Largest admissible exponent 1 / log2(2A / (A + delta)).
inline double counterexample_alpha(double A, double delta) {
  if (!(A > 0.0) || !(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "need A > 0 and delta > 0");
  if (!(2.0 * A > A + delta)) throw Error(ErrorCode::DegenerateBound, "2A <= A + delta: bound undefined");
  return 1.0 / std::log2(2.0 * A / (A + delta));
}

inline Counterexample build_nonconcavity_counterexample(const Weight& a, const CounterexampleSpec& spec, double alpha) {
  const PlateauPair pair = build_plateau_pair(spec);
  const double s = spec.s, t = spec.t, e = spec.eps, vb = spec.vbar;
  for (int i = 0; i < kPreconditionSamples; ++i) {
    const double y = detail::sample(0.0, e, i, kPreconditionSamples);
    for (int j = 0; j < kPreconditionLevels; ++j) {
      const double v = detail::sample(vb, vb + e, j, kPreconditionLevels);
      const double lhs = a(s + y, v) + a(t - y, v) + spec.delta;
      const double rhs = a(1.0 - t + s + 2.0 * y, v);
      if (!(lhs < rhs)) {
        detail::precondition_failed("a(s+y) + a(t-y) + delta < a(1-t+s+2y) fails at y = " + std::to_string(y) +
                                    ", v = " + std::to_string(v));
      }
    }
  }
  const double A = spec.A.value_or(weight_bound(a, {vb, vb + e}));
  const double amax = counterexample_alpha(A, spec.delta);
  if (!(alpha > 1.0 && alpha < amax)) {
    throw Error(ErrorCode::AlphaOutOfRange,
                "alpha must lie in (1, " + std::to_string(amax) + "), got " + std::to_string(alpha));
  }
  Counterexample out;
  out.u = pair.u;
  out.rearranged = pair.u_star;
  out.F = Integrand::power(alpha);
  out.A = A;
  out.alpha_max = amax;
  return out;
}

/// Plateau function with vbar = 0 against its symmetric rearrangement,
/// F = p + gamma p^2 with gamma = (delta / eps) / (A / eps)^2.
inline Counterexample build_symmetric_counterexample(const Weight& a, const CounterexampleSpec& spec) {
  const double s = spec.s, t = spec.t, e = spec.eps;
  if (spec.vbar != 0.0) throw Error(ErrorCode::InfeasibleSpec, "symmetric counterexample needs vbar = 0");
  if (!(e > 0.0) || s < -1.0 || t > 1.0 || s > t) {
    throw Error(ErrorCode::InfeasibleSpec, "need -1 <= s <= t <= 1 and eps > 0");
  }
  if (!(2.0 * e < t - s)) throw Error(ErrorCode::InfeasibleSpec, "need 2 eps < t - s");
  for (int i = 0; i < kPreconditionSamples; ++i) {
    const double z = detail::sample(0.0, e, i, kPreconditionSamples);
    const double v = z;  // level of the ramps at offset z
    const double lhs = a(s + z, v) + a(t - z, v) + 2.0 * spec.delta;
    const double rhs = a(0.5 * (s - t) + z, v) + a(0.5 * (t - s) - z, v);
    if (!(lhs < rhs)) {
      detail::precondition_failed("a(s+z) + a(t-z) + 2 delta < a((s-t)/2+z) + a((t-s)/2-z) fails at z = " +
                                  std::to_string(z));
    }
  }
  const double A = spec.A.value_or(weight_bound(a, {0.0, e}));
  if (!(A > 0.0)) throw Error(ErrorCode::DegenerateBound, "weight bound A must be positive");
  Counterexample out;
  out.u = detail::pl_from_points({{-1.0, 0.0}, {s, 0.0}, {s + e, e}, {t - e, e}, {t, 0.0}, {1.0, 0.0}});
  const double h = 0.5 * (t - s);
  out.rearranged = detail::pl_from_points({{-1.0, 0.0}, {-h, 0.0}, {-h + e, e}, {h - e, e}, {h, 0.0}, {1.0, 0.0}});
  out.gamma = (spec.delta / e) / ((A / e) * (A / e));
  out.F = Integrand::quadratic(out.gamma);
  out.A = A;
  return out;
}

}  // namespace rearr
