#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/numeric.hpp"

namespace rearr {

inline constexpr int kMaxQuadratureDepth = 40;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Kronrod abscissas on [-1, 1] (nonnegative half); odd indices are the
// Gauss 7-point abscissas.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Fn>
std::pair<double, double> gauss_kronrod_15(Fn& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

template <class Fn>
void adapt(Fn& f, double a, double b, double tol_abs, double tol_rel, int depth, std::vector<double>& values,
           std::vector<double>& errors, int& evals) {
  auto [val, err] = gauss_kronrod_15(f, a, b);
  evals += 15;
  if (!std::isfinite(val)) throw Error(ErrorCode::NonConvergent, "integrand is not finite");
  if (err <= tol_abs || err <= tol_rel * std::abs(val)) {
    values.push_back(val);
    errors.push_back(err);
    return;
  }
  if (depth >= kMaxQuadratureDepth) {
    throw Error(ErrorCode::NonConvergent, "adaptive quadrature exceeded depth " + std::to_string(kMaxQuadratureDepth));
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol_abs, tol_rel, depth + 1, values, errors, evals);
  adapt(f, m, b, 0.5 * tol_abs, tol_rel, depth + 1, values, errors, evals);
}

}  // namespace detail

/// Adaptive 7/15 Gauss-Kronrod quadrature of f over [a, b]. An interval is
/// accepted when |K15 - G7| is below tol_abs (halved at each bisection) or
/// below tol_rel * |K15|. Leaf values are summed pairwise left to right.
template <class Fn>
QuadResult integrate(Fn&& f, double a, double b, double tol_abs, double tol_rel) {
  QuadResult out;
  if (!(b > a)) return out;
  std::vector<double> values, errors;
  detail::adapt(f, a, b, tol_abs, tol_rel, 0, values, errors, out.evaluations);
  out.value = pairwise_sum(values);
  out.error = pairwise_sum(errors);
  return out;
}

}  // namespace rearr
