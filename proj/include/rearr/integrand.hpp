#pragma once

#include <algorithm>
#include <cmath>
#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "rearr/errors.hpp"
#include "rearr/expr.hpp"
#include "rearr/rearrangement.hpp"

namespace rearr {

enum class IntegrandKind { PowerAlpha, QuadraticGamma, Expression };

/// Sampled convexity/monotonicity scan of p -> F(v, p).
struct IntegrandCertificate {
  bool convex = true;
  bool nondecreasing = true;
  bool nonnegative = true;
  double worst_p = 0.0;
  double worst_v = 0.0;

  bool ok() const { return convex && nondecreasing && nonnegative; }
};

/// F(v, p) with p = a(x, u) |u'| >= 0.
class Integrand {
 public:
  /// F = p^alpha, alpha >= 1.
  static Integrand power(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
      throw Error(ErrorCode::InvalidArgument, "power integrand needs alpha >= 1");
    }
    Integrand f;
    f.kind_ = IntegrandKind::PowerAlpha;
    f.param_ = alpha;
    return f;
  }

  /// F = p + gamma p^2, gamma >= 0.
  static Integrand quadratic(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::InvalidArgument, "quadratic integrand needs gamma >= 0");
    }
    Integrand f;
    f.kind_ = IntegrandKind::QuadraticGamma;
    f.param_ = gamma;
    return f;
  }

  static Integrand from_expr(const Expr& e) {
    if (e.uses(Variable::X)) throw Error(ErrorCode::InvalidArgument, "an integrand may only depend on v and p");
    Integrand f;
    f.kind_ = IntegrandKind::Expression;
    f.expr_ = std::make_shared<const Expr>(e);
    return f;
  }

  static Integrand from_expr(std::string_view text) { return from_expr(parse_expr(text)); }

  double operator()(double v, double p) const {
    switch (kind_) {
      case IntegrandKind::PowerAlpha:
        if (param_ == 1.0) return p;
        if (param_ == 2.0) return p * p;
        return std::pow(p, param_);
      case IntegrandKind::QuadraticGamma:
        return p + param_ * p * p;
      case IntegrandKind::Expression:
        return expr_->eval(Bindings{std::nullopt, v, p});
    }
    return 0.0;
  }

  IntegrandKind kind() const { return kind_; }
  double parameter() const { return param_; }

  std::string description() const {
    switch (kind_) {
      case IntegrandKind::PowerAlpha: return "p^" + format_param();
      case IntegrandKind::QuadraticGamma: return "p+" + format_param() + "*p^2";
      case IntegrandKind::Expression: return expr_->source().empty() ? expr_->print() : expr_->source();
    }
    return "";
  }

  /// Second differences in p at 64 points of [0, p_max] for 16 levels of
  /// `vr`, plus first differences and signs. Built-in families pass by
  /// construction and are still scanned.
  IntegrandCertificate certify(Interval vr = {0.0, 1.0}, double p_max = 8.0) const {
    constexpr int kP = 64;
    constexpr int kV = 16;
    constexpr double kTol = -1e-9;
    IntegrandCertificate cert;
    const double hp = p_max / (kP - 1);
    for (int j = 0; j < kV; ++j) {
      const double v = vr.hi == vr.lo ? vr.lo : vr.lo + (vr.hi - vr.lo) * j / (kV - 1);
      double prev2 = 0.0, prev1 = 0.0;
      for (int i = 0; i < kP; ++i) {
        const double p = hp * i;
        double fp;
        try {
          fp = (*this)(v, p);
        } catch (const Error&) {
          cert.nonnegative = false;
          cert.worst_p = p;
          cert.worst_v = v;
          return cert;
        }
        const double scale = std::max(1.0, std::abs(fp));
        if (!(fp >= 0.0)) {
          cert.nonnegative = false;
          cert.worst_p = p;
          cert.worst_v = v;
        }
        if (i >= 1 && fp - prev1 < kTol * scale) {
          cert.nondecreasing = false;
          cert.worst_p = p;
          cert.worst_v = v;
        }
        if (i >= 2 && fp - 2.0 * prev1 + prev2 < kTol * scale) {
          cert.convex = false;
          cert.worst_p = p;
          cert.worst_v = v;
        }
        prev2 = prev1;
        prev1 = fp;
      }
    }
    return cert;
  }

 private:
  Integrand() = default;

  std::string format_param() const {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, param_);
    return ec == std::errc{} ? std::string(buf, end) : std::to_string(param_);
  }

  IntegrandKind kind_ = IntegrandKind::PowerAlpha;
  double param_ = 1.0;
  std::shared_ptr<const Expr> expr_;
};

}  // namespace rearr
