#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/numeric.hpp"

namespace rearr {

/// Continuous piecewise-linear function given by strictly increasing
/// breakpoints and the values there. Immutable after construction.
///
/// Most of the library works on the unit domain [-1, 1]; the approximation
/// pipeline also builds functions on [0, 1] and on arbitrary value ranges,
/// so the domain itself is whatever the breakpoints span.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size()) {
      throw Error(ErrorCode::InvalidArgument, "breakpoint and value counts differ");
    }
    if (xs_.size() < 2) {
      throw Error(ErrorCode::InvalidArgument, "need at least two breakpoints");
    }
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
        throw Error(ErrorCode::InvalidArgument, "non-finite breakpoint data");
      }
      if (i > 0 && !(xs_[i] > xs_[i - 1])) {
        throw Error(ErrorCode::InvalidArgument,
                    "breakpoints must be strictly increasing (index " + std::to_string(i) + ")");
      }
    }
  }

  /// Constant function on [lo, hi].
  static PiecewiseLinear constant(double value, double lo = -1.0, double hi = 1.0) {
    return PiecewiseLinear({lo, hi}, {value, value});
  }

  /// Samples f at n+1 uniform nodes of [lo, hi].
  template <class Fn>
  static PiecewiseLinear sample(Fn&& f, std::size_t segments, double lo = -1.0, double hi = 1.0) {
    if (segments < 1) throw Error(ErrorCode::InvalidArgument, "need at least one segment");
    std::vector<double> xs(segments + 1), ys(segments + 1);
    for (std::size_t i = 0; i <= segments; ++i) {
      xs[i] = (i == segments) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(segments);
      ys[i] = f(xs[i]);
    }
    return PiecewiseLinear(std::move(xs), std::move(ys));
  }

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::size_t size() const { return xs_.size(); }
  std::size_t segment_count() const { return xs_.size() - 1; }
  double lower() const { return xs_.front(); }
  double upper() const { return xs_.back(); }

  bool on_unit_domain() const { return xs_.front() == -1.0 && xs_.back() == 1.0; }

  void require_unit_domain() const {
    if (!on_unit_domain()) {
      throw Error(ErrorCode::InvalidArgument, "function must be defined on [-1, 1]");
    }
  }

  void require_nonnegative() const {
    for (std::size_t i = 0; i < ys_.size(); ++i) {
      if (ys_[i] < 0.0) {
        throw Error(ErrorCode::NegativeInput,
                    "negative value " + std::to_string(ys_[i]) + " at x = " + std::to_string(xs_[i]));
      }
    }
  }

  double slope(std::size_t segment) const {
    return (ys_[segment + 1] - ys_[segment]) / (xs_[segment + 1] - xs_[segment]);
  }

  /// Index of the segment containing x (the left one at interior breakpoints).
  std::size_t segment_of(double x) const {
    if (x <= xs_.front()) return 0;
    if (x >= xs_.back()) return segment_count() - 1;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto idx = static_cast<std::size_t>(it - xs_.begin());
    return std::min(idx - 1, segment_count() - 1);
  }

  double operator()(double x) const {
    if (x < xs_.front() || x > xs_.back()) {
      throw Error(ErrorCode::InvalidArgument,
                  "evaluation point " + std::to_string(x) + " outside the domain");
    }
    const std::size_t i = segment_of(x);
    if (x == xs_[i]) return ys_[i];
    if (x == xs_[i + 1]) return ys_[i + 1];
    const double lam = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return ys_[i] + lam * (ys_[i + 1] - ys_[i]);
  }

  double min_value() const { return *std::min_element(ys_.begin(), ys_.end()); }
  double max_value() const { return *std::max_element(ys_.begin(), ys_.end()); }

  /// Copy with an extra breakpoint at x (no-op if already present).
  PiecewiseLinear with_breakpoint(double x) const {
    if (x <= xs_.front() || x >= xs_.back()) return *this;
    auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    if (*it == x) return *this;
    const double y = (*this)(x);
    const auto pos = it - xs_.begin();
    std::vector<double> xs = xs_, ys = ys_;
    xs.insert(xs.begin() + pos, x);
    ys.insert(ys.begin() + pos, y);
    return PiecewiseLinear(std::move(xs), std::move(ys));
  }

  /// Restriction to [lo, hi] (must lie inside the domain).
  PiecewiseLinear restrict_to(double lo, double hi) const {
    if (!(lo < hi) || lo < xs_.front() || hi > xs_.back()) {
      throw Error(ErrorCode::InvalidArgument, "restriction interval outside the domain");
    }
    std::vector<double> xs{lo}, ys{(*this)(lo)};
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (xs_[i] > lo && xs_[i] < hi) {
        xs.push_back(xs_[i]);
        ys.push_back(ys_[i]);
      }
    }
    xs.push_back(hi);
    ys.push_back((*this)(hi));
    return PiecewiseLinear(std::move(xs), std::move(ys));
  }

  /// x -> f(c - x) on the mirrored domain [c - upper, c - lower].
  PiecewiseLinear reflected(double c = 0.0) const {
    std::vector<double> xs(xs_.size()), ys(ys_.size());
    const std::size_t n = xs_.size();
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = c - xs_[n - 1 - i];
      if (xs[i] == 0.0) xs[i] = 0.0;  // drop negative zero
      ys[i] = ys_[n - 1 - i];
    }
    return PiecewiseLinear(std::move(xs), std::move(ys));
  }

  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

struct PlMetrics {
  double integral = 0.0;
  double total_variation = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_slope = 0.0;  ///< largest |u'| over segments
};

inline PlMetrics pl_metrics(const PiecewiseLinear& u) {
  std::vector<double> areas, jumps;
  areas.reserve(u.segment_count());
  jumps.reserve(u.segment_count());
  double max_slope = 0.0;
  const auto xs = u.xs();
  const auto ys = u.ys();
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    areas.push_back(0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]));
    jumps.push_back(std::abs(ys[i + 1] - ys[i]));
    max_slope = std::max(max_slope, std::abs(u.slope(i)));
  }
  return PlMetrics{pairwise_sum(areas), pairwise_sum(jumps), u.min_value(), u.max_value(), max_slope};
}

/// Sorted union of the breakpoints of f and g restricted to their common domain.
inline std::vector<double> merged_breakpoints(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  const double lo = std::max(f.lower(), g.lower());
  const double hi = std::min(f.upper(), g.upper());
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "functions have disjoint domains");
  std::vector<double> pts{lo, hi};
  for (double x : f.xs()) if (x > lo && x < hi) pts.push_back(x);
  for (double x : g.xs()) if (x > lo && x < hi) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Exact integral of |d| for d affine on [a, b] with end values da, db.
inline double abs_affine_integral(double a, double b, double da, double db) {
  const double len = b - a;
  if ((da >= 0.0 && db >= 0.0) || (da <= 0.0 && db <= 0.0)) {
    return 0.5 * std::abs(da + db) * len;
  }
  // one sign change: two triangles
  const double t = da / (da - db);
  return 0.5 * len * (std::abs(da) * t + std::abs(db) * (1.0 - t));
}

/// ||f - g||_{L1} over the common domain.
inline double l1_distance(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  const auto pts = merged_breakpoints(f, g);
  std::vector<double> parts;
  parts.reserve(pts.size());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    parts.push_back(abs_affine_integral(pts[i], pts[i + 1], f(pts[i]) - g(pts[i]),
                                        f(pts[i + 1]) - g(pts[i + 1])));
  }
  return pairwise_sum(parts);
}

/// ||f' - g'||_{L1} over the common domain.
inline double l1_derivative_distance(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  const auto pts = merged_breakpoints(f, g);
  std::vector<double> parts;
  parts.reserve(pts.size());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const double df = f.slope(f.segment_of(mid));
    const double dg = g.slope(g.segment_of(mid));
    parts.push_back(std::abs(df - dg) * (pts[i + 1] - pts[i]));
  }
  return pairwise_sum(parts);
}

}  // namespace rearr
