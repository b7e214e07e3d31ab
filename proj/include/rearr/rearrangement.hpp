#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/numeric.hpp"
#include "rearr/piecewise_linear.hpp"

namespace rearr {

/// Breakpoints of a rearranged function closer than this are merged.
inline constexpr double kBreakpointMergeTol = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Maximal closed intervals making up {u > c} (strict) or {u >= c}.
/// Crossing points inside a segment are computed in closed form; crossings
/// at breakpoints reuse the breakpoint abscissa exactly.
inline std::vector<Interval> superlevel_intervals(const PiecewiseLinear& u, double c, bool strict) {
  const auto xs = u.xs();
  const auto ys = u.ys();
  auto above = [&](double y) { return strict ? y > c : y >= c; };
  auto crossing = [&](std::size_t i) {
    if (ys[i] == c) return xs[i];
    if (ys[i + 1] == c) return xs[i + 1];
    return xs[i] + (c - ys[i]) * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]);
  };

  std::vector<Interval> out;
  auto append = [&](double lo, double hi) {
    if (!out.empty() && out.back().hi == lo) {
      out.back().hi = hi;
    } else {
      out.push_back({lo, hi});
    }
  };
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const bool a = above(ys[i]);
    const bool b = above(ys[i + 1]);
    if (a && b) {
      append(xs[i], xs[i + 1]);
    } else if (a) {
      append(xs[i], crossing(i));
    } else if (b) {
      append(crossing(i), xs[i + 1]);
    }
  }
  // Degenerate single-point pieces carry no measure.
  std::erase_if(out, [](const Interval& iv) { return !(iv.hi > iv.lo); });
  return out;
}

inline double total_length(std::span<const Interval> ivs) {
  double acc = 0.0;
  for (const auto& iv : ivs) acc += iv.length();
  return acc;
}

/// Lebesgue measure of {x : u(x) > t}.
inline double superlevel_measure(const PiecewiseLinear& u, double t) {
  return total_length(superlevel_intervals(u, t, true));
}

/// Sorted distinct breakpoint values of u.
inline std::vector<double> critical_levels(const PiecewiseLinear& u) {
  std::vector<double> levels(u.ys().begin(), u.ys().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

/// Distribution function m(t) = |{u > t}|. Stored as nondecreasing t-knots
/// with nonincreasing m; a repeated t encodes a jump (plateau level of u),
/// left value first. Right-continuous when evaluated.
class DistributionFunction {
 public:
  DistributionFunction(std::vector<double> ts, std::vector<double> ms, double total)
      : ts_(std::move(ts)), ms_(std::move(ms)), total_(total) {}

  std::span<const double> ts() const { return ts_; }
  std::span<const double> ms() const { return ms_; }
  double total_measure() const { return total_; }

  double operator()(double t) const {
    if (t < ts_.front()) return total_;
    if (t >= ts_.back()) return 0.0;
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    const auto r = static_cast<std::size_t>(it - ts_.begin());
    const std::size_t l = r - 1;
    const double lam = (t - ts_[l]) / (ts_[r] - ts_[l]);
    return ms_[l] + lam * (ms_[r] - ms_[l]);
  }

  /// Sizes of the jumps, paired with their levels.
  std::vector<std::pair<double, double>> jumps() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < ts_.size(); ++i) {
      if (ts_[i] == ts_[i + 1]) out.emplace_back(ts_[i], ms_[i] - ms_[i + 1]);
    }
    return out;
  }

 private:
  std::vector<double> ts_;
  std::vector<double> ms_;
  double total_;
};

inline DistributionFunction distribution(const PiecewiseLinear& u) {
  u.require_nonnegative();
  std::vector<double> ts, ms;
  for (double c : critical_levels(u)) {
    const double left = total_length(superlevel_intervals(u, c, false));
    const double right = total_length(superlevel_intervals(u, c, true));
    ts.push_back(c);
    ms.push_back(left);
    if (left - right > kBreakpointMergeTol) {
      ts.push_back(c);
      ms.push_back(right);
    }
  }
  return DistributionFunction(std::move(ts), std::move(ms), u.upper() - u.lower());
}

namespace detail {

/// Left end of the right-anchored interval [1 - |E|, 1] for E given as
/// intervals. When E already ends at the right boundary the left end of its
/// last component is reused, so nondecreasing inputs map to themselves
/// bit-for-bit.
inline double right_anchored_start(std::span<const Interval> ivs, double upper) {
  if (ivs.empty()) return upper;
  if (ivs.back().hi == upper) {
    double rest = 0.0;
    for (std::size_t i = 0; i + 1 < ivs.size(); ++i) rest += ivs[i].length();
    return ivs.back().lo - rest;
  }
  return upper - total_length(ivs);
}

struct Knot {
  double x;
  double y;
};

/// Appends a knot, merging with the previous one when closer than the merge
/// tolerance. The first knot is pinned.
inline void push_knot(std::vector<Knot>& out, Knot k) {
  if (!out.empty() && k.x <= out.back().x + kBreakpointMergeTol) {
    if (k.y == out.back().y || out.size() == 1) return;
    out.back() = k;
    return;
  }
  out.push_back(k);
}

inline PiecewiseLinear from_knots(const std::vector<Knot>& knots) {
  std::vector<double> xs, ys;
  xs.reserve(knots.size());
  ys.reserve(knots.size());
  for (const auto& k : knots) {
    xs.push_back(k.x);
    ys.push_back(k.y);
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

}  // namespace detail

/// Monotone (nondecreasing) rearrangement u* on [-1, 1]: every superlevel
/// set is pushed to [1 - |E|, 1]. At a plateau level the flat piece of u*
/// spans [1 - m(c-), 1 - m(c)].
inline PiecewiseLinear monotone_rearrange(const PiecewiseLinear& u) {
  u.require_unit_domain();
  u.require_nonnegative();
  const double upper = u.upper();
  std::vector<detail::Knot> knots;
  for (double c : critical_levels(u)) {
    const auto ge = superlevel_intervals(u, c, false);
    const auto gt = superlevel_intervals(u, c, true);
    detail::push_knot(knots, {detail::right_anchored_start(ge, upper), c});
    detail::push_knot(knots, {detail::right_anchored_start(gt, upper), c});
  }
  knots.front().x = u.lower();
  knots.back().x = upper;
  if (knots.size() == 1) knots.push_back({upper, knots.front().y});
  return detail::from_knots(knots);
}

/// Symmetric decreasing rearrangement (even, nonincreasing in |x|): every
/// superlevel set is replaced by the centred interval [-|E|/2, |E|/2].
inline PiecewiseLinear symmetric_rearrange(const PiecewiseLinear& u) {
  u.require_unit_domain();
  u.require_nonnegative();
  std::vector<detail::Knot> left;
  for (double c : critical_levels(u)) {
    const double ge = total_length(superlevel_intervals(u, c, false));
    const double gt = total_length(superlevel_intervals(u, c, true));
    detail::push_knot(left, {-0.5 * ge, c});
    detail::push_knot(left, {-0.5 * gt, c});
  }
  // The top level always lands on x = 0 (|{u > max u}| = 0).
  left.front().x = -1.0;
  left.back().x = 0.0;
  // a top plateau needs no knot at the centre
  if (left.size() >= 2 && left[left.size() - 2].y == left.back().y) left.pop_back();
  std::vector<detail::Knot> full = left;
  if (full.back().x < 0.0) full.push_back({-full.back().x, full.back().y});
  for (std::size_t i = left.size() - 1; i-- > 0;) {
    full.push_back({-left[i].x, left[i].y});
  }
  return detail::from_knots(full);
}

/// One affine preimage branch v -> x over a level window.
struct Branch {
  std::size_t segment = 0;  ///< segment of u carrying the branch
  double x0 = 0.0;          ///< anchor breakpoint
  double y0 = 0.0;
  double inverse_slope = 0.0;  ///< dx/dv = 1/u'

  double at(double v) const { return x0 + (v - y0) * inverse_slope; }
};

/// A maximal open value interval on which the number of preimages is fixed.
/// Branches are ordered by position (y_1 < y_2 < ...).
struct LevelWindow {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Branch> branches;

  std::size_t multiplicity() const { return branches.size(); }
};

inline std::vector<LevelWindow> level_windows(const PiecewiseLinear& u) {
  const auto levels = critical_levels(u);
  const auto xs = u.xs();
  const auto ys = u.ys();
  std::vector<LevelWindow> out;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    LevelWindow w{levels[j], levels[j + 1], {}};
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      const double lo = std::min(ys[i], ys[i + 1]);
      const double hi = std::max(ys[i], ys[i + 1]);
      if (lo < hi && lo <= w.lo && hi >= w.hi) {
        w.branches.push_back({i, xs[i], ys[i], (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i])});
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

/// Level window containing the regular value v.
inline LevelWindow level_window_at(const PiecewiseLinear& u, double v) {
  const auto levels = critical_levels(u);
  if (!(v > levels.front() && v < levels.back())) {
    throw Error(ErrorCode::IrregularLevel, "level outside the open range of u");
  }
  if (std::binary_search(levels.begin(), levels.end(), v)) {
    throw Error(ErrorCode::IrregularLevel, "level is the image of a breakpoint");
  }
  const auto windows = level_windows(u);
  for (const auto& w : windows) {
    if (v > w.lo && v < w.hi) return w;
  }
  throw Error(ErrorCode::IrregularLevel, "no level window contains the value");
}

/// Solution y* of u*(y*) = v expressed through the ordered preimages of v
/// under u, by parity of their count and by which side of v the left
/// endpoint value u(-1) lies.
inline double rearranged_preimage(const PiecewiseLinear& u, double v) {
  u.require_unit_domain();
  u.require_nonnegative();
  const LevelWindow w = level_window_at(u, v);
  double alternating = 0.0;  // sum_k (-1)^k y_k, k from 1
  for (std::size_t k = 0; k < w.branches.size(); ++k) {
    const double y = w.branches[k].at(v);
    alternating += (k % 2 == 0) ? -y : y;
  }
  const bool even = w.multiplicity() % 2 == 0;
  if (u.ys().front() < v) {
    return even ? 1.0 - alternating : -alternating;
  }
  return even ? -1.0 + alternating : alternating;
}

}  // namespace rearr
