#pragma once

// Reference computations that share no code with the library. They are slow
// and approximate; tests compare against them with tolerances sized to the
// sampling density.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Measure of {f > t} on [lo, hi] by midpoint counting on n cells.
inline double brute_measure(const std::function<double(double)>& f, double t, std::size_t n = 1000000,
                            double lo = -1.0, double hi = 1.0) {
  const double h = (hi - lo) / static_cast<double>(n);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (f(lo + (static_cast<double>(i) + 0.5) * h) > t) ++count;
  }
  return static_cast<double>(count) * h;
}

/// Increasing rearrangement by sorting midpoint samples: the value at x is
/// the empirical quantile of order (x + 1) / 2.
class SortedSamples {
 public:
  SortedSamples(const std::function<double(double)>& f, std::size_t n) : values_(n) {
    const double h = 2.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) values_[i] = f(-1.0 + (static_cast<double>(i) + 0.5) * h);
    std::sort(values_.begin(), values_.end());
  }

  double increasing(double x) const {
    const double pos = (x + 1.0) / 2.0 * static_cast<double>(values_.size()) - 0.5;
    const auto i = static_cast<std::ptrdiff_t>(std::floor(pos));
    const auto last = static_cast<std::ptrdiff_t>(values_.size()) - 1;
    if (i < 0) return values_.front();
    if (i >= last) return values_.back();
    const double lam = pos - static_cast<double>(i);
    return values_[i] * (1.0 - lam) + values_[i + 1] * lam;
  }

  /// Even rearrangement, largest at 0.
  double symmetric(double y) const { return increasing(1.0 - 2.0 * std::abs(y)); }

 private:
  std::vector<double> values_;
};

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n = 20000) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += f(a + static_cast<double>(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Functional of a PL function given by its breakpoints: Simpson on every
/// segment, where the slope is constant.
inline double functional(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::function<double(double, double)>& weight,
                         const std::function<double(double, double)>& integrand, std::size_t panels = 2000) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1], y0 = ys[i], y1 = ys[i + 1];
    const double g = std::abs((y1 - y0) / (x1 - x0));
    total += simpson(
        [&](double x) {
          const double v = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
          return integrand(v, weight(x, v) * g);
        },
        x0, x1, panels);
  }
  return total;
}

/// inf_j (values[j] + |grid[i] - grid[j]|) by direct double loop.
inline std::vector<double> envelope(const std::vector<double>& values, const std::vector<double>& grid) {
  std::vector<double> out(values.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      out[i] = std::min(out[i], values[j] + std::abs(grid[i] - grid[j]));
    }
  }
  return out;
}

}  // namespace oracle
