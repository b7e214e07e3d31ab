#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/expr.hpp"
#include "rearr/rearrangement.hpp"

namespace rearr {

/// Default spot-check resolution for expression-backed weights.
inline constexpr int kDefaultCheckXNodes = 257;
inline constexpr int kDefaultCheckVSamples = 129;

enum class WeightKind { Expression, Grid, Interpolated, Combined, Mollified, Function };

/// Uniform x-nodes -1 + 2i/k (k even) with the node values given per
/// v-sample; piecewise linear in x and linear in v between samples.
/// Outside the sampled v-range the nearest row is used.
struct GridTable {
  int k = 2;
  std::vector<double> v_samples;
  std::vector<std::vector<double>> rows;  ///< rows[j][i] = a(x_i, v_samples[j])

  double node(int i) const { return i == k ? 1.0 : -1.0 + 2.0 * i / k; }

  /// Node values at level v (exact: rows are blended linearly in v).
  std::vector<double> node_values(double v) const {
    if (v_samples.size() == 1 || v <= v_samples.front()) return rows.front();
    if (v >= v_samples.back()) return rows.back();
    auto it = std::upper_bound(v_samples.begin(), v_samples.end(), v);
    const auto j = static_cast<std::size_t>(it - v_samples.begin()) - 1;
    const double lam = (v - v_samples[j]) / (v_samples[j + 1] - v_samples[j]);
    std::vector<double> out(rows[j].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - lam) * rows[j][i] + lam * rows[j + 1][i];
    return out;
  }

  static double interpolate_nodes(const std::vector<double>& values, int k, double x) {
    const double pos = (x + 1.0) * 0.5 * k;
    int i = static_cast<int>(std::floor(pos));
    i = std::clamp(i, 0, k - 1);
    const double t = std::clamp(pos - i, 0.0, 1.0);
    return (1.0 - t) * values[i] + t * values[i + 1];
  }

  double operator()(double x, double v) const {
    if (v_samples.size() == 1 || v <= v_samples.front()) return interpolate_nodes(rows.front(), k, x);
    if (v >= v_samples.back()) return interpolate_nodes(rows.back(), k, x);
    auto it = std::upper_bound(v_samples.begin(), v_samples.end(), v);
    const auto j = static_cast<std::size_t>(it - v_samples.begin()) - 1;
    const double lam = (v - v_samples[j]) / (v_samples[j + 1] - v_samples[j]);
    return (1.0 - lam) * interpolate_nodes(rows[j], k, x) + lam * interpolate_nodes(rows[j + 1], k, x);
  }
};

/// Weight a(x, v) >= 0 on [-1, 1] x [v_min, v_max]. Cheap to copy; the
/// backing representation is shared and never mutated.
class Weight {
 public:
  using EvalFn = std::function<double(double, double)>;
  using NodeFn = std::function<std::vector<double>(double)>;

  /// Expression in x and v. Nonnegativity is spot-checked on the default grid.
  static Weight from_expr(const Expr& e, Interval v_range = {0.0, 1.0}) {
    if (e.uses(Variable::P)) {
      throw Error(ErrorCode::InvalidArgument, "a weight may only depend on x and v");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = WeightKind::Expression;
    impl->v_range = v_range;
    impl->description = e.source().empty() ? e.print() : e.source();
    impl->x_nodes = {0.0};
    impl->eval = [e](double x, double v) { return e.eval(Bindings{x, v, std::nullopt}); };
    impl->expr = e;
    Weight w(std::move(impl));
    w.spot_check_nonnegative(kDefaultCheckXNodes, kDefaultCheckVSamples);
    return w;
  }

  static Weight from_expr(std::string_view text, Interval v_range = {0.0, 1.0}) {
    return from_expr(parse_expr(text), v_range);
  }

  static Weight from_grid(GridTable table, std::string description = "grid") {
    if (table.k < 2 || table.k % 2 != 0) {
      throw Error(ErrorCode::InvalidArgument, "grid weights need an even node parameter k >= 2");
    }
    if (table.v_samples.empty() || table.rows.size() != table.v_samples.size()) {
      throw Error(ErrorCode::InvalidArgument, "grid needs one row per v-sample");
    }
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
      if (j > 0 && !(table.v_samples[j] > table.v_samples[j - 1])) {
        throw Error(ErrorCode::InvalidArgument, "grid v-samples must be strictly increasing");
      }
      if (table.rows[j].size() != static_cast<std::size_t>(table.k + 1)) {
        throw Error(ErrorCode::InvalidArgument, "grid rows need k + 1 node values");
      }
      for (std::size_t i = 0; i < table.rows[j].size(); ++i) {
        const double val = table.rows[j][i];
        if (!std::isfinite(val)) throw Error(ErrorCode::InvalidArgument, "non-finite grid value");
        if (val < 0.0) {
          throw Error(ErrorCode::NegativeWeight, "negative grid value at x = " + std::to_string(table.node(int(i))) +
                                                     ", v = " + std::to_string(table.v_samples[j]));
        }
      }
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = WeightKind::Grid;
    impl->v_range = {table.v_samples.front(), table.v_samples.back()};
    if (impl->v_range.hi == impl->v_range.lo) impl->v_range.hi = impl->v_range.lo + 1.0;
    impl->description = std::move(description);
    for (int i = 1; i < table.k; ++i) impl->x_nodes.push_back(table.node(i));
    if (table.v_samples.size() > 1) impl->v_nodes = table.v_samples;
    auto shared = std::make_shared<const GridTable>(std::move(table));
    impl->eval = [shared](double x, double v) { return (*shared)(x, v); };
    impl->grid_k = shared->k;
    impl->node_values = [shared](double v) { return shared->node_values(v); };
    impl->table = shared;
    return Weight(std::move(impl));
  }

  /// Grid with the node values produced on demand by `nodes(v)`.
  static Weight from_node_function(int k, NodeFn nodes, Interval v_range, std::string description,
                                   std::vector<double> v_nodes = {}) {
    if (k < 2 || k % 2 != 0) throw Error(ErrorCode::InvalidArgument, "node parameter k must be even and >= 2");
    auto impl = std::make_shared<Impl>();
    impl->kind = WeightKind::Interpolated;
    impl->v_range = v_range;
    impl->description = std::move(description);
    for (int i = 1; i < k; ++i) impl->x_nodes.push_back(-1.0 + 2.0 * i / k);
    impl->v_nodes = std::move(v_nodes);
    impl->grid_k = k;
    impl->node_values = nodes;
    impl->eval = [k, nodes](double x, double v) { return GridTable::interpolate_nodes(nodes(v), k, x); };
    Weight w(std::move(impl));
    w.spot_check_nonnegative(k + 1, kDefaultCheckVSamples);
    return w;
  }

  /// Arbitrary callable; used by the weight transforms.
  static Weight from_function(EvalFn fn, Interval v_range, std::string description, WeightKind kind,
                              std::vector<double> x_nodes = {}, std::vector<double> v_nodes = {}) {
    auto impl = std::make_shared<Impl>();
    impl->kind = kind;
    impl->v_range = v_range;
    impl->description = std::move(description);
    impl->eval = std::move(fn);
    impl->x_nodes = std::move(x_nodes);
    impl->v_nodes = std::move(v_nodes);
    return Weight(std::move(impl));
  }

  static Weight constant(double c, Interval v_range = {0.0, 1.0}) {
    if (!(c >= 0.0)) throw Error(ErrorCode::NegativeWeight, "constant weight must be nonnegative");
    GridTable t{2, {v_range.lo}, {{c, c, c}}};
    Weight w = from_grid(std::move(t), "const(" + std::to_string(c) + ")");
    auto impl = std::make_shared<Impl>(*w.impl_);
    impl->v_range = v_range;
    return Weight(std::move(impl));
  }

  double operator()(double x, double v) const { return impl_->eval(x, v); }

  WeightKind kind() const { return impl_->kind; }
  const std::string& description() const { return impl_->description; }
  Interval v_range() const { return impl_->v_range; }

  /// Copy with a different value interval of interest.
  Weight with_v_range(Interval r) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->v_range = r;
    return Weight(std::move(impl));
  }

  /// Interior abscissas where a(., v) may have kinks.
  const std::vector<double>& x_nodes() const { return impl_->x_nodes; }
  /// Levels where a(x, .) may have kinks.
  const std::vector<double>& v_nodes() const { return impl_->v_nodes; }

  /// Piecewise linear in x on uniform nodes -1 + 2i/k.
  bool is_grid() const { return impl_->grid_k.has_value(); }
  int grid_k() const { return impl_->grid_k.value(); }
  std::vector<double> grid_node_values(double v) const { return impl_->node_values(v); }
  /// Stored table (plain grid weights only).
  const GridTable* table() const { return impl_->table.get(); }

  bool expression_backed() const { return impl_->kind == WeightKind::Expression; }

  void spot_check_nonnegative(int x_nodes, int v_samples) const {
    const Interval r = v_range();
    for (int j = 0; j < v_samples; ++j) {
      const double v = v_samples == 1 ? r.lo : r.lo + (r.hi - r.lo) * j / (v_samples - 1);
      for (int i = 0; i < x_nodes; ++i) {
        const double x = i == x_nodes - 1 ? 1.0 : -1.0 + 2.0 * i / (x_nodes - 1);
        const double val = (*this)(x, v);
        if (!(val >= 0.0)) {
          throw Error(ErrorCode::NegativeWeight,
                      "weight " + description() + " is negative (or NaN) at x = " + std::to_string(x) +
                          ", v = " + std::to_string(v));
        }
      }
    }
  }

 private:
  struct Impl {
    WeightKind kind = WeightKind::Function;
    Interval v_range{0.0, 1.0};
    std::string description;
    EvalFn eval;
    std::vector<double> x_nodes;
    std::vector<double> v_nodes;
    std::optional<int> grid_k;
    NodeFn node_values;
    std::shared_ptr<const GridTable> table;
    std::optional<Expr> expr;
  };

  explicit Weight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

}  // namespace rearr
