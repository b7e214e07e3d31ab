#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rearr/constructs.hpp"
#include "rearr/errors.hpp"
#include "rearr/functional.hpp"
#include "rearr/integrand.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/pl_literal.hpp"
#include "rearr/random.hpp"
#include "rearr/weight.hpp"
#include "rearr/weightlab.hpp"

namespace rearr {

enum class WeightFamily { Admissible, Convex, Constant, Violating };

inline std::string_view to_string(WeightFamily f) {
  switch (f) {
    case WeightFamily::Admissible: return "admissible";
    case WeightFamily::Convex: return "convex";
    case WeightFamily::Constant: return "constant";
    case WeightFamily::Violating: return "violating";
  }
  return "?";
}

inline WeightFamily parse_family(std::string_view s) {
  if (s == "admissible") return WeightFamily::Admissible;
  if (s == "convex") return WeightFamily::Convex;
  if (s == "constant") return WeightFamily::Constant;
  if (s == "violating") return WeightFamily::Violating;
  throw Error(ErrorCode::InvalidArgument, "unknown weight family: " + std::string(s));
}

struct SweepConfig {
  std::uint64_t seed = 42;
  int count = 100;
  int min_breakpoints = 2;
  int max_breakpoints = 64;
  double value_max = 2.0;
  double plateau_probability = 0.3;
  RearrangeMode mode = RearrangeMode::Monotone;
  WeightFamily family = WeightFamily::Admissible;
  double tol = 1e-8;        ///< allowed negative gap beyond the quadrature error
  double quad_tol = 1e-10;  ///< quadrature tolerance per functional
  int threads = 0;          ///< 0: RR_THREADS or hardware concurrency

  void validate() const {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
    if (min_breakpoints < 2 || max_breakpoints < min_breakpoints) {
      throw Error(ErrorCode::InvalidArgument, "breakpoint range must satisfy 2 <= min <= max");
    }
    if (!(value_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "value_max must be positive");
    if (!(tol >= 0.0) || !(quad_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
};

struct Instance {
  int index = 0;
  PiecewiseLinear u = PiecewiseLinear::constant(0.0);
  Weight a = Weight::constant(1.0);
  Integrand F = Integrand::power(1.0);
  std::string weight_family;
  std::string integrand_family;
  /// Set for instances built by a counterexample constructor.
  std::optional<std::string> construction;
};

inline constexpr int kGeneratorStallLimit = 1000;

// ---- random building blocks ------------------------------------------------

/// Random nonnegative PL function on [-1, 1]. Some segments are flattened
/// into plateaus with probability `plateau_probability`.
inline PiecewiseLinear random_pl(SplitMix64& rng, int min_bp, int max_bp, double vmax, double plateau_probability) {
  const int n = rng.integer(min_bp, max_bp);
  std::vector<double> xs{-1.0, 1.0};
  for (int i = 0; i < n - 2; ++i) xs.push_back(rng.uniform(-1.0, 1.0));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys(xs.size());
  for (double& y : ys) y = rng.uniform(0.0, vmax);
  if (rng.chance(plateau_probability) && ys.size() >= 2) {
    const int flats = rng.integer(1, 3);
    for (int f = 0; f < flats; ++f) {
      const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(ys.size()) - 2));
      ys[i + 1] = ys[i];
    }
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

/// As random_pl, with both end values set to the minimum.
inline PiecewiseLinear random_pl_equal_ends(SplitMix64& rng, int min_bp, int max_bp, double vmax, double plateau_p) {
  const PiecewiseLinear base = random_pl(rng, min_bp, max_bp, vmax, plateau_p);
  std::vector<double> xs(base.xs().begin(), base.xs().end());
  std::vector<double> ys(base.ys().begin(), base.ys().end());
  const double lo = *std::min_element(ys.begin(), ys.end());
  ys.front() = lo;
  ys.back() = lo;
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

namespace detail {

/// Even node row on k + 1 uniform nodes from the right half values.
inline std::vector<double> mirror_row(const std::vector<double>& right_half) {
  std::vector<double> row(right_half.rbegin(), right_half.rend());
  row.insert(row.end(), right_half.begin() + 1, right_half.end());
  return row;
}

/// Right half (x = 0 .. 1) of an even concave nonnegative row: decrements
/// grow from node to node.
inline std::vector<double> concave_half(SplitMix64& rng, int half) {
  std::vector<double> dec(static_cast<std::size_t>(half));
  for (double& d : dec) d = rng.uniform(0.0, 1.0);
  std::sort(dec.begin(), dec.end());
  const double peak = rng.uniform(0.5, 2.0);
  double total = 0.0;
  for (double d : dec) total += d;
  const double scale = total > 0.0 ? rng.uniform(0.0, peak) / total : 0.0;
  std::vector<double> out{peak};
  for (double d : dec) out.push_back(std::max(0.0, out.back() - d * scale));
  return out;
}

/// Right half of an even convex nonnegative row: increments grow.
inline std::vector<double> convex_half(SplitMix64& rng, int half) {
  std::vector<double> inc(static_cast<std::size_t>(half));
  for (double& d : inc) d = rng.uniform(0.0, 1.0);
  std::sort(inc.begin(), inc.end());
  const double base = rng.uniform(0.0, 1.0);
  const double scale = rng.uniform(0.0, 2.0) / half;
  std::vector<double> out{base};
  for (double d : inc) out.push_back(out.back() + d * scale);
  return out;
}

inline Weight table_weight(SplitMix64& rng, bool convex, double vmax, std::string name) {
  const int k = 2 * rng.integer(1, 8);
  const int half = k / 2;
  const bool two_rows = rng.chance(0.5);
  GridTable t{k, {}, {}};
  t.v_samples.push_back(0.0);
  t.rows.push_back(mirror_row(convex ? convex_half(rng, half) : concave_half(rng, half)));
  if (two_rows) {
    t.v_samples.push_back(vmax);
    t.rows.push_back(mirror_row(convex ? convex_half(rng, half) : concave_half(rng, half)));
  }
  Weight w = Weight::from_grid(std::move(t), std::move(name));
  return w.with_v_range({0.0, vmax});
}

}  // namespace detail

/// Even, concave in x, piecewise linear on uniform nodes (possibly varying linearly in v).
inline Weight random_even_concave_weight(SplitMix64& rng, double vmax = 2.0) {
  return detail::table_weight(rng, false, vmax, "even-concave-pl");
}

/// Even, convex in x, piecewise linear on uniform nodes.
inline Weight random_even_convex_weight(SplitMix64& rng, double vmax = 2.0) {
  return detail::table_weight(rng, true, vmax, "even-convex-pl");
}

/// Draw from the admissible families: even concave PL, max or sum of two
/// such, a scaled tent, or a constant.
inline Weight random_admissible_weight(SplitMix64& rng, double vmax = 2.0) {
  switch (rng.integer(0, 4)) {
    case 0:
    case 1: return random_even_concave_weight(rng, vmax);
    case 2:
      return combine_weights(random_even_concave_weight(rng, vmax), random_even_concave_weight(rng, vmax),
                             CombineMode::Max);
    case 3: {
      const double c = rng.uniform(0.1, 2.0);
      GridTable t{2, {0.0}, {{0.0, c, 0.0}}};
      Weight tent = Weight::from_grid(std::move(t), "scaled-tent").with_v_range({0.0, vmax});
      if (rng.chance(0.5)) return tent;
      return combine_weights(tent, random_even_concave_weight(rng, vmax), CombineMode::Sum);
    }
    default: return Weight::constant(rng.uniform(0.1, 2.0), {0.0, vmax});
  }
}

inline Weight random_convex_weight(SplitMix64& rng, double vmax = 2.0) {
  switch (rng.integer(0, 3)) {
    case 0: return Weight::from_expr("x^2", {0.0, vmax});
    case 1: return Weight::constant(rng.uniform(0.1, 2.0), {0.0, vmax});
    case 2: return Weight::from_expr("1+x^2", {0.0, vmax});
    default: return interpolate_weight(random_even_convex_weight(rng, vmax), 2 * rng.integer(1, 8));
  }
}

inline Integrand random_integrand(SplitMix64& rng, std::string& family) {
  switch (rng.integer(0, 2)) {
    case 0: {
      const double alpha = rng.uniform(1.0, 3.0);
      family = "power";
      return Integrand::power(alpha);
    }
    case 1: {
      const double gamma = rng.uniform(0.0, 2.0);
      family = "quadratic";
      return Integrand::quadratic(gamma);
    }
    default: {
      static constexpr std::string_view kSamples[] = {"(1+v)*p^2", "p+p^2", "exp(v)*p^1.5", "(2+sin(v))*p^2"};
      family = "expression";
      return Integrand::from_expr(kSamples[rng.integer(0, 3)]);
    }
  }
}

namespace detail {

inline bool passes(const Weight& a, RearrangeMode mode) {
  if (mode == RearrangeMode::Monotone) return check_admissible(a).admissible();
  return check_symmetric_condition(a).cond_sym;
}

inline Weight random_violating_weight(SplitMix64& rng, double vmax, RearrangeMode mode, std::string& name) {
  const int pick = rng.integer(0, 3);
  if (mode == RearrangeMode::Monotone) {
    static constexpr std::string_view kNames[] = {"x^2", "abs(x)", "1+x/2"};
    if (pick < 3) {
      name = kNames[pick];
      return Weight::from_expr(kNames[pick], {0.0, vmax});
    }
  } else {
    static constexpr std::string_view kNames[] = {"1-abs(x)", "1+x/2", "1-x^2/2"};
    if (pick < 3) {
      name = kNames[pick];
      return Weight::from_expr(kNames[pick], {0.0, vmax});
    }
  }
  name = "random-pl";
  const int k = 2 * rng.integer(1, 8);
  GridTable t{k, {0.0}, {std::vector<double>(static_cast<std::size_t>(k + 1))}};
  for (double& y : t.rows[0]) y = rng.uniform(0.0, 2.0);
  return Weight::from_grid(std::move(t), "random-pl").with_v_range({0.0, vmax});
}

/// Counterexample instance for the named violating weight, when one exists.
inline std::optional<Instance> constructed_instance(SplitMix64& rng, const Weight& a, const std::string& name,
                                                    RearrangeMode mode) {
  Instance inst;
  if (mode == RearrangeMode::Monotone && name == "1+x/2") {
    const double xbar = rng.uniform(-0.8, -0.2);
    const double eps = rng.uniform(0.05, 0.15);
    const double vbar = rng.uniform(0.0, 0.5);
    const Counterexample c = build_asymmetry_counterexample(a, xbar, vbar, eps);
    inst.u = c.u;
    inst.F = c.F;
    inst.construction = "asymmetry";
  } else if (mode == RearrangeMode::Monotone && (name == "x^2" || name == "abs(x)")) {
    CounterexampleSpec spec;
    if (name == "x^2") {
      spec = {0.4, 0.6, 0.1, 0.1, 0.0, std::nullopt, CounterexampleKind::Nonconcavity};
    } else {
      spec = {-0.1, 0.1, rng.uniform(0.02, 0.05), 0.1, 0.0, std::nullopt, CounterexampleKind::Nonconcavity};
    }
    spec.vbar = rng.uniform(0.0, 0.5);
    const double amax = counterexample_alpha(weight_bound(a, {spec.vbar, spec.vbar + spec.eps}), spec.delta);
    const double alpha = rng.uniform(1.01, std::max(1.011, amax - 0.01));
    const Counterexample c = build_nonconcavity_counterexample(a, spec, alpha);
    inst.u = c.u;
    inst.F = c.F;
    inst.construction = "nonconcavity";
  } else if (mode == RearrangeMode::Symmetric && name == "1-abs(x)") {
    CounterexampleSpec spec{0.8, 1.0, rng.uniform(0.02, 0.05), 0.1, 0.0, std::nullopt,
                            CounterexampleKind::Nonconvexity};
    const Counterexample c = build_symmetric_counterexample(a, spec);
    inst.u = c.u;
    inst.F = c.F;
    inst.construction = "nonconvexity";
  } else {
    return std::nullopt;
  }
  inst.integrand_family = "constructed";
  return inst;
}

}  // namespace detail

/// Instance i is drawn from its own substream, so the stream does not
/// depend on evaluation order or thread count. Candidate weights are
/// re-verified; 1000 consecutive rejections raise GeneratorStall.
inline Instance generate_instance(const SweepConfig& cfg, int index) {
  SplitMix64 rng = SplitMix64(cfg.seed).split(static_cast<std::uint64_t>(index));
  const bool symmetric = cfg.mode == RearrangeMode::Symmetric;
  Instance inst;
  inst.index = index;

  int rejected = 0;
  for (;;) {
    std::string name;
    Weight a = Weight::constant(1.0, {0.0, cfg.value_max});
    bool want_pass = true;
    switch (cfg.family) {
      case WeightFamily::Admissible:
        a = symmetric ? random_convex_weight(rng, cfg.value_max) : random_admissible_weight(rng, cfg.value_max);
        name = a.description();
        break;
      case WeightFamily::Convex:
        a = random_convex_weight(rng, cfg.value_max);
        name = a.description();
        break;
      case WeightFamily::Constant:
        a = Weight::constant(rng.uniform(0.1, 2.0), {0.0, cfg.value_max});
        name = "constant";
        break;
      case WeightFamily::Violating:
        a = detail::random_violating_weight(rng, cfg.value_max, cfg.mode, name);
        want_pass = false;
        break;
    }
    if (detail::passes(a, cfg.mode) == want_pass) {
      inst.a = a;
      inst.weight_family = name;
      break;
    }
    if (++rejected >= kGeneratorStallLimit) {
      throw Error(ErrorCode::GeneratorStall, "instance " + std::to_string(index) + ": 1000 candidates rejected");
    }
  }

  if (cfg.family == WeightFamily::Violating) {
    if (auto c = detail::constructed_instance(rng, inst.a, inst.weight_family, cfg.mode)) {
      c->index = index;
      c->a = inst.a;
      c->weight_family = inst.weight_family;
      return *c;
    }
  }
  inst.u = symmetric ? random_pl_equal_ends(rng, cfg.min_breakpoints, cfg.max_breakpoints, cfg.value_max,
                                            cfg.plateau_probability)
                     : random_pl(rng, cfg.min_breakpoints, cfg.max_breakpoints, cfg.value_max,
                                 cfg.plateau_probability);
  inst.F = random_integrand(rng, inst.integrand_family);
  return inst;
}

inline std::vector<Instance> generate_instances(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int i = 0; i < cfg.count; ++i) out.push_back(generate_instance(cfg, i));
  return out;
}

struct InstanceResult {
  int index = 0;
  std::string weight;
  std::string weight_family;
  std::string integrand;
  std::string integrand_family;
  std::optional<std::string> construction;
  std::string u;  ///< pl: literal
  double I_u = 0.0;
  double I_rearranged = 0.0;
  double gap = 0.0;
  double quad_err = 0.0;
  bool guaranteed = false;
  bool failure = false;    ///< admissible instance with gap < -(quad_err + tol)
  bool confirmed = false;  ///< constructed instance with gap < 0
  std::optional<std::string> error;
};

struct SweepReport {
  SweepConfig config;
  std::vector<InstanceResult> results;
  int failures = 0;
  int errors = 0;
  int constructed = 0;
  int confirmations = 0;
  double min_gap = 0.0;
  double max_quad_err = 0.0;

  bool ok() const { return failures == 0 && errors == 0 && confirmations == constructed; }
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RR_THREADS"); env != nullptr) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline InstanceResult run_instance(const SweepConfig& cfg, int index) {
  InstanceResult r;
  r.index = index;
  try {
    const Instance inst = generate_instance(cfg, index);
    r.weight = inst.a.description();
    r.weight_family = inst.weight_family;
    r.integrand = inst.F.description();
    r.integrand_family = inst.integrand_family;
    r.construction = inst.construction;
    r.u = format_pl(inst.u);
    VerifyOptions opts;
    opts.tol = cfg.quad_tol;
    const VerifyReport rep = verify_rearrangement(inst.F, inst.a, inst.u, cfg.mode, opts);
    r.I_u = rep.I_u;
    r.I_rearranged = rep.I_rearranged;
    r.gap = rep.gap;
    r.quad_err = rep.quad_err;
    r.guaranteed = rep.guaranteed;
    if (cfg.family != WeightFamily::Violating) r.failure = rep.gap < -(rep.quad_err + cfg.tol);
    if (inst.construction) r.confirmed = rep.gap < -10.0 * rep.quad_err && rep.gap < 0.0;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

/// Runs verify_rearrangement on every generated instance with a worker
/// pool. Results are stored by index, so the report does not depend on
/// scheduling.
inline SweepReport sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepReport rep;
  rep.config = cfg;
  rep.results.resize(static_cast<std::size_t>(cfg.count));
  const int nthreads = std::min(resolve_threads(cfg.threads), cfg.count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.count; i = next++) rep.results[static_cast<std::size_t>(i)] = run_instance(cfg, i);
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  bool first = true;
  for (const auto& r : rep.results) {
    if (r.error) {
      ++rep.errors;
      continue;
    }
    if (r.failure) ++rep.failures;
    if (r.construction) {
      ++rep.constructed;
      if (r.confirmed) ++rep.confirmations;
    }
    rep.min_gap = first ? r.gap : std::min(rep.min_gap, r.gap);
    rep.max_quad_err = std::max(rep.max_quad_err, r.quad_err);
    first = false;
  }
  return rep;
}

}  // namespace rearr
