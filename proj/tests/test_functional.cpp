#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rearr/constructs.hpp"
#include "rearr/functional.hpp"
#include "rearr/harness.hpp"

using namespace rearr;

namespace {

PiecewiseLinear bump(double vbar, double s, double t, double eps) {
  return PiecewiseLinear({-1.0, s, s + eps, t - eps, t, 1.0}, {vbar, vbar, vbar + eps, vbar + eps, vbar, vbar});
}

double oracle_value(const Integrand& F, const Weight& a, const PiecewiseLinear& u) {
  return oracle::functional({u.xs().begin(), u.xs().end()}, {u.ys().begin(), u.ys().end()},
                            [&](double x, double v) { return a(x, v); }, [&](double v, double p) { return F(v, p); });
}

}  // namespace

TEST(Quadrature, PolynomialIsExact) {
  const auto r = integrate([](double x) { return x * x * x * x - 2 * x + 1; }, -1.0, 2.0, 1e-12, 1e-12);
  EXPECT_NEAR(r.value, 33.0 / 5.0 - 3.0 + 3.0, 1e-13);
  EXPECT_EQ(r.evaluations, 15);
}

TEST(Quadrature, SmoothAgainstClosedForm) {
  const auto r = integrate([](double x) { return std::exp(std::sin(3 * x)); }, 0.0, 2.0, 1e-12, 1e-12);
  EXPECT_NEAR(r.value, oracle::simpson([](double x) { return std::exp(std::sin(3 * x)); }, 0.0, 2.0, 200000), 1e-10);
  EXPECT_LE(r.error, 1e-10);
}

TEST(Quadrature, DivergentIntegrandIsNonConvergent) {
  try {
    integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10, 1e-10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergent);
  }
}

TEST(EvaluateFunctional, SquareOfUnitSlope) {
  const auto r = evaluate_functional(Integrand::power(2), Weight::constant(1.0), PiecewiseLinear({-1, 1}, {0, 2}));
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.baseline, 0.0);
}

TEST(EvaluateFunctional, LinearIntegrandIsVariation) {
  const auto u = bump(1.0, -0.5, 0.5, 0.2);
  const Weight one = Weight::constant(1.0, {0.0, 2.0});
  EXPECT_NEAR(evaluate_functional(Integrand::power(1), one, u).value, 0.4, 1e-12);
  EXPECT_NEAR(evaluate_functional(Integrand::power(1), one, monotone_rearrange(u)).value, 0.2, 1e-12);
}

TEST(EvaluateFunctional, TentWeightClosedForm) {
  const Weight a = Weight::from_expr("1 - abs(x)", {0.0, 2.0});
  const auto u = PiecewiseLinear({-1, 1}, {0, 2});
  const auto r = evaluate_functional(Integrand::power(2), a, u);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.value, oracle_value(Integrand::power(2), a, u), 1e-10);
}

TEST(EvaluateFunctional, MatchesSimpsonOnRandomInputs) {
  SplitMix64 rng(4);
  const Weight a = Weight::from_expr("(1 + v)*(2 - x^2)", {0.0, 2.0});
  const Integrand F = Integrand::from_expr("exp(v)*p^1.5");
  for (int i = 0; i < 10; ++i) {
    const auto u = random_pl(rng, 2, 12, 2.0, 0.3);
    const auto r = evaluate_functional(F, a, u, 1e-11);
    EXPECT_NEAR(r.value, oracle_value(F, a, u), 1e-8 * std::max(1.0, r.value)) << i;
  }
}

TEST(EvaluateFunctional, BaselineIsReported) {
  const Integrand F = Integrand::from_expr("1 + v + p");
  const auto u = bump(1.0, -0.5, 0.5, 0.2);
  const auto r = evaluate_functional(F, Weight::constant(1.0, {0.0, 2.0}), u);
  EXPECT_NEAR(r.baseline, 2.0 + pl_metrics(u).integral, 1e-12);
  EXPECT_NEAR(r.normalized(), 0.4, 1e-12);
}

TEST(EvaluateFunctional, RejectsNegativeInputAndBadTolerance) {
  EXPECT_THROW(evaluate_functional(Integrand::power(1), Weight::constant(1.0), PiecewiseLinear({-1, 1}, {-1, 1})),
               Error);
  EXPECT_THROW(
      evaluate_functional(Integrand::power(1), Weight::constant(1.0), PiecewiseLinear({-1, 1}, {0, 1}), 0.0),
      Error);
}

TEST(EvaluateFunctional, QuadratureConsistentWhenTolHalves) {
  SplitMix64 rng(12);
  const Weight a = Weight::from_expr("1 - abs(x)/2 + v*x^2", {0.0, 2.0});
  const Integrand F = Integrand::power(1.5);
  for (int i = 0; i < 10; ++i) {
    const auto u = random_pl(rng, 2, 20, 2.0, 0.3);
    double tol = 1e-4;
    auto prev = evaluate_functional(F, a, u, tol);
    for (int step = 0; step < 6; ++step) {
      tol /= 2;
      const auto cur = evaluate_functional(F, a, u, tol);
      EXPECT_LE(std::abs(cur.value - prev.value), prev.error + 1e-15) << i << " " << tol;
      prev = cur;
    }
  }
}

TEST(Verify, ClassicalCaseOnRandomFunctions) {
  SplitMix64 rng(21);
  const Weight one = Weight::constant(1.0, {0.0, 2.0});
  for (int i = 0; i < 50; ++i) {
    const auto u = random_pl(rng, 2, 40, 2.0, 0.3);
    const auto r = verify_rearrangement(Integrand::power(2), one, u, RearrangeMode::Monotone);
    EXPECT_GE(r.gap, -1e-9) << i;
    EXPECT_TRUE(r.holds);
    EXPECT_TRUE(r.guaranteed);
  }
}

TEST(Verify, TentWeightPlateauBump) {
  const auto r = verify_rearrangement(Integrand::power(1.5), Weight::from_expr("1 - abs(x)", {0.0, 2.0}),
                                      bump(1.0, -0.5, 0.5, 0.2), RearrangeMode::Monotone);
  EXPECT_GE(r.gap, -1e-8);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.guaranteed);
  ASSERT_TRUE(r.conditions.has_value());
  EXPECT_TRUE(r.conditions->admissible());
}

TEST(Verify, SquareWeightCounterexampleIsNegative) {
  CounterexampleSpec spec{0.4, 0.6, 0.1, 0.1, 0.0, 1.0, CounterexampleKind::Nonconcavity};
  const Weight a = Weight::from_expr("x^2");
  const auto ce = build_nonconcavity_counterexample(a, spec, 1.15);
  const auto r = verify_rearrangement(ce.F, a, ce.u, RearrangeMode::Monotone);
  EXPECT_LT(r.gap, 0.0);
  EXPECT_FALSE(r.guaranteed);
  EXPECT_FALSE(r.holds);
}

TEST(Verify, UncertifiedIntegrandDowngradesVerdict) {
  const auto r = verify_rearrangement(Integrand::from_expr("sqrt(p)"), Weight::constant(1.0, {0.0, 2.0}),
                                      bump(1.0, -0.5, 0.5, 0.2), RearrangeMode::Monotone);
  EXPECT_FALSE(r.certificate.ok());
  EXPECT_FALSE(r.guaranteed);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Verify, SymmetricModeWarnsOnUnequalEnds) {
  const auto r = verify_rearrangement(Integrand::power(2), Weight::from_expr("x^2", {0.0, 2.0}),
                                      PiecewiseLinear({-1, 1}, {0, 2}), RearrangeMode::Symmetric);
  EXPECT_FALSE(r.guaranteed);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Integrand, CertificatesForBuiltins) {
  EXPECT_TRUE(Integrand::power(1.0).certify().ok());
  EXPECT_TRUE(Integrand::power(2.7).certify().ok());
  EXPECT_TRUE(Integrand::quadratic(0.005).certify().ok());
  EXPECT_TRUE(Integrand::from_expr("(1+v)*p^2").certify().ok());
  EXPECT_FALSE(Integrand::from_expr("p - p^2").certify().ok());
  EXPECT_THROW(Integrand::power(0.5), Error);
  EXPECT_THROW(Integrand::quadratic(-1.0), Error);
  EXPECT_THROW(Integrand::from_expr("x*p"), Error);
}

TEST(Integrand, Descriptions) {
  EXPECT_EQ(Integrand::power(1.15).description(), "p^1.15");
  EXPECT_EQ(Integrand::quadratic(0.005).description(), "p+0.005*p^2");
}

// For even weights and a regular level, the convexity step in the proof of the
// monotone case: sum_k b_k F(a(y_k)/b_k) >= F(a(y*)/sum b_k) sum b_k, b_k = 1/|u'(y_k)|.
TEST(Verify, LevelwiseConvexityStep) {
  SplitMix64 rng(33);
  for (int i = 0; i < 30; ++i) {
    const Weight a = random_admissible_weight(rng);
    const auto u = random_pl(rng, 3, 20, 2.0, 0.0);
    const Integrand F = Integrand::power(rng.uniform(1.0, 3.0));
    for (const auto& w : level_windows(u)) {
      if (w.multiplicity() == 0 || w.hi - w.lo < 1e-6) continue;
      const double v = 0.5 * (w.lo + w.hi);
      double lhs = 0.0, sum_b = 0.0;
      for (const auto& br : w.branches) {
        const double b = std::abs(br.inverse_slope);
        lhs += b * F(v, a(br.at(v), v) / b);
        sum_b += b;
      }
      const double y = rearranged_preimage(u, v);
      const double rhs = F(v, a(y, v) / sum_b) * sum_b;
      EXPECT_GE(lhs, rhs - 1e-9 * std::max(1.0, rhs)) << i;
    }
  }
}
