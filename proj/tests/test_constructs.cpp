#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rearr/constructs.hpp"
#include "rearr/functional.hpp"

using namespace rearr;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

CounterexampleSpec plateau(double s, double t, double eps, double delta, double vbar, std::optional<double> A = {}) {
  return CounterexampleSpec{s, t, eps, delta, vbar, A, CounterexampleKind::Nonconcavity};
}

void expect_pl(const PiecewiseLinear& got, std::vector<double> xs, std::vector<double> ys) {
  ASSERT_EQ(got.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_NEAR(got.xs()[i], xs[i], 1e-12) << i;
    EXPECT_NEAR(got.ys()[i], ys[i], 1e-12) << i;
  }
}

}  // namespace

TEST(Asymmetry, OddWeightGapMatchesClosedForm) {
  const Weight a = Weight::from_expr("1 + x/2");
  const auto ce = build_asymmetry_counterexample(a, -0.5, 0.0, 0.1);
  expect_pl(monotone_rearrange(ce.u), {ce.rearranged.xs().begin(), ce.rearranged.xs().end()},
            {ce.rearranged.ys().begin(), ce.rearranged.ys().end()});
  const auto r = verify_rearrangement(ce.F, a, ce.u, RearrangeMode::Monotone);
  const double closed = oracle::simpson([](double x) { return x; }, -0.6, -0.5, 100);
  EXPECT_NEAR(closed, -0.055, 1e-15);
  EXPECT_NEAR(r.gap, closed, 1e-6);
  EXPECT_LT(r.gap, -10 * r.quad_err);
}

TEST(Asymmetry, EvenWeightHasNoWitness) {
  EXPECT_EQ(code_of([] { build_asymmetry_counterexample(Weight::from_expr("1 - abs(x)"), -0.5, 0.0, 0.1); }),
            ErrorCode::PreconditionFailed);
}

TEST(Asymmetry, OtherOrientation) {
  const Weight a = Weight::from_expr("1 - x/4");
  const auto ce = build_asymmetry_counterexample(a, 0.5, 0.0, 0.1);
  const auto r = verify_rearrangement(ce.F, a, ce.u, RearrangeMode::Monotone);
  EXPECT_LT(r.gap, -10 * r.quad_err);
  EXPECT_NEAR(r.gap, oracle::simpson([](double x) { return -x / 2; }, 0.4, 0.5, 100), 1e-9);
}

TEST(PlateauPair, HalfSlopeRamp) {
  const auto p = build_plateau_pair(plateau(-0.5, 0.5, 0.2, 0.0, 1.0));
  expect_pl(p.u_star, {-1.0, 0.0, 0.4, 1.0}, {1.0, 1.0, 1.2, 1.2});
  EXPECT_NEAR(p.u_star(0.2), 1.0 + (0.2 - 0.0) / 2, 1e-15);
}

TEST(PlateauPair, EmptyMiddlePlateau) {
  const auto p = build_plateau_pair(plateau(0.4, 0.6, 0.1, 0.1, 0.0));
  expect_pl(p.u, {-1.0, 0.4, 0.5, 0.6, 1.0}, {0.0, 0.0, 0.1, 0.0, 0.0});
  expect_pl(p.u_star, {-1.0, 0.8, 1.0}, {0.0, 0.0, 0.1});
}

TEST(PlateauPair, MatchesMonotoneRearrangement) {
  for (double s : {-0.9, -0.5, 0.0, 0.3}) {
    for (double eps : {0.01, 0.05, 0.1}) {
      for (double vbar : {0.0, 0.7}) {
        const double t = std::min(1.0, s + 0.5);
        const auto p = build_plateau_pair(plateau(s, t, eps, 0.0, vbar));
        const auto r = monotone_rearrange(p.u);
        expect_pl(r, {p.u_star.xs().begin(), p.u_star.xs().end()}, {p.u_star.ys().begin(), p.u_star.ys().end()});
      }
    }
  }
}

TEST(PlateauPair, InfeasibleGeometry) {
  EXPECT_EQ(code_of([] { build_plateau_pair(plateau(0.4, 0.6, 0.11, 0.1, 0.0)); }), ErrorCode::InfeasibleSpec);
  EXPECT_EQ(code_of([] { build_plateau_pair(plateau(0.6, 0.4, 0.05, 0.1, 0.0)); }), ErrorCode::InfeasibleSpec);
  EXPECT_EQ(code_of([] { build_plateau_pair(plateau(-1.5, 0.4, 0.05, 0.1, 0.0)); }), ErrorCode::InfeasibleSpec);
}

TEST(CounterexampleAlpha, Values) {
  EXPECT_EQ(code_of([] { counterexample_alpha(1.0, 1.0); }), ErrorCode::DegenerateBound);
  EXPECT_NEAR(counterexample_alpha(1.0, 0.5), 1.0 / std::log2(4.0 / 3.0), 1e-15);
  EXPECT_NEAR(counterexample_alpha(1.0, 0.5), 2.4094, 1e-4);
  EXPECT_NEAR(counterexample_alpha(1.0, 0.1), 1.0 / std::log2(20.0 / 11.0), 1e-15);
  EXPECT_NEAR(counterexample_alpha(1.0, 0.1), 1.1594, 1e-4);
}

TEST(Nonconcavity, SquareWeightStrictViolation) {
  const Weight a = Weight::from_expr("x^2");
  for (double y = 0.0; y <= 0.1; y += 0.01) {
    EXPECT_LT(std::pow(0.4 + y, 2) + std::pow(0.6 - y, 2) + 0.1, std::pow(0.8 + 2 * y, 2));
  }
  const auto ce = build_nonconcavity_counterexample(a, plateau(0.4, 0.6, 0.1, 0.1, 0.0, 1.0), 1.15);
  EXPECT_DOUBLE_EQ(ce.A, 1.0);
  EXPECT_NEAR(ce.alpha_max, 1.1594, 1e-4);
  const auto r = verify_rearrangement(ce.F, a, ce.u, RearrangeMode::Monotone);
  EXPECT_LT(r.gap, -10 * r.quad_err);
  const auto F = [](double, double p) { return std::pow(p, 1.15); };
  const auto wf = [&](double x, double v) { return a(x, v); };
  const double lhs = oracle::functional({ce.u.xs().begin(), ce.u.xs().end()}, {ce.u.ys().begin(), ce.u.ys().end()},
                                        wf, F);
  const double rhs = oracle::functional({ce.rearranged.xs().begin(), ce.rearranged.xs().end()},
                                        {ce.rearranged.ys().begin(), ce.rearranged.ys().end()}, wf, F);
  EXPECT_NEAR(r.gap, lhs - rhs, 1e-9);
}

TEST(Nonconcavity, AlphaRange) {
  const Weight a = Weight::from_expr("x^2");
  const auto spec = plateau(0.4, 0.6, 0.1, 0.1, 0.0, 1.0);
  EXPECT_EQ(code_of([&] { build_nonconcavity_counterexample(a, spec, 1.0); }), ErrorCode::AlphaOutOfRange);
  EXPECT_EQ(code_of([&] { build_nonconcavity_counterexample(a, spec, counterexample_alpha(1.0, 0.1) + 0.5); }),
            ErrorCode::AlphaOutOfRange);
}

TEST(Nonconcavity, AdmissibleWeightHasNoWitness) {
  EXPECT_EQ(code_of([] {
              build_nonconcavity_counterexample(Weight::from_expr("1 - abs(x)"), plateau(0.4, 0.6, 0.1, 0.1, 0.0),
                                                1.1);
            }),
            ErrorCode::PreconditionFailed);
}

TEST(Nonconcavity, EstimatedBoundIsUpperBound) {
  const Weight a = Weight::from_expr("x^2");
  const double A = weight_bound(a, {0.0, 0.1});
  EXPECT_GE(A, 1.0);
  // one x-cell at the edge rises by 1 - (1 - 2/512)^2
  EXPECT_NEAR(A, 1.0 + 0.5 * (1.0 - std::pow(1.0 - 2.0 / 512, 2)), 1e-12);
  EXPECT_GT(counterexample_alpha(A, 0.1), 1.15);
}

TEST(Symmetric, TentWeightGammaAndViolation) {
  const Weight a = Weight::from_expr("1 - abs(x)");
  for (double z = 0.0; z <= 0.05; z += 0.005) {
    EXPECT_LT(a(0.8 + z, z) + a(1.0 - z, z) + 0.2, a(-0.1 + z, z) + a(0.1 - z, z));
  }
  CounterexampleSpec spec{0.8, 1.0, 0.05, 0.1, 0.0, 1.0, CounterexampleKind::Nonconvexity};
  const auto ce = build_symmetric_counterexample(a, spec);
  EXPECT_NEAR(ce.gamma, (0.1 / 0.05) / std::pow(1.0 / 0.05, 2), 1e-15);
  EXPECT_NEAR(ce.gamma, 0.005, 1e-15);
  const auto r = verify_rearrangement(ce.F, a, ce.u, RearrangeMode::Symmetric);
  EXPECT_LT(r.gap, -10 * r.quad_err);
  expect_pl(r.rearranged, {ce.rearranged.xs().begin(), ce.rearranged.xs().end()},
            {ce.rearranged.ys().begin(), ce.rearranged.ys().end()});
}

TEST(Symmetric, ConvexWeightHasNoWitness) {
  CounterexampleSpec spec{0.8, 1.0, 0.05, 0.1, 0.0, 1.0, CounterexampleKind::Nonconvexity};
  EXPECT_EQ(code_of([&] { build_symmetric_counterexample(Weight::from_expr("x^2"), spec); }),
            ErrorCode::PreconditionFailed);
}

TEST(Symmetric, InfeasibleWidthAndLevel) {
  const Weight a = Weight::from_expr("1 - abs(x)");
  CounterexampleSpec wide{0.8, 1.0, 0.1, 0.1, 0.0, 1.0, CounterexampleKind::Nonconvexity};
  EXPECT_EQ(code_of([&] { build_symmetric_counterexample(a, wide); }), ErrorCode::InfeasibleSpec);
  CounterexampleSpec lifted{0.8, 1.0, 0.05, 0.1, 0.5, 1.0, CounterexampleKind::Nonconvexity};
  EXPECT_EQ(code_of([&] { build_symmetric_counterexample(a, lifted); }), ErrorCode::InfeasibleSpec);
}
