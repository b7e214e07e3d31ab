#include <gtest/gtest.h>

#include <cmath>

#include "rearr/approx.hpp"
#include "rearr/harness.hpp"

using namespace rearr;

namespace {

// Right half rises through ramps of slope 6, 12, 24, 48 and falls back the
// same way; the left half is flat.
PiecewiseLinear graded_spike() {
  std::vector<double> xs{-1.0, 0.0, 0.3}, ys{0.2, 0.2, 0.2};
  const double slopes[] = {6, 12, 24, 48};
  const double rise = 0.05;
  for (double s : slopes) {
    xs.push_back(xs.back() + rise / s);
    ys.push_back(ys.back() + rise);
  }
  for (int i = 3; i >= 0; --i) {
    xs.push_back(xs.back() + rise / slopes[i]);
    ys.push_back(ys.back() - rise);
  }
  xs.push_back(1.0);
  ys.push_back(0.2);
  return PiecewiseLinear(xs, ys);
}

}  // namespace

TEST(LipschitzApproximate, GentleFunctionIsUnchanged) {
  const PiecewiseLinear u({-1.0, -0.3, 0.2, 1.0}, {0.5, 1.0, 0.8, 1.5});
  const auto st = lipschitz_approximate(u, 2.0, Side::Right);
  EXPECT_TRUE(st.runs.empty());
  ASSERT_EQ(st.u_h.size(), st.u_local.size());
  for (std::size_t i = 0; i < st.u_h.size(); ++i) {
    EXPECT_EQ(st.u_h.xs()[i], st.u_local.xs()[i]);
    EXPECT_EQ(st.u_h.ys()[i], st.u_local.ys()[i]);
  }
  const auto full = lipschitz_approximate_full(u, 2.0);
  for (double x = -1.0; x <= 1.0; x += 0.05) EXPECT_NEAR(full.u_h(x), u(x), 1e-15);
}

TEST(LipschitzApproximate, SingleSteepSegment) {
  const PiecewiseLinear u({-1.0, 0.3, 0.4, 1.0}, {0.0, 0.0, 1.0, 1.0});
  const auto st = lipschitz_approximate(u, 2.0, Side::Right);
  ASSERT_EQ(st.runs.size(), 1u);
  EXPECT_NEAR(st.runs[0].alpha, 0.1, 1e-15);
  EXPECT_NEAR(st.runs[0].beta, 1.0, 1e-15);
  EXPECT_NEAR(st.phi_slopes[1], 10.0, 1e-12);
  EXPECT_NEAR(st.phi(0.4) - st.phi(0.3), 1.0, 1e-12);
  EXPECT_NEAR(st.phi_image_measure(), 1.0, 1e-15);
  // image of the steep run is [0.3, 1.3]; on its part inside [0, 1] the slope is 1
  EXPECT_NEAR(st.u_h(0.3), 0.0, 1e-15);
  EXPECT_NEAR(st.u_h(0.65), 0.35, 1e-12);
  EXPECT_NEAR(st.u_h(1.0), 0.7, 1e-12);
  EXPECT_NEAR(st.u_h.slope(st.u_h.segment_of(0.5)), 1.0, 1e-12);
}

TEST(LipschitzApproximate, LeftSideMirrors) {
  const PiecewiseLinear u({-1.0, -0.4, -0.3, 1.0}, {1.0, 1.0, 0.0, 0.0});
  const auto st = lipschitz_approximate(u, 2.0, Side::Left);
  ASSERT_EQ(st.runs.size(), 1u);
  EXPECT_NEAR(st.u_h(1.0), 0.7, 1e-12);
  const auto full = lipschitz_approximate_full(u, 2.0);
  EXPECT_NEAR(full.u_h(-1.0), 0.7, 1e-12);
  EXPECT_NEAR(full.u_h(0.0), u(0.0), 1e-15);
}

TEST(LipschitzApproximate, AllSteepThrows) {
  try {
    lipschitz_approximate(PiecewiseLinear({-1.0, 1.0}, {0.0, 10.0}), 2.0, Side::Right);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThresholdTooSmall);
  }
}

TEST(LipschitzApproximate, InvariantsOnRandomFunctions) {
  SplitMix64 rng(17);
  int tested = 0;
  for (int i = 0; i < 80; ++i) {
    const auto u = random_pl(rng, 4, 40, 2.0, 0.3);
    for (double h : {2.0, 8.0, 32.0}) {
      for (Side side : {Side::Left, Side::Right}) {
        ApproxStage st;
        try {
          st = lipschitz_approximate(u, h, side);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::ThresholdTooSmall);
          continue;
        }
        ++tested;
        EXPECT_GE(st.min_phi_slope(), 1.0);
        EXPECT_LE(st.phi_integral(), (1.0 + st.sum_abs_beta()) * (1.0 + 1e-12));
        for (std::size_t j = 0; j + 1 < st.phi.size(); ++j) EXPECT_GT(st.phi.ys()[j + 1], st.phi.ys()[j]);
        double expected_image = 0.0;
        for (const auto& r : st.runs) expected_image += std::max(std::abs(r.beta), r.alpha);
        EXPECT_NEAR(st.phi_image_measure(), expected_image, 1e-15);
        EXPECT_DOUBLE_EQ(st.u_h(0.0), st.u_local(0.0));
        double kept = 1.0;
        for (std::size_t j = 0; j + 1 < st.u_local.size(); ++j) {
          const double s = std::abs(st.u_local.slope(j));
          if (s <= h) kept = std::max(kept, s);
        }
        for (std::size_t j = 0; j + 1 < st.u_h.size(); ++j) {
          EXPECT_LE(std::abs(st.u_h.slope(j)), kept * (1.0 + 1e-9) + 1e-9);
        }
        const auto sp = derivative_error_split(st);
        EXPECT_LE(l1_derivative_distance(st.u_h, st.u_local), sp.p1 + sp.p2 + sp.p3 + 1e-9);
      }
    }
  }
  EXPECT_GT(tested, 100);
}

TEST(ConvergenceReport, LipschitzInputRowsAreExact) {
  const PiecewiseLinear u({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.5});
  const auto rep = convergence_report(Integrand::power(2), Weight::from_expr("1 - abs(x)", {0, 1}), u,
                                      {4, 8, 16});
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& row : rep.rows) {
    EXPECT_DOUBLE_EQ(row.I, rep.rows[0].I);
    EXPECT_DOUBLE_EQ(row.l1, 0.0);
    EXPECT_DOUBLE_EQ(row.l1_derivative, 0.0);
    EXPECT_NEAR(row.I, rep.I_u, 1e-12);
  }
  EXPECT_TRUE(rep.weight_hypothesis);
}

TEST(ConvergenceReport, GradedSpikeConverges) {
  const auto u = graded_spike();
  const auto rep = convergence_report(Integrand::power(2), Weight::from_expr("1 - abs(x)", {0, 2}), u,
                                      {4, 8, 16, 32, 64});
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    EXPECT_LT(rep.rows[i].abs_diff, rep.rows[i - 1].abs_diff) << i;
    EXPECT_LT(rep.rows[i].l1_derivative, rep.rows[i - 1].l1_derivative) << i;
  }
  EXPECT_LT(rep.rows.back().rel_diff, 1e-2);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.phi_slope_ok);
    EXPECT_TRUE(row.phi_integral_ok);
  }
}

TEST(ConvergenceReport, IncreasingWeightRaisesFlag) {
  const auto u = graded_spike();
  const auto rep = convergence_report(Integrand::power(2), Weight::from_expr("1 + x^2", {0, 2}), u, {8, 16});
  EXPECT_FALSE(rep.weight_hypothesis);
  EXPECT_EQ(rep.rows.size(), 2u);
  EXPECT_GT(rep.rows[0].I, 0.0);
}
