#include "dpsp/accountant.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace {

using dpsp::Algorithm;
using dpsp::basic_compose;
using dpsp::calibrate_bounded;
using dpsp::calibrate_unbounded;
using dpsp::kInfCost;
using dpsp::Mode;
using dpsp::predict_error_bound;
using dpsp::PrivacyBudget;
using dpsp::rescale_delta_for_bounded;
using dpsp::s_block_cost;
using dpsp::strong_compose;

// Frozen reference values were computed with an independent 50-digit
// arbitrary-precision evaluation of the closed forms, rounded to the nearest
// double.

TEST(BasicCompose, AddsComponentwise) {
  auto t = basic_compose({{0.1, 0.0}, {0.2, 1e-6}});
  EXPECT_DOUBLE_EQ(t.epsilon, 0.30000000000000004);
  EXPECT_DOUBLE_EQ(t.delta, 1e-6);
  auto z = basic_compose({});
  EXPECT_EQ(z.epsilon, 0.0);
  EXPECT_EQ(z.delta, 0.0);
  std::vector<PrivacyBudget> parts(10, {0.05, 1e-7});
  auto k = basic_compose(parts);
  EXPECT_NEAR(k.epsilon, 0.5, 1e-14);
  EXPECT_NEAR(k.delta, 1e-6, 1e-20);
  EXPECT_THROW(basic_compose({{-0.1, 0.0}}), std::invalid_argument);
}

TEST(BasicCompose, PermutationInvariantAndAssociative) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  std::vector<PrivacyBudget> parts;
  for (int i = 0; i < 12; ++i) parts.push_back({u(rng), u(rng) * 1e-6});
  auto total = basic_compose(parts);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::shuffle(parts.begin(), parts.end(), rng);
    auto again = basic_compose(parts);
    EXPECT_NEAR(again.epsilon, total.epsilon, 1e-12);
    EXPECT_NEAR(again.delta, total.delta, total.delta * 1e-12);
  }
  std::vector<PrivacyBudget> head(parts.begin(), parts.begin() + 5);
  std::vector<PrivacyBudget> tail(parts.begin() + 5, parts.end());
  auto nested = basic_compose({basic_compose(head), basic_compose(tail)});
  EXPECT_NEAR(nested.epsilon, total.epsilon, 1e-12);
}

TEST(StrongCompose, FrozenValues) {
  auto one = strong_compose(1, 0.1, 0.0, 1e-6);
  EXPECT_NEAR(one.epsilon, 0.536169268783258, 1e-12);
  EXPECT_DOUBLE_EQ(one.delta, 1e-6);
  auto hundred = strong_compose(100, 0.01, 0.0, 1e-6);
  EXPECT_NEAR(hundred.epsilon, 0.5357023440598613, 1e-12);
  EXPECT_DOUBLE_EQ(hundred.delta, 1e-6);
  auto with_delta = strong_compose(50, 0.02, 1e-9, 1e-7);
  EXPECT_NEAR(with_delta.delta, 50 * 1e-9 + 1e-7, 1e-20);
  auto zero_eps = strong_compose(10, 0.0, 1e-8, 1e-6);
  EXPECT_EQ(zero_eps.epsilon, 0.0);
}

TEST(StrongCompose, DominatesSingleReleaseAndValidates) {
  for (double eps : {0.001, 0.01, 0.1, 0.5, 1.0})
    EXPECT_GE(strong_compose(1, eps, 0.0, 1e-6).epsilon, eps);
  EXPECT_THROW(strong_compose(0, 0.1, 0.0, 1e-6), std::invalid_argument);
  EXPECT_THROW(strong_compose(5, 0.1, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(strong_compose(5, 0.1, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(strong_compose(5, -0.1, 0.0, 1e-6), std::invalid_argument);
}

TEST(SBlockCost, ModesAndEdgeCases) {
  auto none = s_block_cost(0, 5.0, Mode::pure, 0.0);
  EXPECT_EQ(none.epsilon, 0.0);
  auto pure = s_block_cost(4900, 9800.0, Mode::pure, 0.0);
  EXPECT_NEAR(pure.epsilon, 0.5, 1e-12);
  EXPECT_EQ(pure.delta, 0.0);
  auto approx = s_block_cost(100, 200.0, Mode::approx, 1e-6);
  auto direct = strong_compose(100, 1.0 / 200.0, 0.0, 1e-6);
  EXPECT_DOUBLE_EQ(approx.epsilon, direct.epsilon);
  EXPECT_DOUBLE_EQ(approx.delta, direct.delta);
  auto degenerate = s_block_cost(10, 0.0, Mode::pure, 0.0);
  EXPECT_EQ(degenerate.epsilon, kInfCost);
}

TEST(BudgetValidate, Ranges) {
  EXPECT_NO_THROW(dpsp::validate(PrivacyBudget{1.0, 0.1}));
  EXPECT_THROW(dpsp::validate(PrivacyBudget{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(dpsp::validate(PrivacyBudget{1.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(dpsp::validate(PrivacyBudget{0.5, 0.2}), std::invalid_argument);
  EXPECT_THROW(dpsp::validate(PrivacyBudget{0.5, -1e-9}), std::invalid_argument);
}

TEST(CalibrateUnbounded, PureClosedFormAtThousandVertices) {
  auto p = calibrate_unbounded(1000, {1.0, 0.0}, Mode::pure);
  EXPECT_EQ(p.hitting_set_size, 70u);
  EXPECT_NEAR(p.noise_scale_s, 9800.0, 1e-9);
  EXPECT_DOUBLE_EQ(p.edge_noise_scale, 2.0);
  EXPECT_EQ(p.hop_radius, 987u);
  // L(L-1)/2 noisy pairs at scale 2 L^2 / eps cost L(L-1)/(2 * 2 L^2) < eps/2,
  // so the formula scale already beats the half-budget floor here.
  auto cost = s_block_cost(70 * 69 / 2, p.noise_scale_s, Mode::pure, 0.0);
  EXPECT_NEAR(cost.epsilon, 2415.0 / 9800.0, 1e-15);
  auto audit = dpsp::audit_unbounded(p, {1.0, 0.0});
  EXPECT_TRUE(audit.within_budget);
  EXPECT_NEAR(audit.total_epsilon, 0.5 + 2415.0 / 9800.0, 1e-12);
}

TEST(CalibrateUnbounded, ApproxClosedFormAtThousandVertices) {
  auto p = calibrate_unbounded(1000, {1.0, 1e-6}, Mode::approx);
  EXPECT_EQ(p.hitting_set_size, 219u);
  EXPECT_NEAR(p.noise_scale_s, 2302.3565351535362, 2302.3565351535362 * 1e-12);
  EXPECT_EQ(p.hop_radius, 316u);
  auto audit = dpsp::audit_unbounded(p, {1.0, 1e-6});
  EXPECT_TRUE(audit.within_budget);
}

TEST(CalibrateUnbounded, SmallGraphClampsAndErrors) {
  auto p = calibrate_unbounded(2, {0.5, 0.0}, Mode::pure);
  EXPECT_GE(p.hitting_set_size, 1u);
  EXPECT_LE(p.hitting_set_size, 2u);
  EXPECT_EQ(p.hop_radius, 1u);
  auto one = calibrate_unbounded(1, {0.5, 0.0}, Mode::pure);
  EXPECT_EQ(one.hitting_set_size, 1u);
  EXPECT_THROW(calibrate_unbounded(0, {0.5, 0.0}, Mode::pure), std::invalid_argument);
  EXPECT_THROW(calibrate_unbounded(10, {0.5, 0.0}, Mode::approx), std::invalid_argument);
  EXPECT_THROW(calibrate_unbounded(10, {0.5, 1e-6}, Mode::pure), std::invalid_argument);
  EXPECT_THROW(calibrate_unbounded(10, {0.5, 1e-6}, Mode::approx, -1.0), std::invalid_argument);
}

TEST(CalibrateUnbounded, AuditFitsBudgetAcrossGrid) {
  for (std::uint64_t n : {2ull, 5ull, 37ull, 400ull, 5000ull}) {
    for (double eps : {0.05, 0.3, 1.0}) {
      auto pp = calibrate_unbounded(n, {eps, 0.0}, Mode::pure);
      EXPECT_TRUE(dpsp::audit_unbounded(pp, {eps, 0.0}).within_budget)
          << "pure n=" << n << " eps=" << eps;
      auto pa = calibrate_unbounded(n, {eps, 1e-7}, Mode::approx);
      EXPECT_TRUE(dpsp::audit_unbounded(pa, {eps, 1e-7}).within_budget)
          << "approx n=" << n << " eps=" << eps;
    }
  }
}

TEST(CalibrateUnbounded, AuditFloorKicksInForTinyConstants) {
  // Deliberately small c_t would underprice the s-block; the calibrated scale
  // must never admit a cost above budget.
  for (double ct : {1e-6, 1e-3, 0.1}) {
    auto p = calibrate_unbounded(500, {1.0, 0.0}, Mode::pure, 1.0, ct);
    auto audit = dpsp::audit_unbounded(p, {1.0, 0.0});
    EXPECT_TRUE(audit.within_budget) << "c_t=" << ct;
    auto pa = calibrate_unbounded(500, {1.0, 1e-6}, Mode::approx, 1.0, ct);
    auto audita = dpsp::audit_unbounded(pa, {1.0, 1e-6});
    EXPECT_TRUE(audita.within_budget) << "approx c_t=" << ct;
  }
}

TEST(ParamsValidate, RejectsOutOfRange) {
  dpsp::UnboundedParams p = calibrate_unbounded(100, {1.0, 0.0}, Mode::pure);
  EXPECT_NO_THROW(dpsp::validate(p, 100));
  auto bad = p;
  bad.hitting_set_size = 0;
  EXPECT_THROW(dpsp::validate(bad, 100), std::invalid_argument);
  bad = p;
  bad.hitting_set_size = 101;
  EXPECT_THROW(dpsp::validate(bad, 100), std::invalid_argument);
  bad = p;
  bad.hop_radius = 0;
  EXPECT_THROW(dpsp::validate(bad, 100), std::invalid_argument);
  bad = p;
  bad.noise_scale_s = -1.0;
  EXPECT_THROW(dpsp::validate(bad, 100), std::invalid_argument);
}

TEST(IterationCount, DefaultsAndReferenceConstants) {
  EXPECT_EQ(dpsp::default_iteration_count(2, false), 3u);
  EXPECT_EQ(dpsp::default_iteration_count(1000, false), 7u);
  auto k = dpsp::default_iteration_count(10000, false);
  EXPECT_EQ(k, 11u);  // ceil(ln 1e4) = 10, bumped to the next odd value
  EXPECT_EQ(k % 2, 1u);
  EXPECT_EQ(dpsp::default_iteration_count(1000, true), 691u);  // ceil(100 ln 1000)
}

TEST(CalibrateBounded, FrozenShapesAtTenThousandVertices) {
  PrivacyBudget b{1.0, 1e-6};
  auto pa = calibrate_bounded(10000, 1.0, b, Mode::approx);
  EXPECT_NEAR(pa.ball_size_cap_raw, 220.36658957355436, 220.0 * 1e-12);
  EXPECT_EQ(pa.ball_size_cap, 221u);
  EXPECT_NEAR(pa.peel_radius_mean, 45.378929806699134, 45.0 * 1e-12);
  EXPECT_EQ(pa.hitting_set_size, 10000u);  // 100 ln n * n / cap exceeds n here
  EXPECT_EQ(pa.iterations, 11u);
  EXPECT_DOUBLE_EQ(pa.red_scale, 33.0);
  EXPECT_EQ(pa.blue_budget, 1u);
  EXPECT_GE(pa.green_budget, 1u);
  EXPECT_EQ(pa.red_budget,
            static_cast<std::uint64_t>(std::ceil(11.0 * pa.peel_radius_mean)) + pa.green_budget);

  auto pp = calibrate_bounded(10000, 1.0, {1.0, 0.0}, Mode::pure);
  EXPECT_NEAR(pp.ball_size_cap_raw, 753.1723609204066, 753.0 * 1e-12);
  EXPECT_EQ(pp.ball_size_cap, 754u);
  EXPECT_NEAR(pp.peel_radius_mean, 176.2833322234537, 176.0 * 1e-12);
}

TEST(CalibrateBounded, EffectiveWeightBoundNeverBelowInverseEpsilon) {
  // A' = max(A, 1/eps); with A = 0.1 and eps = 0.5 the shapes must match a
  // direct call with A' = 2 (the weight bound enters only through x).
  auto low = calibrate_bounded(5000, 0.1, {0.5, 1e-6}, Mode::approx);
  auto eff = calibrate_bounded(5000, 2.0, {0.5, 1e-6}, Mode::approx);
  EXPECT_DOUBLE_EQ(low.ball_size_cap_raw, eff.ball_size_cap_raw);
  EXPECT_DOUBLE_EQ(low.peel_radius_mean, eff.peel_radius_mean);
}

TEST(CalibrateBounded, OverridesAndErrors) {
  auto k5 = calibrate_bounded(300, 1.0, {1.0, 1e-6}, Mode::approx, 5);
  EXPECT_EQ(k5.iterations, 5u);
  auto reference = calibrate_bounded(300, 1.0, {1.0, 1e-6}, Mode::approx, 0, true);
  EXPECT_EQ(reference.iterations, dpsp::default_iteration_count(300, true));
  EXPECT_THROW(calibrate_bounded(0, 1.0, {1.0, 1e-6}, Mode::approx), std::invalid_argument);
  EXPECT_THROW(calibrate_bounded(10, 0.0, {1.0, 1e-6}, Mode::approx), std::invalid_argument);
  EXPECT_THROW(calibrate_bounded(10, 1.0, {0.0, 1e-6}, Mode::approx), std::invalid_argument);
  EXPECT_THROW(calibrate_bounded(10, 1.0, {1.0, 0.0}, Mode::approx), std::invalid_argument);
}

TEST(PeelHopRadius, ClosedForm) {
  EXPECT_NEAR(dpsp::peel_hop_radius(2.0, 1000), 200.0 * 6.907755278982137, 1e-9);
  EXPECT_EQ(dpsp::peel_hop_radius(3.0, 1), 0.0);  // ln 1 = 0
  EXPECT_THROW(dpsp::peel_hop_radius(1.0, 0), std::invalid_argument);
}

TEST(RescaleDelta, ClosedFormAndInverse) {
  EXPECT_NEAR(rescale_delta_for_bounded(3e-4, 10), 1e-6, 1e-21);
  EXPECT_NEAR(rescale_delta_for_bounded(0.03, 100), 1e-6, 1e-21);
  double d = 7.7e-5;
  EXPECT_DOUBLE_EQ(rescale_delta_for_bounded(d, 1), d / 3.0);
  EXPECT_EQ(rescale_delta_for_bounded(0.0, 50), 0.0);
  // Scaling back up reproduces the target within a couple of roundings.
  double target = 0.0001220703125;
  double per = rescale_delta_for_bounded(target, 4);
  EXPECT_NEAR(per * 48.0, target, target * 1e-15);
  EXPECT_THROW(rescale_delta_for_bounded(-1e-9, 3), std::invalid_argument);
  EXPECT_THROW(rescale_delta_for_bounded(1e-6, 0), std::invalid_argument);
}

TEST(PredictErrorBound, FrozenValues) {
  PrivacyBudget approx_b{1.0, 1e-6};
  PrivacyBudget pure_b{1.0, 0.0};
  EXPECT_NEAR(predict_error_bound(10000, {}, approx_b, Algorithm::unbounded, Mode::approx),
              31530.788367773104, 31530.0 * 1e-12);
  EXPECT_NEAR(predict_error_bound(10000, {}, pure_b, Algorithm::unbounded, Mode::pure),
              362655.0310648461, 362655.0 * 1e-12);
  EXPECT_NEAR(predict_error_bound(10000, 1.0, approx_b, Algorithm::bounded, Mode::approx),
              337.33990220955866, 337.0 * 1e-12);
  EXPECT_NEAR(predict_error_bound(10000, 1.0, pure_b, Algorithm::bounded, Mode::pure),
              352.5666644469074, 352.0 * 1e-12);
}

TEST(PredictErrorBound, MonotonicityAndErrors) {
  PrivacyBudget b{0.5, 1e-6};
  double prev = 0.0;
  for (std::uint64_t n : {100ull, 1000ull, 10000ull, 100000ull}) {
    double cur = predict_error_bound(n, 2.0, b, Algorithm::bounded, Mode::approx);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
  EXPECT_LT(predict_error_bound(1000, 1.0, b, Algorithm::bounded, Mode::approx),
            predict_error_bound(1000, 5.0, b, Algorithm::bounded, Mode::approx));
  // Halving epsilon at least doubles the pure unbounded prediction (1/eps law).
  double full = predict_error_bound(1000, {}, {1.0, 0.0}, Algorithm::unbounded, Mode::pure);
  double half = predict_error_bound(1000, {}, {0.5, 0.0}, Algorithm::unbounded, Mode::pure);
  EXPECT_NEAR(half, 2.0 * full, 2.0 * full * 1e-12);
  EXPECT_THROW(predict_error_bound(0, {}, b, Algorithm::unbounded, Mode::approx),
               std::invalid_argument);
  EXPECT_THROW(predict_error_bound(10, {}, b, Algorithm::bounded, Mode::approx),
               std::invalid_argument);
  EXPECT_THROW(predict_error_bound(10, 1.0, {1.0, 0.0}, Algorithm::bounded, Mode::approx),
               std::invalid_argument);
}

}  // namespace
