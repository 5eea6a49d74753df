#include <gtest/gtest.h>

#include <cmath>

#include "shadowing/gluing.hpp"
#include "shadowing/parallel_gluing.hpp"
#include "shadowing/perturb.hpp"
#include "shadowing/verdicts.hpp"
#include "support.hpp"

namespace shadowing {
namespace {

using testing::kTol;

PseudoTrajectory shifted(const Trajectory& x, double d) {
  PseudoTrajectory y{x.t_min, {}, std::nullopt};
  for (const auto& p : x.points) y.points.push_back(SpacePoint::real(p.value() + d));
  return y;
}

TEST(CheckShadowing, IdenticalPasses) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2.0)}});
  const auto x = testing::orbit(g, std::vector<GeneratorId>(16, "g"), -8, SpacePoint::real(1e-3));
  for (auto kind : {ShadowKind::U, ShadowKind::A, ShadowKind::L}) {
    const auto v = check_shadowing(g.space(), x, as_pseudo(x), kind, 0.1);
    EXPECT_TRUE(v.pass) << to_string(kind);
    EXPECT_EQ(v.statistic, 0.0);
  }
}

TEST(CheckShadowing, ConstantOffset) {
  const GeneratorSet g(Space::real_line(), {{"f", affine(1, 1)}});
  const auto x = testing::orbit(g, std::vector<GeneratorId>(20, "f"), -10, SpacePoint::real(-10.0));
  const auto y = shifted(x, 0.2);
  const auto u = check_shadowing(g.space(), x, y, ShadowKind::U, 0.1);
  const auto a = check_shadowing(g.space(), x, y, ShadowKind::A, 0.1);
  EXPECT_FALSE(u.pass);
  EXPECT_FALSE(a.pass);
  EXPECT_NEAR(u.statistic, 0.2, kTol);
  EXPECT_NEAR(a.statistic, 0.2, kTol);
  EXPECT_TRUE(check_shadowing(g.space(), x, y, ShadowKind::U, 0.2 + kTol).pass);
}

TEST(CheckShadowing, SinglePerturbationIsLimitShadowed) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2.0)}});
  JoinSpec js;
  js.left_generator = js.right_generator = "g";
  js.u = SpacePoint::real(1.0);
  js.v = SpacePoint::real(1.1);
  const auto seg = build_join(g, js);
  const GluingOracle oracle{ApproxMode::strong, GlueStrategy::expanding_pick_forward, g, std::nullopt, {}};
  const auto r = glue_pair(oracle, seg.left, seg.right, RateFunction::geometric(0.5));
  const auto y = concatenate_pseudo(seg.left, seg.right);
  const auto v = check_shadowing(g.space(), r.x, y, ShadowKind::L, 0.0);
  EXPECT_TRUE(v.pass);
  EXPECT_LE(v.envelope_worst_ratio, 1.0 + kTol);
  // distances themselves against the closed form
  const auto d = pointwise_distances(g.space(), r.x.points, y.points);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Time t = y.t_min + static_cast<Time>(i);
    ASSERT_LE(d[i], 0.1 * std::ldexp(1.0, -static_cast<int>(std::abs(t))) + kTol) << "t=" << t;
  }
}

TEST(CheckShadowing, WindowMismatch) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2.0)}});
  const auto x = testing::orbit(g, {"g", "g"}, 0, SpacePoint::real(1.0));
  auto y = as_pseudo(x);
  y.t_min = 1;
  EXPECT_THROW((void)check_shadowing(g.space(), x, y, ShadowKind::U, 0.1), ValidationError);
}

TEST(CheckShadowingProperty, UniformImpliesAverage) {
  std::mt19937_64 rng(61);
  const GeneratorSet g(Space::real_line(), {{"f", affine(1, 1)}});
  for (int i = 0; i < 500; ++i) {
    const auto n = testing::size_in(rng, 2, 60);
    const Time t0 = -static_cast<Time>(testing::size_in(rng, 0, n));
    const auto x = testing::orbit(g, std::vector<GeneratorId>(n, "f"), t0, SpacePoint::real(0.0));
    PseudoTrajectory y{x.t_min, {}, std::nullopt};
    for (const auto& p : x.points) y.points.push_back(SpacePoint::real(p.value() + testing::uniform(rng, -0.3, 0.3)));
    const double delta = testing::uniform(rng, 0.01, 0.3);
    const auto u = check_shadowing(g.space(), x, y, ShadowKind::U, delta);
    const auto a = check_shadowing(g.space(), x, y, ShadowKind::A, delta);
    ASSERT_LE(a.statistic, u.statistic + kTol);
    ASSERT_TRUE(!u.pass || a.pass);
  }
}

TEST(Falsify, ShiftLowerBoundIsHalfTheDrift) {
  const GeneratorSet g(Space::real_line(), {{"x+1", psi(1, 1, 1, 1)}});
  PseudoTrajectory y{0, {}, std::nullopt};
  for (int t = 0; t <= 100; ++t) y.points.push_back(SpacePoint::real(1.0 + 1.1 * t));
  FalsifyBudget b;
  b.grid_radius = 10.0;
  const auto w = falsify_shadowing(g, y, 1.0, b);
  // |x0 - y0 + 0.1 n| over n = 0..100 is minimised at x0 - y0 = -5
  EXPECT_NEAR(w.lower_bound, 5.0, 1e-6);
  EXPECT_TRUE(w.claim);
  EXPECT_TRUE(w.conclusive);
}

TEST(Falsify, SignMismatchedHalvesOnPsi) {
  const GeneratorSet g(Space::real_line(), {{"psi", psi(0.5, 2, 0, 0)}});
  PseudoTrajectory y{-20, {}, std::nullopt};
  const double eps = 0.01;
  for (Time t = -20; t <= 20; ++t) {
    y.points.push_back(SpacePoint::real(t <= 0 ? -eps * std::ldexp(1.0, static_cast<int>(-t))
                                                : eps * std::ldexp(1.0, static_cast<int>(t - 1))));
  }
  const auto w = falsify_shadowing(g, y, 0.5);
  EXPECT_TRUE(w.claim) << w.diagnostics;
  EXPECT_GT(w.lower_bound, 0.5);
}

TEST(Falsify, TwoGeneratorMismatch) {
  const GeneratorSet both(Space::real_line(), {{"2x", affine(2.0)}, {"x/2", affine(0.5)}});
  const double v = 1.0 + std::sqrt(2.0) * 1e-2;
  PseudoTrajectory y{-6, {}, std::nullopt};
  for (Time t = -6; t <= 6; ++t) {
    y.points.push_back(SpacePoint::real(t <= -1 ? std::ldexp(1.0, static_cast<int>(-t))
                                                : v * std::ldexp(1.0, static_cast<int>(t))));
  }
  const auto w = falsify_shadowing(both, y, 1e-2);
  EXPECT_TRUE(w.claim);
  EXPECT_GT(w.lower_bound, 1e-2);
  ASSERT_TRUE(w.best.has_value());
  EXPECT_TRUE(is_valid_trajectory(both, *w.best));
}

TEST(Falsify, BudgetExhaustedIsNeverAClaim) {
  const GeneratorSet both(Space::real_line(), {{"2x", affine(2.0)}, {"x/2", affine(0.5)}});
  PseudoTrajectory y{0, {}, std::nullopt};
  for (int t = 0; t <= 20; ++t) y.points.push_back(SpacePoint::real(100.0 * t));
  FalsifyBudget b;
  b.word_length = 12;
  const auto w = falsify_shadowing(both, y, 1e-3, b);
  EXPECT_FALSE(w.conclusive);
  EXPECT_FALSE(w.claim);
  EXPECT_FALSE(w.diagnostics.empty());
}

TEST(FalsifyProperty, LowerBoundMonotoneInBudget) {
  std::mt19937_64 rng(62);
  const GeneratorSet both(Space::real_line(), {{"2x", affine(2.0)}, {"x/2", affine(0.5)}});
  for (int i = 0; i < 25; ++i) {
    PseudoTrajectory y{0, {}, std::nullopt};
    const auto n = testing::size_in(rng, 2, 6);
    double p = testing::uniform(rng, 0.5, 2.0);
    for (std::size_t k = 0; k <= n; ++k) {
      y.points.push_back(SpacePoint::real(p));
      p = ((rng() & 1U) != 0U ? 2.0 : 0.5) * p + testing::uniform(rng, -0.05, 0.05);
    }
    FalsifyBudget small;
    small.grid_spacing = 1e-2;
    small.grid_radius = 0.05;
    FalsifyBudget large = small;
    large.grid_radius = 0.2;  // same spacing: a superset of starts
    const auto a = falsify_shadowing(both, y, 1e-2, small);
    const auto b = falsify_shadowing(both, y, 1e-2, large);
    ASSERT_GE(a.candidates, 1U);
    ASSERT_LE(b.lower_bound, a.lower_bound + kTol);
    ASSERT_GE(b.candidates, a.candidates);
  }
}

TEST(FalsifyProperty, ShadowablePsiIsNotClaimed) {
  std::mt19937_64 rng(63);
  for (int i = 0; i < 10; ++i) {
    const double a = testing::uniform(rng, 2.0, 3.0);
    const double b = testing::uniform(rng, 2.0, 3.0);
    const GeneratorSet g(Space::real_line(), {{"psi", psi(a, b, 0, 0)}});
    PerturbSpec spec;
    spec.model = UniformModel{1e-3};
    spec.t_min = -10;
    spec.t_max = 10;
    spec.start = SpacePoint::real(testing::uniform(rng, -1.0, 1.0));
    spec.direction = BuildDirection::backward;
    const auto y = make_pseudo(g, spec, rng);
    const auto phi = RateFunction::geometric(1.0 / std::min(a, b));
    const double delta = 1e-3 * phi_sum(phi) * std::exp(phi_sum(phi));
    const auto w = falsify_shadowing(g, y, delta);
    ASSERT_FALSE(w.claim) << "a=" << a << " b=" << b << " lb=" << w.lower_bound;
  }
}

}  // namespace
}  // namespace shadowing
