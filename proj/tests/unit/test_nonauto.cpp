#include <gtest/gtest.h>

#include <cmath>

#include "shadowing/nonauto.hpp"
#include "support.hpp"

namespace shadowing {
namespace {

TEST(BranchTrajectory, ConstantDoubling) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2)}});
  const NonAutoSystem sys{BranchWord{-4, std::vector<GeneratorId>(8, "g")}, g};
  const auto b = branch_trajectory(sys, SpacePoint::real(1.0), 0);
  ASSERT_EQ(b.x.t_min, -4);
  for (Time t = -4; t <= 4; ++t) EXPECT_EQ(b.x.at(t).value(), std::ldexp(1.0, static_cast<int>(t)));
  EXPECT_FALSE(b.truncated_below.has_value());
}

TEST(BranchTrajectory, Alternating) {
  const GeneratorSet g(Space::real_line(), {{"2x", affine(2)}, {"x/2", affine(0.5)}});
  std::vector<GeneratorId> w;
  for (int i = 0; i < 8; ++i) w.push_back(i % 2 == 0 ? "2x" : "x/2");
  const NonAutoSystem sys{BranchWord{0, w}, g};
  const auto b = branch_trajectory(sys, SpacePoint::real(1.0), 0);
  EXPECT_EQ(testing::real_values(b.x.points), (std::vector<double>{1, 2, 1, 2, 1, 2, 1, 2, 1}));
  EXPECT_EQ(b.x.word, w);
}

TEST(BranchTrajectory, CyclicHistory) {
  const GeneratorSet g(Space::finite({1, 2, 3}), {{"g", cyclic_three()}, {"g^-1", inverse(cyclic_three())}});
  const NonAutoSystem sys{BranchWord{-3, std::vector<GeneratorId>(6, "g")}, g};
  const auto b = branch_trajectory(sys, SpacePoint::label(1), 0);
  std::vector<int> labels;
  for (const auto& p : b.x.points) labels.push_back(p.label_value());
  // g: 1 -> 3 -> 2 -> 1
  EXPECT_EQ(labels, (std::vector<int>{1, 3, 2, 1, 3, 2, 1}));
}

TEST(BranchTrajectory, TruncatedBackward) {
  const GeneratorSet g(Space::real_line(), {{"c", affine(0, 5)}});
  const NonAutoSystem sys{BranchWord{-3, std::vector<GeneratorId>(6, "c")}, g};
  const auto b = branch_trajectory(sys, SpacePoint::real(1.0), 0);
  ASSERT_TRUE(b.truncated_below.has_value());
  EXPECT_EQ(b.x.t_min, 0);
  EXPECT_EQ(b.x.points.back().value(), 5.0);
}

TEST(NonAutoSystem, Validation) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2)}});
  EXPECT_THROW(validate_system({BranchWord{0, {"g", "h"}}, g}), ValidationError);
  EXPECT_NO_THROW(validate_system({BranchWord{0, {"g", "g"}}, g}));
}

TEST(BranchCompare, DefaultJoinSplits) {
  const auto r = branch_vs_semigroup_report({});
  EXPECT_TRUE(r.semigroup_pass);
  EXPECT_FALSE(r.branch_pass);
  EXPECT_EQ(r.branch_exhaustive.size(), 3U);
  for (const auto& v : r.branch_exhaustive) EXPECT_FALSE(v.pass);
  EXPECT_NEAR(r.delta, 6.0 / 64.0, 1e-15);
}

TEST(BranchCompare, PhaseDecidesTheBranch) {
  // an all-g trajectory matches both halves exactly when v = g(u)
  const int g_of[] = {0, 3, 1, 2};
  for (int u = 1; u <= 3; ++u) {
    for (int v = 1; v <= 3; ++v) {
      BranchCompareSpec spec;
      spec.u = u;
      spec.v = v;
      const auto r = branch_vs_semigroup_report(spec);
      EXPECT_TRUE(r.semigroup_pass) << u << "," << v;
      EXPECT_EQ(r.branch_pass, v == g_of[u]) << u << "," << v;
    }
  }
}

TEST(BranchShadow, WordEqualsBranch) {
  std::mt19937_64 rng(81);
  const GeneratorSet g(Space::real_line(), {{"2x", affine(2)}, {"3x", affine(3)}});
  for (int i = 0; i < 20; ++i) {
    std::vector<GeneratorId> w(40);
    for (auto& id : w) id = (rng() & 1U) != 0U ? "2x" : "3x";
    const NonAutoSystem sys{BranchWord{-20, w}, g};
    const auto x = branch_trajectory(sys, SpacePoint::real(testing::uniform(rng, -1, 1)), 20);
    PseudoTrajectory y{x.x.t_min, {}, w};
    for (const auto& p : x.x.points) y.points.push_back(SpacePoint::real(p.value() * (1.0 + testing::uniform(rng, -1e-3, 1e-3))));
    const auto r = branch_shadow_construct(y, sys, GlueStrategy::expanding_pick_forward, RateFunction::geometric(0.5));
    ASSERT_EQ(r.z.word, w);
    ASSERT_TRUE(r.cert.branch_mode);
  }
}

}  // namespace
}  // namespace shadowing
