#include <gtest/gtest.h>

#include <cmath>

#include "shadowing/transfer.hpp"
#include "support.hpp"

namespace shadowing {
namespace {

using testing::kTol;

std::vector<SamplePair> pairs_on(double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_pairs(lo, hi, 200, rng);
}

TEST(BiLipschitz, AffineAndIdentity) {
  const auto pairs = pairs_on(-5.0, 5.0, 71);
  ASSERT_GE(pairs.size(), 100U);
  const auto two = estimate_bilipschitz(Affine{2.0, 0.0}, pairs);
  EXPECT_EQ(two.c_lower, 2.0);
  EXPECT_EQ(two.c_upper, 2.0);
  EXPECT_EQ(two.c, 2.0);
  EXPECT_FALSE(two.divergent);
  const auto id = estimate_bilipschitz(Affine{1.0, 0.0}, pairs);
  EXPECT_EQ(id.c, 1.0);
}

TEST(BiLipschitz, SignedPowerDivergesAtZero) {
  const double p = std::log(2.0) / std::log(3.0);
  const auto e = estimate_bilipschitz(SignedPower{p, 1.0}, pairs_on(-1.0, 1.0, 72));
  EXPECT_TRUE(e.divergent);
  // straddling pair +-t: ratio t^(p-1), so t = 1e-12 alone exceeds 1e4
  EXPECT_GT(e.c_upper, std::pow(1e-12, p - 1.0) * (1.0 - 1e-9));
}

TEST(BiLipschitz, CoincidentPairsSkipped) {
  std::vector<SamplePair> pairs{{1.0, 1.0}, {0.0, 1.0}};
  const auto e = estimate_bilipschitz(Affine{3.0, 1.0}, pairs);
  EXPECT_EQ(e.skipped_pairs, 1U);
  EXPECT_EQ(e.used_pairs, 1U);
  EXPECT_EQ(e.c, 3.0);
}

struct ShiftPair {
  PseudoTrajectory y;
  Trajectory x;
};

ShiftPair shift_pair(std::uint64_t seed, double noise) {
  std::mt19937_64 rng(seed);
  ShiftPair s;
  s.y.t_min = s.x.t_min = -10;
  for (Time t = -10; t <= 10; ++t) {
    s.x.points.push_back(SpacePoint::real(static_cast<double>(t)));
    s.y.points.push_back(SpacePoint::real(static_cast<double>(t) + testing::uniform(rng, -noise, noise)));
    if (t < 10) s.x.word.push_back("f");
  }
  return s;
}

TEST(ConjugateTransfer, IdentityLeavesVerdicts) {
  const GeneratorSet f(Space::real_line(), {{"f", affine(1, 1)}});
  const ConjugacySpec spec{Affine{1, 0}, Affine{1, 0}, ConjugacyDirection::h_f_equals_g_h, {{"f", "f"}}};
  const auto s = shift_pair(73, 0.05);
  const auto r = conjugate_transfer(spec, f, f, s.y, s.x, 0.05);
  EXPECT_EQ(r.before_u.statistic, r.after_u.statistic);
  EXPECT_EQ(r.before_a.statistic, r.after_a.statistic);
  EXPECT_EQ(r.before_u.pass, r.after_u.pass);
  EXPECT_TRUE(r.bound_holds);
}

TEST(ConjugateTransfer, ShiftDoubles) {
  const GeneratorSet f(Space::real_line(), {{"f", affine(1, 1)}});
  const GeneratorSet g(Space::real_line(), {{"g", affine(1, 2)}});
  const ConjugacySpec spec{Affine{2, 0}, Affine{0.5, 0}, ConjugacyDirection::h_f_equals_g_h, {{"f", "g"}}};
  const auto s = shift_pair(74, 0.05);
  const auto r = conjugate_transfer(spec, f, g, s.y, s.x, 0.05);
  EXPECT_NEAR(r.after_u.statistic, 2.0 * r.before_u.statistic, kTol);
  EXPECT_TRUE(is_valid_trajectory(g, r.x_image));
  EXPECT_EQ(r.x_image.word.front(), "g");
  EXPECT_LE(r.intertwining.max_residual, kTol);
}

TEST(ConjugateTransfer, WrongDirectionRefused) {
  const GeneratorSet f(Space::real_line(), {{"f", affine(1, 1)}});
  const GeneratorSet g(Space::real_line(), {{"g", affine(1, 3)}});
  const ConjugacySpec spec{Affine{2, 0}, Affine{0.5, 0}, ConjugacyDirection::h_f_equals_g_h, {{"f", "g"}}};
  const auto s = shift_pair(75, 0.05);
  EXPECT_THROW((void)conjugate_transfer(spec, f, g, s.y, s.x, 0.05), TransferRefused);
}

TEST(Intertwining, SignedPowerDirection) {
  const GeneratorSet f(Space::real_line(), {{"2x", affine(2)}});
  const GeneratorSet g(Space::real_line(), {{"3x", affine(3)}});
  const double p = std::log(2.0) / std::log(3.0);
  ConjugacySpec spec{SignedPower{p, 1}, SignedPower{1 / p, 1}, ConjugacyDirection::h_g_equals_f_h, {{"2x", "3x"}}, -1, 1};
  EXPECT_TRUE(validate_intertwining(spec, f, g).ok);
  EXPECT_NEAR(apply_homeo(spec.forward, SpacePoint::real(6.0)).value(),
              2.0 * apply_homeo(spec.forward, SpacePoint::real(2.0)).value(), 1e-12);
  spec.direction = ConjugacyDirection::h_f_equals_g_h;
  EXPECT_FALSE(validate_intertwining(spec, f, g).ok);
}

TEST(InvertTransfer, Doubling) {
  const Generator f{"g", affine(2.0)};
  const GeneratorSet gs(Space::real_line(), {f});
  const auto x = testing::orbit(gs, std::vector<GeneratorId>(6, "g"), -3, SpacePoint::real(0.125));
  auto y = as_pseudo(x);
  // gap 0.1 at step t=0 -> 1
  for (std::size_t i = 4; i < y.points.size(); ++i) y.points[i] = SpacePoint::real(y.points[i].value() + 0.1 * std::ldexp(1.0, static_cast<int>(i - 4)));
  const auto r = invert_transfer(f, Space::real_line(), y, x);
  EXPECT_TRUE(r.x_reversed_valid);
  EXPECT_EQ(r.c_lower, 2.0);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_EQ(apply_real(r.inverse_system.at(0).map, 4.0), 2.0);
  // original step 0 -> 1 mirrors to reversed step -1 -> 0
  for (const auto& s : r.reversed_gaps) {
    if (s.t == -1) EXPECT_NEAR(s.gap, 0.05, kTol);
    else EXPECT_NEAR(s.gap, 0.0, kTol);
  }
}

TEST(InvertTransfer, IsometryAndNonBijection) {
  const Generator f{"f", affine(1, 1)};
  const auto s = shift_pair(76, 0.1);
  const auto r = invert_transfer(f, Space::real_line(), s.y, s.x);
  ASSERT_EQ(r.original_gaps.size(), r.reversed_gaps.size());
  for (const auto& g : r.reversed_gaps) {
    EXPECT_NEAR(g.gap, r.original_gaps.at(static_cast<std::size_t>(-g.t - 1 - s.y.t_min)).gap, kTol);
  }
  EXPECT_THROW((void)invert_transfer({"psi", psi(-1, 1, 0, 0)}, Space::real_line(), s.y, s.x), std::domain_error);
}

TEST(InvertTransferProperty, Involution) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const double a = testing::uniform(rng, 0.2, 4.0);
    const Generator f{"f", affine(a, testing::uniform(rng, -1.0, 1.0))};
    const GeneratorSet gs(Space::real_line(), {f});
    const auto n = testing::size_in(rng, 1, 12);
    const Time t0 = -static_cast<Time>(testing::size_in(rng, 0, n));
    const auto x = testing::orbit(gs, std::vector<GeneratorId>(n, "f"), t0, SpacePoint::real(testing::uniform(rng, -1, 1)));
    PseudoTrajectory y{x.t_min, {}, std::nullopt};
    for (const auto& p : x.points) y.points.push_back(SpacePoint::real(p.value() + testing::uniform(rng, -0.1, 0.1)));
    const auto once = invert_transfer(f, Space::real_line(), y, x);
    const auto twice = invert_transfer(once.inverse_system.at(0), Space::real_line(), once.y_reversed, once.x_reversed);
    ASSERT_EQ(twice.y_reversed.t_min, y.t_min);
    ASSERT_EQ(twice.y_reversed.points, y.points);
    ASSERT_EQ(twice.x_reversed.points, x.points);
    ASSERT_TRUE(once.bound_holds);
  }
}

}  // namespace
}  // namespace shadowing
