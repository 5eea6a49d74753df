#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "shadowing/gluing.hpp"
#include "shadowing/perturb.hpp"
#include "support.hpp"

namespace shadowing {
namespace {

using testing::kTol;

GeneratorSet doubling() { return GeneratorSet(Space::real_line(), {{"g", affine(2.0)}}); }
GeneratorSet cyclic_pair() {
  return GeneratorSet(Space::finite({1, 2, 3}), {{"g", cyclic_three()}, {"g^-1", inverse(cyclic_three())}});
}
GluingOracle oracle_for(const GeneratorSet& g, GlueStrategy s, ApproxMode m = ApproxMode::strong) {
  return GluingOracle{m, s, g, std::nullopt, {}};
}

JoinSegments doubling_join(double u, double v, Time t_min = -8, Time t_max = 8) {
  JoinSpec js;
  js.left_generator = js.right_generator = "g";
  js.u = SpacePoint::real(u);
  js.v = SpacePoint::real(v);
  js.t_min = t_min;
  js.t_max = t_max;
  return build_join(doubling(), js);
}

TEST(Glue, ExpandingClosedForm) {
  const auto seg = doubling_join(1.0, 1.1);
  EXPECT_EQ(seg.left.points.back().value(), 0.5);
  const auto r = glue_pair(oracle_for(doubling(), GlueStrategy::expanding_pick_forward), seg.left, seg.right,
                           RateFunction::geometric(0.5));
  EXPECT_NEAR(r.gap, 0.1, kTol);
  EXPECT_EQ(r.t0, 0);
  for (Time t = -8; t <= 8; ++t) {
    const double want = t < 0 ? 0.1 * std::pow(2.0, static_cast<double>(t)) : 0.0;
    EXPECT_NEAR(r.errors[static_cast<std::size_t>(t + 8)], want, kTol) << "t=" << t;
    // output is the full orbit of 1.1
    EXPECT_NEAR(r.x.at(t).value(), 1.1 * std::pow(2.0, static_cast<double>(t)), kTol);
  }
  EXPECT_TRUE(is_valid_trajectory(doubling(), r.x));
}

TEST(Glue, ZeroGapIsConcatenation) {
  const auto seg = doubling_join(1.0, 1.0);
  const auto r = glue_pair(oracle_for(doubling(), GlueStrategy::expanding_pick_forward), seg.left, seg.right,
                           RateFunction::geometric(0.5));
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_EQ(r.changed, 0U);
  for (double e : r.errors) EXPECT_EQ(e, 0.0);
}

TEST(Glue, ContractingMirror) {
  const GeneratorSet half(Space::real_line(), {{"h", affine(0.5)}});
  // left: forward orbit ending at 1 at t=-1; right: orbit of 0.6 (gap 0.1)
  Trajectory left = testing::orbit(half, std::vector<GeneratorId>(6, "h"), -7, SpacePoint::real(64.0));
  Trajectory right = testing::orbit(half, std::vector<GeneratorId>(6, "h"), 0, SpacePoint::real(0.6));
  const auto r = glue_pair(oracle_for(half, GlueStrategy::contracting_pick_backward), left, right,
                           RateFunction::geometric(0.5));
  EXPECT_NEAR(r.gap, 0.1, kTol);
  for (Time t = 0; t <= 6; ++t) {
    EXPECT_NEAR(r.errors[static_cast<std::size_t>(t + 7)], 0.1 * std::pow(0.5, static_cast<double>(t)), kTol);
  }
  for (Time t = -7; t < 0; ++t) EXPECT_EQ(r.errors[static_cast<std::size_t>(t + 7)], 0.0);
}

TEST(Glue, FiniteCyclicReroute) {
  const auto g = cyclic_pair();
  const GeneratorSet single(g.space(), {{"g", cyclic_three()}});
  // backward g-orbit ending at 1 (t=-1), forward g-orbit from 1 (t=0)
  Trajectory left{-6, {}, std::vector<GeneratorId>(5, "g")};
  auto p = SpacePoint::label(1);
  std::vector<SpacePoint> back{p};
  for (int i = 0; i < 5; ++i) back.insert(back.begin(), preimages(cyclic_three(), back.front()).front());
  left.points = back;
  const auto right = testing::orbit(single, std::vector<GeneratorId>(6, "g"), 0, SpacePoint::label(1));
  const auto phi = RateFunction::tabulated(-3, std::vector<double>(7, 1.0));
  for (auto mode : {ApproxMode::strong, ApproxMode::weak}) {
    const auto r = glue_pair(oracle_for(g, GlueStrategy::finite_cyclic_reroute, mode), left, right, phi);
    EXPECT_EQ(r.gap, 1.0);
    EXPECT_LE(r.changed, 3U);
    EXPECT_TRUE(is_valid_trajectory(g, r.x));
    for (Time t = r.x.t_min; t <= r.x.t_max(); ++t) {
      if (std::abs(t) > 3) EXPECT_EQ(r.errors[static_cast<std::size_t>(t - r.x.t_min)], 0.0) << t;
    }
  }
}

TEST(Glue, CustomTable) {
  const auto g = cyclic_pair();
  const GeneratorSet single(g.space(), {{"g", cyclic_three()}});
  // left ends at 1 at t=-1, right starts at 1 at t=0; g^-1 g^-1 ... 1 -> 2 -> 3
  Trajectory left{-2, {SpacePoint::label(2), SpacePoint::label(1)}, {"g"}};
  const auto right = testing::orbit(single, {"g", "g"}, 0, SpacePoint::label(1));
  GluingOracle o = oracle_for(g, GlueStrategy::custom_table);
  o.table.push_back({1, 3, {"g^-1", "g^-1"}});  // lands on right.at(1) = 3
  const auto phi = RateFunction::tabulated(-3, std::vector<double>(7, 1.0));
  const auto r = glue_pair(o, left, right, phi);
  EXPECT_TRUE(is_valid_trajectory(g, r.x));
  EXPECT_EQ(r.x.at(0).label_value(), 2);
  o.table.clear();
  EXPECT_THROW((void)glue_pair(o, left, right, phi), OracleFailure);
}

TEST(Glue, FailureIsReportedWithIndex) {
  // contracting map glued with the expanding strategy: the pulled-back error
  // grows, so phi = 2^-|k| must be violated somewhere left of t0
  const GeneratorSet half(Space::real_line(), {{"h", affine(0.5)}});
  Trajectory left = testing::orbit(half, std::vector<GeneratorId>(6, "h"), -7, SpacePoint::real(64.0));
  Trajectory right = testing::orbit(half, std::vector<GeneratorId>(6, "h"), 0, SpacePoint::real(0.6));
  try {
    (void)glue_pair(oracle_for(half, GlueStrategy::expanding_pick_forward), left, right, RateFunction::geometric(0.5));
    FAIL() << "expected OracleFailure";
  } catch (const OracleFailure& e) {
    EXPECT_LT(e.worst_index(), 0);
    EXPECT_GT(e.worst_ratio(), 1.0);
  }
}

TEST(Glue, MalformedSegments) {
  const auto seg = doubling_join(1.0, 1.1);
  auto bad = seg.right;
  bad.t_min = 3;  // no longer adjacent
  EXPECT_THROW((void)glue_pair(oracle_for(doubling(), GlueStrategy::expanding_pick_forward), seg.left, bad,
                               RateFunction::geometric(0.5)),
               ValidationError);
}

TEST(VerifyApprox, Examples) {
  const auto phi = RateFunction::geometric(0.5);
  const auto x = testing::orbit(doubling(), std::vector<GeneratorId>(8, "g"), -4, SpacePoint::real(0.1));
  auto c = verify_strong_approx(x, as_pseudo(x), phi, 0, 0.0);
  EXPECT_TRUE(c.ok);
  EXPECT_EQ(c.worst_ratio, 0.0);

  auto shifted = as_pseudo(x);
  for (auto& p : shifted.points) p = SpacePoint::real(p.value() + 1.0);
  c = verify_strong_approx(x, shifted, phi, 0, 0.1);
  EXPECT_FALSE(c.ok);
  EXPECT_GT(c.worst_ratio, 1.0);
  EXPECT_EQ(std::abs(c.worst_index), 4);  // farthest from t0

  c = verify_strong_approx(x, shifted, phi, 0, 0.0);
  EXPECT_EQ(c.worst_ratio, std::numeric_limits<double>::infinity());

  const auto seg = doubling_join(1.0, 1.1);
  const auto r = glue_pair(oracle_for(doubling(), GlueStrategy::expanding_pick_forward), seg.left, seg.right, phi);
  c = verify_strong_approx(r.x, concatenate_pseudo(seg.left, seg.right), phi, 0, r.gap);
  EXPECT_TRUE(c.ok);
  EXPECT_LE(c.worst_ratio, 1.0 + kTol);
}

TEST(GlueProperty, ExpandingErrorIsGapTimesPower) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 300; ++i) {
    const double a = testing::uniform(rng, 1.5, 4.0);
    const GeneratorSet g(Space::real_line(), {{"g", affine(a)}});
    JoinSpec js;
    js.left_generator = js.right_generator = "g";
    js.u = SpacePoint::real(testing::uniform(rng, -2.0, 2.0));
    js.v = SpacePoint::real(js.u.value() + testing::uniform(rng, -0.3, 0.3));
    js.t_min = -static_cast<Time>(testing::size_in(rng, 1, 12));
    js.t_max = static_cast<Time>(testing::size_in(rng, 0, 12));
    const auto seg = build_join(g, js);
    const auto r = glue_pair(oracle_for(g, GlueStrategy::expanding_pick_forward), seg.left, seg.right,
                             RateFunction::geometric(1.0 / a));
    ASSERT_TRUE(is_valid_trajectory(g, r.x));
    for (Time t = js.t_min; t < 0; ++t) {
      const double want = r.gap * std::pow(a, static_cast<double>(t));
      ASSERT_NEAR(r.errors[static_cast<std::size_t>(t - js.t_min)], want, 1e-12 * std::max(1.0, std::abs(js.u.value())));
    }
  }
}

TEST(GlueProperty, Deterministic) {
  std::mt19937_64 rng(42);
  const auto g = cyclic_pair();
  const auto phi = RateFunction::tabulated(-3, std::vector<double>(7, 1.0));
  for (int i = 0; i < 50; ++i) {
    const int u = 1 + static_cast<int>(rng() % 3);
    const int v = 1 + static_cast<int>(rng() % 3);
    Trajectory left{-4, {SpacePoint::label(u)}, {}};
    for (int k = 0; k < 3; ++k) {
      left.points.insert(left.points.begin(), preimages(cyclic_three(), left.points.front()).front());
      left.word.push_back("g");
    }
    const auto right = testing::orbit(GeneratorSet(g.space(), {{"g", cyclic_three()}}), {"g", "g", "g", "g"}, 0,
                                      SpacePoint::label(v));
    const auto o = oracle_for(g, GlueStrategy::finite_cyclic_reroute);
    const auto a = glue_pair(o, left, right, phi);
    const auto b = glue_pair(o, left, right, phi);
    ASSERT_EQ(a.x.points, b.x.points);
    ASSERT_EQ(a.x.word, b.x.word);
    ASSERT_LE(a.changed, 3U);
  }
}

TEST(ConnectingWords, ExhaustiveCount) {
  const auto g = cyclic_pair();
  for (int u = 1; u <= 3; ++u) {
    for (int v = 1; v <= 3; ++v) {
      for (std::size_t n = 3; n <= 8; ++n) {
        const auto words = connecting_words(g, SpacePoint::label(u), SpacePoint::label(v), n);
        ASSERT_FALSE(words.empty()) << u << "->" << v << " n=" << n;
        for (const auto& w : words) {
          ASSERT_EQ(w.size(), n);
          auto p = SpacePoint::label(u);
          for (const auto& id : w) p = apply(g.at(g.require(id)).map, p);
          ASSERT_EQ(p.label_value(), v);
        }
        ASSERT_TRUE(std::is_sorted(words.begin(), words.end()));
      }
    }
  }
  // n = 1 cannot fix a point
  EXPECT_TRUE(connecting_words(g, SpacePoint::label(1), SpacePoint::label(1), 1).empty());
}

TEST(Strategy, NamesRoundTrip) {
  for (auto s : {GlueStrategy::expanding_pick_forward, GlueStrategy::contracting_pick_backward,
                 GlueStrategy::finite_cyclic_reroute, GlueStrategy::custom_table}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_EQ(to_string(GlueStrategy::finite_cyclic_reroute), "finite-cyclic-reroute");
  EXPECT_THROW((void)parse_strategy("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace shadowing
