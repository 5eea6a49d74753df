#include <gtest/gtest.h>

#include <sstream>

#include "shadowing/io.hpp"
#include "shadowing/perturb.hpp"
#include "support.hpp"

namespace shadowing {
namespace {

std::string read_error(const std::string& csv, const Space& space) {
  std::istringstream in(csv);
  try {
    (void)read_sequence_csv(in, space);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(Perturb, ZeroEpsIsTrueTrajectory) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2)}});
  for (auto dir : {BuildDirection::forward, BuildDirection::backward}) {
    PerturbSpec spec;
    spec.model = UniformModel{0.0};
    spec.t_min = -5;
    spec.t_max = 5;
    spec.start = SpacePoint::real(0.3);
    spec.direction = dir;
    std::mt19937_64 rng(1);
    const auto y = make_pseudo(g, spec, rng);
    EXPECT_EQ(y.points.size(), 11U);
    EXPECT_TRUE(gap_profile(g, y).entries.empty());
  }
}

TEST(Perturb, UniformGapsHaveExactAmplitude) {
  const GeneratorSet g(Space::real_line(), {{"f", affine(1, 1)}});
  PerturbSpec spec;
  spec.model = UniformModel{0.25};
  spec.t_min = 0;
  spec.t_max = 50;
  std::mt19937_64 rng(2);
  for (const auto& s : step_gaps(g, make_pseudo(g, spec, rng))) EXPECT_NEAR(s.gap, 0.25, testing::kTol);
}

TEST(Perturb, ClippedGaussianRespectsCap) {
  std::mt19937_64 rng(3);
  const auto gaps = draw_gaps(ClippedGaussianModel{1.0, 0.1}, 0, 1000, rng);
  ASSERT_EQ(gaps.size(), 1000U);
  for (double x : gaps) ASSERT_LE(std::abs(x), 0.1);
}

TEST(Perturb, SeedDeterminism) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2)}});
  PerturbSpec spec;
  spec.model = BernoulliModel{0.3, 1e-2};
  spec.t_min = -30;
  spec.t_max = 30;
  spec.direction = BuildDirection::backward;
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(make_pseudo(g, spec, a).points, make_pseudo(g, spec, b).points);
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(91);
  const GeneratorSet g(Space::real_line(), {{"2x", affine(2)}, {"x/3", affine(1.0 / 3.0, 0.1)}});
  for (int i = 0; i < 100; ++i) {
    std::vector<GeneratorId> w(testing::size_in(rng, 1, 30));
    for (auto& id : w) id = (rng() & 1U) != 0U ? "2x" : "x/3";
    const Time t0 = -static_cast<Time>(testing::size_in(rng, 0, 30));
    const auto x = testing::orbit(g, w, t0, SpacePoint::real(testing::uniform(rng, -1, 1)));
    std::ostringstream out;
    write_trajectory_csv(out, g, x);
    std::istringstream in(out.str());
    const auto back = to_trajectory(read_sequence_csv(in, g.space()));
    ASSERT_EQ(back.t_min, x.t_min);
    ASSERT_EQ(back.points, x.points);
    ASSERT_EQ(back.word, x.word);
    ASSERT_TRUE(is_valid_trajectory(g, back));
  }
}

TEST(Csv, Layout) {
  const GeneratorSet g(Space::real_line(), {{"g", affine(2)}});
  std::ostringstream out;
  write_trajectory_csv(out, g, testing::orbit(g, {"g"}, 0, SpacePoint::real(0.1)));
  EXPECT_EQ(out.str(), "t,point,generator_id,gap\n0,0.1,g,0\n1,0.2,,\n");
}

TEST(Csv, ReaderReportsLines) {
  const auto s = Space::real_line();
  EXPECT_EQ(read_error("", s), "line 1: missing header");
  EXPECT_NE(read_error("t,x\n", s).find("line 1:"), std::string::npos);
  EXPECT_NE(read_error("t,point,generator_id,gap\n0,1,g,0\n1,2\n", s).find("line 3: expected 4 columns"),
            std::string::npos);
  EXPECT_NE(read_error("t,point,generator_id,gap\n0,1,g,0\n2,2,,\n", s).find("line 3:"), std::string::npos);
  EXPECT_NE(read_error("t,point,generator_id,gap\n0,1,g,0\n1,abc,,\n", s).find("line 3:"), std::string::npos);
  EXPECT_NE(read_error("t,point,generator_id,gap\n0,1,g,0\n1,2,g,0\n", s).find("last row"), std::string::npos);
  EXPECT_NE(read_error("t,point,generator_id,gap\n0,1,,\n1,2,,\n", s).find("line 3: row after"),
            std::string::npos);
  EXPECT_NE(read_error("t,point,generator_id,gap\n0,7,,\n", Space::finite({1, 2})).find("line 2: point outside"),
            std::string::npos);
}

TEST(Json, NonFiniteAsStrings) {
  ShadowVerdict v;
  v.statistic = std::numeric_limits<double>::infinity();
  EXPECT_NE(to_json(v).find("\"inf\""), std::string::npos);
}

}  // namespace
}  // namespace shadowing
