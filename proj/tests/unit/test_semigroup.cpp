#include <gtest/gtest.h>

#include <algorithm>

#include "shadowing/perturb.hpp"
#include "support.hpp"

namespace shadowing {
namespace {

using testing::kTol;

GeneratorSet doubling() { return GeneratorSet(Space::real_line(), {{"g", affine(2.0)}}); }
GeneratorSet cyclic_pair() {
  return GeneratorSet(Space::finite({1, 2, 3}), {{"g", cyclic_three()}, {"g^-1", inverse(cyclic_three())}});
}

PseudoTrajectory pseudo_of(Time t_min, std::vector<double> v) {
  PseudoTrajectory y;
  y.t_min = t_min;
  for (double x : v) y.points.push_back(SpacePoint::real(x));
  return y;
}

TEST(GeneratorSet, Validation) {
  EXPECT_THROW(GeneratorSet(Space::real_line(), {}), std::invalid_argument);
  EXPECT_THROW(GeneratorSet(Space::real_line(), {{"a", affine(2)}, {"a", affine(3)}}), std::invalid_argument);
  EXPECT_THROW(GeneratorSet(Space::real_line(), {{"g", cyclic_three()}}), std::invalid_argument);
  EXPECT_THROW(GeneratorSet(Space::finite({1, 2}), {{"g", cyclic_three()}}), std::invalid_argument);
  EXPECT_THROW((void)doubling().require("nope"), ValidationError);
}

TEST(SemigroupImage, Examples) {
  const GeneratorSet two(Space::real_line(), {{"2x", affine(2)}, {"x/2", affine(0.5)}});
  const auto img = semigroup_image(two, SpacePoint::real(2.0));
  ASSERT_EQ(img.size(), 2U);
  EXPECT_EQ(img[0].value(), 4.0);
  EXPECT_EQ(img[1].value(), 1.0);

  const GeneratorSet shift(Space::real_line(), {{"f", affine(1, 1)}});
  EXPECT_EQ(semigroup_image(shift, SpacePoint::real(0.0)).front().value(), 1.0);

  const auto c = semigroup_image(cyclic_pair(), SpacePoint::label(1));
  ASSERT_EQ(c.size(), 2U);
  EXPECT_EQ(c[0].label_value(), 3);
  EXPECT_EQ(c[1].label_value(), 2);

  // duplicates collapse
  const GeneratorSet dup(Space::real_line(), {{"a", affine(2)}, {"b", affine(1, 1)}});
  EXPECT_EQ(semigroup_image(dup, SpacePoint::real(1.0)).size(), 1U);
}

TEST(Trajectory, Validator) {
  const auto g = doubling();
  const auto x = testing::orbit(g, {"g", "g", "g"}, -1, SpacePoint::real(0.25));
  EXPECT_TRUE(is_valid_trajectory(g, x));
  // break the point at t=1, so step t=0 -> 1 is the first miss
  auto bad = x;
  bad.points[2] = SpacePoint::real(bad.points[2].value() + 1e-6);
  EXPECT_FALSE(is_valid_trajectory(g, bad));
  try {
    validate_trajectory(g, bad);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("t=0"), std::string::npos) << e.what();
  }
  bad = x;
  bad.word.pop_back();
  EXPECT_FALSE(is_valid_trajectory(g, bad));
}

TEST(GapProfile, Examples) {
  const auto g = doubling();
  const auto x = testing::orbit(g, {"g", "g", "g", "g"}, 0, SpacePoint::real(0.3));
  EXPECT_TRUE(gap_profile(g, as_pseudo(x)).entries.empty());

  auto y = as_pseudo(x);
  y.points[1] = SpacePoint::real(y.points[1].value() + 0.1);
  for (std::size_t i = 2; i < y.points.size(); ++i) y.points[i] = SpacePoint::real(2.0 * y.points[i - 1].value());
  const auto p = gap_profile(g, y);
  ASSERT_EQ(p.entries.size(), 1U);
  EXPECT_EQ(p.entries[0].t, 0);
  EXPECT_NEAR(p.entries[0].amplitude, 0.1, kTol);

  const GeneratorSet shift(Space::real_line(), {{"f", affine(1, 1)}});
  std::vector<double> v;
  for (int t = 0; t <= 10; ++t) v.push_back(1.0 + t * 1.1);
  const auto q = gap_profile(shift, pseudo_of(0, v));
  ASSERT_EQ(q.entries.size(), 10U);
  for (const auto& e : q.entries) EXPECT_NEAR(e.amplitude, 0.1, kTol);
  EXPECT_NEAR(q.gap_max, 0.1, kTol);
}

TEST(GapProfile, ArgminGenerator) {
  const GeneratorSet two(Space::real_line(), {{"2x", affine(2)}, {"x/2", affine(0.5)}});
  const auto s = step_gaps(two, pseudo_of(0, {2.0, 1.1, 2.0}));
  EXPECT_EQ(s[0].generator, 1U);  // 1.1 is closer to 1 than to 4
  EXPECT_NEAR(s[0].gap, 0.1, kTol);
  EXPECT_EQ(s[1].generator, 0U);
  EXPECT_NEAR(s[1].gap, 0.2, kTol);
}

TEST(Classify, Examples) {
  const auto g = doubling();
  const auto x = as_pseudo(testing::orbit(g, std::vector<GeneratorId>(10, "g"), -5, SpacePoint::real(1e-3)));
  const auto f = classify_pseudo(x, g, 0.01);
  EXPECT_TRUE(f.is_u);
  EXPECT_TRUE(f.is_a);
  EXPECT_FALSE(f.is_s);

  // single gap 0.5 on a 101-point window of the shift
  const GeneratorSet shift(Space::real_line(), {{"f", affine(1, 1)}});
  std::vector<double> v;
  for (int t = -50; t <= 50; ++t) v.push_back(t + (t > 0 ? 0.5 : 0.0));
  const auto s = classify_pseudo(pseudo_of(-50, v), shift, 0.1);
  EXPECT_FALSE(s.is_u);
  EXPECT_TRUE(s.is_s);
  EXPECT_TRUE(s.is_a);

  v.clear();
  for (int t = -50; t <= 50; ++t) v.push_back(t * 1.2);
  const auto c = classify_pseudo(pseudo_of(-50, v), shift, 0.1);
  EXPECT_FALSE(c.is_u);
  EXPECT_FALSE(c.is_a);
  EXPECT_FALSE(c.is_s);

  EXPECT_THROW((void)classify_pseudo(x, g, 0.0), std::domain_error);
}

TEST(ClassifyProperty, MonotoneInEps) {
  std::mt19937_64 rng(31);
  const GeneratorSet shift(Space::real_line(), {{"f", affine(1, 1)}});
  for (int i = 0; i < 300; ++i) {
    PerturbSpec spec;
    spec.model = BernoulliModel{testing::uniform(rng, 0.0, 1.0), testing::uniform(rng, 0.0, 0.3)};
    spec.t_min = -20;
    spec.t_max = 20;
    const auto y = make_pseudo(shift, spec, rng);
    const double e1 = testing::uniform(rng, 1e-3, 0.3);
    const double e2 = e1 + testing::uniform(rng, 0.0, 0.3);
    const auto a = classify_pseudo(y, shift, e1);
    const auto b = classify_pseudo(y, shift, e2);
    ASSERT_TRUE(!a.is_u || b.is_u);
    ASSERT_TRUE(!a.is_a || b.is_a);
    ASSERT_TRUE(!a.is_u || a.is_a);  // sup bounds every average
  }
}

TEST(Reencode, ExamplesAndIdentity) {
  const GeneratorSet old_g(Space::real_line(), {{"g", affine(2)}});
  const GeneratorSet new_g(Space::real_line(), {{"h", affine(4)}});
  const GeneratorDictionary dict{{"h", {"g", "g"}}};

  const auto y = reencode_generators(pseudo_of(0, {1, 4, 16}), old_g, new_g, dict);
  EXPECT_EQ(testing::real_values(y.points), (std::vector<double>{1, 2, 4, 8, 16}));
  EXPECT_TRUE(gap_profile(old_g, y).entries.empty());
  ASSERT_TRUE(y.reference_word.has_value());
  EXPECT_EQ(y.reference_word->size(), 4U);

  const auto z = reencode_generators(pseudo_of(0, {1, 4.3, 17.2}), old_g, new_g, dict);
  const auto p = gap_profile(old_g, z);
  ASSERT_EQ(p.entries.size(), 1U);
  EXPECT_NEAR(p.entries[0].amplitude, 0.3, kTol);

  const auto same = reencode_generators(pseudo_of(0, {1, 2.5, 5}), old_g, old_g, {{"g", {"g"}}});
  EXPECT_EQ(testing::real_values(same.points), (std::vector<double>{1, 2.5, 5}));

  EXPECT_THROW(validate_dictionary(old_g, new_g, {{"h", {"g"}}}), ValidationError);
  EXPECT_THROW(validate_dictionary(old_g, new_g, {}), ValidationError);
}

TEST(ReencodeProperty, AmplitudeMultisetPreserved) {
  std::mt19937_64 rng(32);
  const GeneratorSet old_g(Space::real_line(), {{"a", affine(1, 1)}, {"b", affine(-1, 0)}});
  const GeneratorSet new_g(Space::real_line(), {{"ab", affine(-1, -1)}, {"aa", affine(1, 2)}});
  const GeneratorDictionary dict{{"ab", {"a", "b"}}, {"aa", {"a", "a"}}};
  validate_dictionary(old_g, new_g, dict);
  for (int i = 0; i < 200; ++i) {
    PerturbSpec spec;
    spec.model = BernoulliModel{0.4, testing::uniform(rng, 0.01, 0.5)};
    spec.t_min = -10;
    spec.t_max = 10;
    std::vector<GeneratorId> word;
    for (int k = 0; k < 20; ++k) word.push_back((rng() & 1U) != 0U ? "ab" : "aa");
    spec.word = word;
    const auto y = make_pseudo(new_g, spec, rng);
    const auto z = reencode_generators(y, old_g, new_g, dict);
    auto amps = [](const GapProfile& p) {
      std::vector<double> a;
      for (const auto& e : p.entries) a.push_back(e.amplitude);
      std::sort(a.begin(), a.end());
      return a;
    };
    // both sides measured against the declared reference word
    std::vector<double> before;
    for (const auto& s : branch_step_gaps(new_g, y, *y.reference_word)) {
      if (s.gap > kTol) before.push_back(s.gap);
    }
    std::sort(before.begin(), before.end());
    // x+2 and (x+1)+1 can round differently, so compare to within tau
    const auto after = amps(gap_profile(branch_step_gaps(old_g, z, *z.reference_word)));
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t k = 0; k < before.size(); ++k) ASSERT_NEAR(before[k], after[k], kTol);
  }
}

}  // namespace
}  // namespace shadowing
