#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "shadowing/gluing.hpp"
#include "shadowing/parallel_gluing.hpp"
#include "shadowing/perturb.hpp"
#include "shadowing/verdicts.hpp"

using namespace shadowing;

namespace {

const GeneratorSet& doubling() {
  static const GeneratorSet g(Space::real_line(), {{"2x", affine(2.0)}});
  return g;
}

PseudoTrajectory uniform_pseudo(Time half, double eps, std::uint64_t seed) {
  PerturbSpec spec;
  spec.model = UniformModel{eps};
  spec.t_min = -half;
  spec.t_max = half;
  spec.start = SpacePoint::real(0.3);
  spec.direction = BuildDirection::backward;
  std::mt19937_64 rng(seed);
  return make_pseudo(doubling(), spec, rng);
}

void BM_ShadowConstruct(benchmark::State& state) {
  const auto y = uniform_pseudo(state.range(0) / 2, 1e-3, 42);
  const GluingOracle oracle{ApproxMode::strong, GlueStrategy::expanding_pick_forward, doubling(), std::nullopt, {}};
  const auto phi = RateFunction::geometric(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(shadow_construct(y, oracle, phi));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ShadowConstruct)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_GluePair(benchmark::State& state) {
  JoinSpec js;
  js.left_generator = js.right_generator = "2x";
  js.u = SpacePoint::real(1.0);
  js.v = SpacePoint::real(1.1);
  js.t_min = -state.range(0);
  js.t_max = state.range(0);
  const auto seg = build_join(doubling(), js);
  const GluingOracle oracle{ApproxMode::strong, GlueStrategy::expanding_pick_forward, doubling(), std::nullopt, {}};
  const auto phi = RateFunction::geometric(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(glue_pair(oracle, seg.left, seg.right, phi));
}
BENCHMARK(BM_GluePair)->Arg(16)->Arg(128)->Arg(512);

void BM_FalsifySingleGenerator(benchmark::State& state) {
  const GeneratorSet shift(Space::real_line(), {{"x+1", psi(1, 1, 1, 1)}});
  PseudoTrajectory y{0, {}, std::nullopt};
  for (Time t = 0; t <= state.range(0); ++t) y.points.push_back(SpacePoint::real(1.0 + 1.1 * static_cast<double>(t)));
  FalsifyBudget b;
  b.grid_radius = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(falsify_shadowing(shift, y, 0.5, b));
}
BENCHMARK(BM_FalsifySingleGenerator)->Arg(16)->Arg(128);

void BM_FalsifyTwoGenerators(benchmark::State& state) {
  const GeneratorSet both(Space::real_line(), {{"2x", affine(2.0)}, {"x/2", affine(0.5)}});
  const double v = 1.0 + std::sqrt(2.0) * 1e-2;
  const Time half = state.range(0) / 2;
  PseudoTrajectory y{-half, {}, std::nullopt};
  for (Time t = -half; t <= half; ++t) {
    y.points.push_back(SpacePoint::real(t <= -1 ? std::ldexp(1.0, static_cast<int>(-t)) : v * std::ldexp(1.0, static_cast<int>(t))));
  }
  for (auto _ : state) benchmark::DoNotOptimize(falsify_shadowing(both, y, 1e-2));
}
BENCHMARK(BM_FalsifyTwoGenerators)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
