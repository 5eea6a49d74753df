#include "shadowing/nonauto.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

void validate_system(const NonAutoSystem& sys) {
  for (const auto& id : sys.branch.word) sys.generators.require(id);
}

BranchTrajectory branch_trajectory(const NonAutoSystem& sys, const SpacePoint& x0, Time t0,
                                   const PseudoTrajectory* guide) {
  validate_system(sys);
  if (t0 < sys.t_min() || t0 > sys.t_max()) {
    throw ValidationError(fmt::format("t0={} outside the system window [{},{}]", t0, sys.t_min(), sys.t_max()));
  }
  const auto& g = sys.generators;
  std::vector<SpacePoint> back;  // x_{t0-1}, x_{t0-2}, ...
  std::optional<Time> truncated;
  SpacePoint cur = x0;
  for (Time t = t0 - 1; t >= sys.t_min(); --t) {
    const auto pre = preimages(g.at(g.require(sys.branch.at(t))).map, cur);
    if (pre.empty()) {
      truncated = t;
      break;
    }
    const SpacePoint& target = (guide && t >= guide->t_min && t <= guide->t_max()) ? guide->at(t) : cur;
    SpacePoint best = pre.front();
    for (const auto& p : pre) {
      if (g.space().distance(p, target) < g.space().distance(best, target)) best = p;
    }
    back.push_back(best);
    cur = best;
  }

  BranchTrajectory out;
  out.truncated_below = truncated;
  out.x.t_min = t0 - static_cast<Time>(back.size());
  out.x.points.assign(back.rbegin(), back.rend());
  out.x.points.push_back(x0);
  for (Time t = out.x.t_min; t < t0; ++t) out.x.word.push_back(sys.branch.at(t));
  for (Time t = t0; t < sys.t_max(); ++t) {
    const auto& id = sys.branch.at(t);
    out.x.points.push_back(apply(g.at(g.require(id)).map, out.x.points.back()));
    out.x.word.push_back(id);
  }
  return out;
}

GluingOracle branch_oracle(const NonAutoSystem& sys, GlueStrategy strategy, ApproxMode mode) {
  validate_system(sys);
  return GluingOracle{mode, strategy, sys.generators, sys.branch, {}};
}

ShadowResult branch_shadow_construct(const PseudoTrajectory& y, const NonAutoSystem& sys, GlueStrategy strategy,
                                     const RateFunction& phi, const ConstructOptions& options) {
  if (y.reference_word) {
    for (std::size_t i = 0; i < y.reference_word->size(); ++i) {
      const Time t = y.t_min + static_cast<Time>(i);
      if ((*y.reference_word)[i] != sys.branch.at(t)) {
        throw ValidationError(fmt::format("pseudo-trajectory reference word disagrees with the branch at t={}", t));
      }
    }
  }
  return shadow_construct(y, branch_oracle(sys, strategy), phi, options);
}

BranchCompareReport branch_vs_semigroup_report(const BranchCompareSpec& spec) {
  if (!(spec.t_min < spec.t0 && spec.t0 <= spec.t_max)) throw ValidationError("join time must lie inside the window");
  const Space space = Space::finite({1, 2, 3});
  const EndomorphismSpec g = cyclic_three();
  const GeneratorSet semigroup(space, {{"g", g}, {"g^-1", inverse(g)}});
  const GeneratorSet single(space, {{"g", g}});

  BranchWord all_g{spec.t_min, std::vector<GeneratorId>(static_cast<std::size_t>(spec.t_max - spec.t_min), "g")};
  const NonAutoSystem sys{all_g, single};

  // backward g-orbit ending at u, forward g-orbit from v
  const auto left = branch_trajectory(NonAutoSystem{BranchWord{spec.t_min, std::vector<GeneratorId>(
                                                                                 static_cast<std::size_t>(spec.t0 - 1 - spec.t_min), "g")},
                                                    single},
                                      SpacePoint::label(spec.u), spec.t0 - 1);
  const auto right = branch_trajectory(
      NonAutoSystem{BranchWord{spec.t0, std::vector<GeneratorId>(static_cast<std::size_t>(spec.t_max - spec.t0), "g")},
                    single},
      SpacePoint::label(spec.v), spec.t0);

  BranchCompareReport rep;
  rep.pseudo = concatenate_pseudo(left.x, right.x);
  rep.pseudo.reference_word = all_g.word;
  rep.delta = spec.delta.value_or(6.0 / static_cast<double>(spec.t_max - spec.t_min + 1));

  // phi = 1 on |k| <= 3: the reroute touches nothing further out.
  const auto phi = RateFunction::tabulated(-3, std::vector<double>(7, 1.0));

  try {
    GluingOracle oracle{ApproxMode::strong, GlueStrategy::finite_cyclic_reroute, semigroup, std::nullopt, {}};
    auto res = shadow_construct(rep.pseudo, oracle, phi);
    rep.semigroup_verdict = check_shadowing(space, res.z, rep.pseudo, ShadowKind::A, rep.delta);
    rep.semigroup_pass = rep.semigroup_verdict->pass;
  } catch (const OracleFailure& e) {
    rep.semigroup_failure = e.what();
  }

  try {
    auto res = branch_shadow_construct(rep.pseudo, sys, GlueStrategy::finite_cyclic_reroute, phi);
    (void)res;
  } catch (const ConstructionFailure& e) {
    rep.branch_engine_failed = true;
    rep.branch_failure = e.what();
    rep.branch_partial = e.partial();
  }

  rep.branch_best_statistic = std::numeric_limits<double>::infinity();
  for (int start : space.labels()) {
    const auto x = branch_trajectory(sys, SpacePoint::label(start), spec.t_min).x;
    auto v = check_shadowing(space, x, rep.pseudo, ShadowKind::A, rep.delta);
    rep.branch_best_statistic = std::min(rep.branch_best_statistic, v.statistic);
    rep.branch_pass = rep.branch_pass || v.pass;
    rep.branch_exhaustive.push_back(v);
  }
  return rep;
}

}  // namespace shadowing
