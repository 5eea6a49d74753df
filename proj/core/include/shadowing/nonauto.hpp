#pragma once

// Non-autonomous systems: one fixed generator per time step.

#include <optional>
#include <string>
#include <vector>

#include "shadowing/parallel_gluing.hpp"
#include "shadowing/verdicts.hpp"

namespace shadowing {

struct NonAutoSystem {
  BranchWord branch;
  GeneratorSet generators;

  Time t_min() const { return branch.t_min; }
  Time t_max() const { return branch.t_min + static_cast<Time>(branch.word.size()); }
};

/// Throws ValidationError when a branch id does not resolve.
void validate_system(const NonAutoSystem& sys);

struct BranchTrajectory {
  Trajectory x;
  std::optional<Time> truncated_below;  // first time with no preimage, if any
};

/// Forward points are forced by the branch; backward points pick the
/// preimage nearest to `guide` (or to the next point when no guide is given).
BranchTrajectory branch_trajectory(const NonAutoSystem& sys, const SpacePoint& x0, Time t0,
                                   const PseudoTrajectory* guide = nullptr);

GluingOracle branch_oracle(const NonAutoSystem& sys, GlueStrategy strategy, ApproxMode mode = ApproxMode::strong);

/// shadow_construct restricted to the branch word.
ShadowResult branch_shadow_construct(const PseudoTrajectory& y, const NonAutoSystem& sys, GlueStrategy strategy,
                                     const RateFunction& phi, const ConstructOptions& options = {});

struct BranchCompareSpec {
  int u = 1;  // last point of the left semi-trajectory (time t0 - 1)
  int v = 1;  // first point of the right one (time t0)
  Time t_min = -32;
  Time t_max = 31;
  Time t0 = 0;
  std::optional<double> delta;  // default 6 / window length
};

struct BranchCompareReport {
  PseudoTrajectory pseudo;
  double delta = 0.0;
  bool semigroup_pass = false;
  std::optional<ShadowVerdict> semigroup_verdict;
  std::string semigroup_failure;
  bool branch_pass = false;
  bool branch_engine_failed = false;
  std::string branch_failure;
  std::optional<GluingCertificate> branch_partial;
  std::vector<ShadowVerdict> branch_exhaustive;  // A verdict of every branch trajectory
  double branch_best_statistic = 0.0;
};

/// Finite cyclic example: G = {g, g^-1} on {1,2,3} against the all-g branch.
/// The pseudo-trajectory is a backward g-orbit ending at u joined to a
/// forward g-orbit starting at v.
BranchCompareReport branch_vs_semigroup_report(const BranchCompareSpec& spec);

}  // namespace shadowing
