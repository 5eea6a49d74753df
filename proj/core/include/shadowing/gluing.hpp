#pragma once

// Single-perturbation gluing: join a backward and a forward true segment into
// one true trajectory whose error decays at the rate phi away from the join.

#include <optional>
#include <string>
#include <vector>

#include "shadowing/rate.hpp"
#include "shadowing/semigroup.hpp"

namespace shadowing {

enum class ApproxMode { strong, weak };

enum class GlueStrategy {
  expanding_pick_forward,     // keep the right segment, pull it back through preimages
  contracting_pick_backward,  // keep the left segment, push it forward
  finite_cyclic_reroute,      // rewrite <= 3 generator choices next to the join
  custom_table,               // explicit (from, to) -> word entries
};

std::string to_string(GlueStrategy s);
GlueStrategy parse_strategy(const std::string& name);

/// Joining word for custom_table: starting at label `from` at time t0-1, the
/// word must land on the right segment's point `to` at time t0-1+|word|.
struct CustomGlueEntry {
  int from = 0;
  int to = 0;
  std::vector<GeneratorId> word;
};

/// Fixed generator per step, word[i] drives t_min+i -> t_min+i+1.
struct BranchWord {
  Time t_min = 0;
  std::vector<GeneratorId> word;

  const GeneratorId& at(Time t) const;
  bool covers(Time from, Time to) const;  // steps from..to-1 all present
};

struct GluingOracle {
  ApproxMode mode = ApproxMode::strong;
  GlueStrategy strategy = GlueStrategy::expanding_pick_forward;
  GeneratorSet system;
  std::optional<BranchWord> branch;  // set: only the branch word may be used
  std::vector<CustomGlueEntry> table;
};

struct GlueResult {
  Trajectory x;
  std::vector<double> errors;  // rho(x_t, concat_t) over the union window
  Time t0 = 0;                 // first time of the right segment
  double gap = 0.0;
  std::size_t changed = 0;     // points where x differs from the concatenation
};

/// rho(G y_{t0-1}, y_{t0}) at a join, or the branch generator's distance.
double join_gap(const GluingOracle& oracle, const SpacePoint& left_end, const SpacePoint& right_start,
                Time t0);

/// Throws OracleFailure when the produced trajectory breaks the mode's
/// inequality (worst index attached), ValidationError on malformed segments.
GlueResult glue_pair(const GluingOracle& oracle, const Trajectory& left, const Trajectory& right,
                     const RateFunction& phi);

struct ApproxCheck {
  bool ok = true;
  double worst_ratio = 0.0;
  Time worst_index = 0;
};

/// max_k rho(x_k, y_k) / (phi(k - t0) * gap); weak mode drops the gap factor.
/// A zero bound with a nonzero distance gives ratio infinity.
ApproxCheck verify_strong_approx(const Trajectory& x, const PseudoTrajectory& y, const RateFunction& phi,
                                 Time t0, double gap, ApproxMode mode = ApproxMode::strong);

PseudoTrajectory concatenate_pseudo(const Trajectory& left, const Trajectory& right);

/// Every word of exactly n generators taking u to v, in lexicographic id order.
std::vector<std::vector<GeneratorId>> connecting_words(const GeneratorSet& g, const SpacePoint& u,
                                                        const SpacePoint& v, std::size_t n);

}  // namespace shadowing
