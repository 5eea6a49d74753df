#pragma once

// Shadowing checks (U/A/L) and enumeration-based falsifiers.

#include <optional>
#include <string>
#include <vector>

#include "shadowing/rate.hpp"
#include "shadowing/semigroup.hpp"

namespace shadowing {

enum class ShadowKind { U, A, L };

std::string to_string(ShadowKind k);

/// Vanishing envelope for L: amplitude * phi(t - center).
struct LimitEnvelope {
  double amplitude = 0.0;
  RateFunction rate = RateFunction::geometric(0.5);
  Time center = 0;
};

struct ShadowVerdict {
  ShadowKind kind = ShadowKind::U;
  double delta = 0.0;
  double statistic = 0.0;  // sup, max Cesaro, or max outer-quarter distance for L
  bool pass = false;
  std::size_t k_min = 0;   // Cesaro window (A)
  std::size_t k_max = 0;
  Time tail_lo = 0;        // L: times <= tail_lo or >= tail_hi are checked
  Time tail_hi = 0;
  double envelope_worst_ratio = 0.0;
};

struct CheckOptions {
  std::optional<std::size_t> k_min;
  /// Default for L: amplitude = max distance, center = its time, geometric 1/2.
  std::optional<LimitEnvelope> envelope;
};

/// Throws ValidationError when the windows differ.
ShadowVerdict check_shadowing(const Space& space, const Trajectory& x, const PseudoTrajectory& y, ShadowKind kind,
                              double delta, const CheckOptions& options = {});

std::vector<double> pointwise_distances(const Space& space, const std::vector<SpacePoint>& a,
                                        const std::vector<SpacePoint>& b);

enum class FalsifyStatistic { U, A };

struct FalsifyBudget {
  std::size_t word_length = 12;      // longest window (in steps) enumerated over words
  double grid_spacing = 1e-3;        // start grid for real spaces
  double grid_radius = 0.1;
  int refine_iters = 60;             // ternary refinement (single generator)
  std::uint64_t max_candidates = 200'000'000;
  std::optional<double> grid_center; // default: the pseudo point at the anchor
};

struct FalsificationWitness {
  PseudoTrajectory pseudo;
  FalsifyBudget budget;
  FalsifyStatistic statistic = FalsifyStatistic::U;
  double delta = 0.0;
  double lower_bound = 0.0;  // min statistic over enumerated candidates
  bool claim = false;        // lower_bound > delta and the search was conclusive
  bool conclusive = true;
  std::uint64_t candidates = 0;
  std::optional<Trajectory> best;
  std::string method;
  std::string diagnostics;
};

/// Enumerates true trajectories on y's window and reports the closest one.
/// Finite spaces: every start x every word. Single real generator: start grid
/// at both window ends plus ternary refinement. Several real generators:
/// start grid at t_min x every word, depth-first with pruning for U.
FalsificationWitness falsify_shadowing(const GeneratorSet& system, const PseudoTrajectory& y, double delta,
                                       const FalsifyBudget& budget = {},
                                       FalsifyStatistic statistic = FalsifyStatistic::U);

}  // namespace shadowing
