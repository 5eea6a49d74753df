#pragma once

// Semigroup action, trajectories, pseudo-trajectories and their gaps.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shadowing/core.hpp"
#include "shadowing/maps.hpp"

namespace shadowing {

using GeneratorId = std::string;

struct Generator {
  GeneratorId id;
  EndomorphismSpec map;
};

class GeneratorSet {
 public:
  GeneratorSet(Space space, std::vector<Generator> generators);

  const Space& space() const noexcept { return space_; }
  const std::vector<Generator>& generators() const noexcept { return gens_; }
  std::size_t size() const noexcept { return gens_.size(); }
  const Generator& at(std::size_t i) const { return gens_.at(i); }

  std::optional<std::size_t> index_of(const GeneratorId& id) const;
  /// Throws ValidationError for unknown ids.
  std::size_t require(const GeneratorId& id) const;

 private:
  Space space_;
  std::vector<Generator> gens_;
};

/// Gx = union of g_i x, duplicates removed, in generator order.
std::vector<SpacePoint> semigroup_image(const GeneratorSet& g, const SpacePoint& x);

/// A finite window [t_min, t_max] of a true trajectory. word[i] drives the step
/// from points[i] to points[i+1].
struct Trajectory {
  Time t_min = 0;
  std::vector<SpacePoint> points;
  std::vector<GeneratorId> word;

  Time t_max() const { return t_min + static_cast<Time>(points.size()) - 1; }
  const SpacePoint& at(Time t) const { return points.at(static_cast<std::size_t>(t - t_min)); }
};

struct PseudoTrajectory {
  Time t_min = 0;
  std::vector<SpacePoint> points;
  std::optional<std::vector<GeneratorId>> reference_word;

  Time t_max() const { return t_min + static_cast<Time>(points.size()) - 1; }
  const SpacePoint& at(Time t) const { return points.at(static_cast<std::size_t>(t - t_min)); }
};

PseudoTrajectory as_pseudo(const Trajectory& x);

/// Throws ValidationError naming the first broken step.
void validate_trajectory(const GeneratorSet& g, const Trajectory& x);
bool is_valid_trajectory(const GeneratorSet& g, const Trajectory& x);

/// Gap of the step t -> t+1 and the generator realizing it.
struct StepGap {
  Time t = 0;
  double gap = 0.0;
  std::size_t generator = 0;  // argmin, lowest index on ties
};

/// One entry per step of the window: rho(G y_t, y_{t+1}).
std::vector<StepGap> step_gaps(const GeneratorSet& g, const PseudoTrajectory& y);

/// Same, but each step only sees the generator word[t - y.t_min] (branch mode).
std::vector<StepGap> branch_step_gaps(const GeneratorSet& g, const PseudoTrajectory& y,
                                      const std::vector<GeneratorId>& word);

struct GapEntry {
  Time t = 0;
  double amplitude = 0.0;
};

struct GapProfile {
  std::vector<GapEntry> entries;  // gaps above kExactTolerance, ascending t
  double gap_max = 0.0;
};

GapProfile gap_profile(const GeneratorSet& g, const PseudoTrajectory& y);
GapProfile gap_profile(const std::vector<StepGap>& gaps);

struct PseudoFlags {
  bool is_u = false;
  bool is_a = false;
  bool is_s = false;
};

/// Throws std::domain_error for eps <= 0.
PseudoFlags classify_pseudo(const PseudoTrajectory& y, const GeneratorSet& g, double eps,
                            std::optional<std::size_t> k_min = std::nullopt);

/// new generator id -> old generator ids, applied first to last.
using GeneratorDictionary = std::map<GeneratorId, std::vector<GeneratorId>>;

/// Rewrites y, a pseudo-trajectory of `fresh`, as a pseudo-trajectory of `old`.
/// Each step is expanded into the dictionary word of the generator realizing
/// its gap (or the reference word entry, if y has one); intermediate points are
/// exact images, so the step's gap lands on the last sub-step unchanged. The
/// output starts at y.t_min and carries the old-id word as reference word.
PseudoTrajectory reencode_generators(const PseudoTrajectory& y, const GeneratorSet& old,
                                     const GeneratorSet& fresh,
                                     const GeneratorDictionary& dictionary);

/// Checks every new generator against its dictionary word on a sample grid
/// (101 points in [-10, 10], or every label). Throws ValidationError.
void validate_dictionary(const GeneratorSet& old, const GeneratorSet& fresh,
                         const GeneratorDictionary& dictionary);

}  // namespace shadowing
