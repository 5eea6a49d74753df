#pragma once

// Pseudo-trajectory builders: perturbation models and semi-trajectory joins.

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shadowing/semigroup.hpp"

namespace shadowing {

/// |gap| = eps at every step, random sign.
struct UniformModel {
  double eps = 0.0;
};

/// |N(0, sigma)| clipped at gamma_max, random sign.
struct ClippedGaussianModel {
  double sigma = 0.0;
  double gamma_max = 0.0;
};

/// One gap at step t -> t+1; the sign of `amplitude` is the displacement sign.
struct SingleModel {
  Time t = 0;
  double amplitude = 0.0;
};

/// Signed gaps at chosen steps.
struct ExplicitModel {
  std::vector<std::pair<Time, double>> gaps;
};

/// With probability p a gap of size `amplitude`, random sign.
struct BernoulliModel {
  double p = 0.0;
  double amplitude = 0.0;
};

using PerturbationModel =
    std::variant<UniformModel, ClippedGaussianModel, SingleModel, ExplicitModel, BernoulliModel>;

enum class BuildDirection {
  forward,   // y_{t+1} = g(y_t) + s*gap, start at t_min
  backward,  // y_t = g^-1(y_{t+1} - s*gap), start at t_max; keeps expanding maps O(1)
};

struct PerturbSpec {
  PerturbationModel model = UniformModel{};
  Time t_min = 0;
  Time t_max = 0;
  SpacePoint start = SpacePoint::real(0.0);
  BuildDirection direction = BuildDirection::forward;
  std::optional<std::vector<GeneratorId>> word;  // default: first generator every step
};

/// Signed gap per step t_min..t_max-1 drawn from the model.
std::vector<double> draw_gaps(const PerturbationModel& model, Time t_min, Time t_max, std::mt19937_64& rng);

/// Builds the pseudo-trajectory. On finite spaces a positive gap moves the
/// next point to the smallest label outside G y_t (forward only).
PseudoTrajectory make_pseudo(const GeneratorSet& g, const PerturbSpec& spec, std::mt19937_64& rng);

enum class JoinAnchor {
  through,  // the left semi-trajectory would reach u at t0
  end,      // the left semi-trajectory ends at u at t0 - 1
};

struct JoinSpec {
  GeneratorId left_generator;
  SpacePoint u = SpacePoint::real(0.0);
  JoinAnchor anchor = JoinAnchor::through;
  GeneratorId right_generator;
  SpacePoint v = SpacePoint::real(0.0);
  Time t_min = -16;
  Time t0 = 0;
  Time t_max = 16;
};

struct JoinSegments {
  Trajectory left;   // [t_min, t0-1]
  Trajectory right;  // [t0, t_max]
};

/// Backward semi-trajectory of u joined to the forward semi-trajectory of v.
/// Throws ValidationError when the backward side runs out of preimages.
JoinSegments build_join(const GeneratorSet& g, const JoinSpec& spec);

}  // namespace shadowing
