#pragma once

// Moving shadowing pairs across a conjugacy or a time reversal.

#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shadowing/semigroup.hpp"
#include "shadowing/verdicts.hpp"

namespace shadowing {

/// sign(x) * scale * |x|^p
struct SignedPower {
  double p = 1.0;
  double scale = 1.0;
};

using Homeomorphism = std::variant<Affine, SignedPower, FiniteTable>;

SpacePoint apply_homeo(const Homeomorphism& h, const SpacePoint& x);
std::string describe(const Homeomorphism& h);

enum class ConjugacyDirection {
  h_f_equals_g_h,  // h o f = g o h, h maps the f-space to the g-space
  h_g_equals_f_h,  // h o g = f o h, h maps the g-space to the f-space
};

struct ConjugatePair {
  GeneratorId f_id;
  GeneratorId g_id;
};

struct ConjugacySpec {
  Homeomorphism forward;
  Homeomorphism inverse;
  ConjugacyDirection direction = ConjugacyDirection::h_f_equals_g_h;
  std::vector<ConjugatePair> pairs;  // one shared h for every pair
  double region_lo = -10.0;          // sample region in the source space
  double region_hi = 10.0;
};

struct IntertwiningCheck {
  bool ok = true;
  double max_residual = 0.0;     // |h(src x) - tgt(h x)| over the grid
  double max_roundtrip = 0.0;    // |h^-1(h x) - x|
  double worst_x = 0.0;
};

/// Source/target systems are derived from the direction: for h_f_equals_g_h
/// the source is f, otherwise g. 1000-point grid on the region.
IntertwiningCheck validate_intertwining(const ConjugacySpec& spec, const GeneratorSet& f_system,
                                        const GeneratorSet& g_system);

struct SamplePair {
  double a = 0.0;
  double b = 0.0;
};

/// Random pairs in [lo, hi] plus multiscale probes (+-10^-k around 0 when
/// the interval contains 0, around lo otherwise).
std::vector<SamplePair> sample_pairs(double lo, double hi, std::size_t n_random, std::mt19937_64& rng);

struct DecadeRatio {
  int decade = 0;         // floor(log10 separation)
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

struct BiLipschitzEstimate {
  double c_lower = 0.0;  // min rho(ha,hb)/rho(a,b)
  double c_upper = 0.0;  // max
  double c = 0.0;        // max(c_upper, 1/c_lower)
  bool divergent = false;
  std::size_t used_pairs = 0;
  std::size_t skipped_pairs = 0;
  std::vector<DecadeRatio> decades;
  std::string diagnostics;
};

/// Divergence: the per-decade max ratio (or inverse min ratio) grows by at
/// least 1.2x per decade over at least 3 consecutive shrinking decades.
BiLipschitzEstimate estimate_bilipschitz(const Homeomorphism& h, const std::vector<SamplePair>& pairs);

class TransferRefused : public std::runtime_error {
 public:
  TransferRefused(const std::string& what, BiLipschitzEstimate estimate)
      : std::runtime_error(what), estimate_(std::move(estimate)) {}
  const BiLipschitzEstimate& estimate() const noexcept { return estimate_; }

 private:
  BiLipschitzEstimate estimate_;
};

struct TransferResult {
  PseudoTrajectory y_image;
  Trajectory x_image;
  BiLipschitzEstimate estimate;
  IntertwiningCheck intertwining;
  ShadowVerdict before_u, after_u, before_a, after_a;
  bool bound_holds = true;  // after <= C * before for both statistics
};

/// y, x live in the source space. Throws TransferRefused if the intertwining
/// fails or C diverges on the hull of the data united with the region.
TransferResult conjugate_transfer(const ConjugacySpec& spec, const GeneratorSet& f_system,
                                  const GeneratorSet& g_system, const PseudoTrajectory& y, const Trajectory& x,
                                  double delta, std::uint64_t seed = 0);

struct InversionResult {
  GeneratorSet inverse_system;
  PseudoTrajectory y_reversed;
  Trajectory x_reversed;
  double c_lower = 0.0;
  std::vector<StepGap> original_gaps;
  std::vector<StepGap> reversed_gaps;
  bool bound_holds = true;      // reversed gap at k <= gap at -k-1 / C_lower
  bool x_reversed_valid = true;
};

/// Time reversal y''_k = y_{-k} as objects of the f^-1 system.
/// Throws std::domain_error if f is not a bijection.
InversionResult invert_transfer(const Generator& f, const Space& space, const PseudoTrajectory& y,
                                const Trajectory& x);

}  // namespace shadowing
