#pragma once

// Hand-rolled generators for the property tests. Every generator takes the
// rng explicitly so a failing case can be replayed from its seed.

#include <cmath>
#include <random>
#include <vector>

#include "shadowing/core.hpp"
#include "shadowing/rate.hpp"
#include "shadowing/semigroup.hpp"

namespace shadowing::testing {

inline constexpr double kTol = kExactTolerance;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t size_in(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<SpacePoint> real_set(std::mt19937_64& rng, std::size_t max_size, double radius = 10.0) {
  std::vector<SpacePoint> s(size_in(rng, 1, max_size));
  for (auto& p : s) p = SpacePoint::real(uniform(rng, -radius, radius));
  return s;
}

inline std::vector<SpacePoint> label_set(std::mt19937_64& rng, const Space& space, std::size_t max_size) {
  const auto& labels = space.labels();
  std::vector<SpacePoint> s(size_in(rng, 1, max_size));
  for (auto& p : s) p = SpacePoint::label(labels[size_in(rng, 0, labels.size() - 1)]);
  return s;
}

/// Non-negative table on [-k, k] with a mild geometric tail.
inline RateFunction random_rate(std::mt19937_64& rng) {
  const auto k = static_cast<Time>(size_in(rng, 0, 6));
  std::vector<double> v(static_cast<std::size_t>(2 * k + 1));
  for (auto& x : v) x = uniform(rng, 0.0, 1.0);
  const bool tail = (rng() & 1U) != 0U;
  return RateFunction::tabulated(-k, v, tail ? uniform(rng, 0.0, 0.5) : 0.0, tail ? uniform(rng, 0.1, 0.8) : 0.0);
}

inline Trajectory orbit(const GeneratorSet& g, const std::vector<GeneratorId>& word, Time t_min, SpacePoint x0) {
  Trajectory x{t_min, {x0}, word};
  for (const auto& id : word) x.points.push_back(apply(g.at(g.require(id)).map, x.points.back()));
  return x;
}

inline std::vector<double> real_values(const std::vector<SpacePoint>& pts) {
  std::vector<double> v;
  for (const auto& p : pts) v.push_back(p.value());
  return v;
}

}  // namespace shadowing::testing
