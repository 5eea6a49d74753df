#include "shadowing/perturb.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace shadowing {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double random_sign(std::mt19937_64& rng) { return (rng() & 1U) != 0U ? 1.0 : -1.0; }

// Preimage of y under map nearest to `near`, ties to the smaller value.
std::optional<SpacePoint> pick_preimage(const EndomorphismSpec& map, const SpacePoint& y, const SpacePoint& near) {
  const auto pre = preimages(map, y);
  if (pre.empty()) return std::nullopt;
  SpacePoint best = pre.front();
  for (const auto& p : pre) {
    if (std::abs(p.value() - near.value()) < std::abs(best.value() - near.value())) best = p;
  }
  return best;
}

}  // namespace

std::vector<double> draw_gaps(const PerturbationModel& model, Time t_min, Time t_max, std::mt19937_64& rng) {
  if (t_max <= t_min) throw ValidationError("perturbation window needs t_max > t_min");
  const auto steps = static_cast<std::size_t>(t_max - t_min);
  std::vector<double> gaps(steps, 0.0);
  std::visit(overloaded{
                 [&](const UniformModel& m) {
                   if (m.eps < 0.0) throw ValidationError("uniform eps must be >= 0");
                   for (auto& g : gaps) g = m.eps * random_sign(rng);
                 },
                 [&](const ClippedGaussianModel& m) {
                   if (!(m.sigma >= 0.0) || !(m.gamma_max > 0.0) || !std::isfinite(m.gamma_max)) {
                     throw ValidationError("clipped gaussian needs sigma >= 0 and finite gamma_max > 0");
                   }
                   std::normal_distribution<double> n(0.0, m.sigma > 0.0 ? m.sigma : 1.0);
                   for (auto& g : gaps) {
                     const double mag = m.sigma > 0.0 ? std::min(std::abs(n(rng)), m.gamma_max) : 0.0;
                     g = mag * random_sign(rng);
                   }
                 },
                 [&](const SingleModel& m) {
                   if (m.t < t_min || m.t >= t_max) throw ValidationError("single perturbation outside the window");
                   gaps[static_cast<std::size_t>(m.t - t_min)] = m.amplitude;
                 },
                 [&](const ExplicitModel& m) {
                   for (const auto& [t, a] : m.gaps) {
                     if (t < t_min || t >= t_max) throw ValidationError(fmt::format("explicit gap at t={} outside the window", t));
                     gaps[static_cast<std::size_t>(t - t_min)] = a;
                   }
                 },
                 [&](const BernoulliModel& m) {
                   if (m.p < 0.0 || m.p > 1.0) throw ValidationError("bernoulli p must lie in [0,1]");
                   std::bernoulli_distribution hit(m.p);
                   for (auto& g : gaps) g = hit(rng) ? m.amplitude * random_sign(rng) : 0.0;
                 },
             },
             model);
  return gaps;
}

PseudoTrajectory make_pseudo(const GeneratorSet& g, const PerturbSpec& spec, std::mt19937_64& rng) {
  const auto gaps = draw_gaps(spec.model, spec.t_min, spec.t_max, rng);
  const std::size_t steps = gaps.size();
  std::vector<GeneratorId> word = spec.word.value_or(std::vector<GeneratorId>(steps, g.at(0).id));
  if (word.size() != steps) {
    throw ValidationError(fmt::format("perturbation word has {} entries, window has {} steps", word.size(), steps));
  }
  if (!g.space().contains(spec.start)) throw ValidationError("start point is outside the space");

  PseudoTrajectory y;
  y.t_min = spec.t_min;
  y.points.resize(steps + 1);
  const bool finite = g.space().kind() == SpaceKind::finite_discrete;
  auto map_at = [&](std::size_t i) -> const EndomorphismSpec& { return g.at(g.require(word[i])).map; };

  if (spec.direction == BuildDirection::forward || finite) {
    if (finite && spec.direction == BuildDirection::backward) {
      throw ValidationError("backward construction is only available on the real line");
    }
    y.points[0] = spec.start;
    for (std::size_t i = 0; i < steps; ++i) {
      const SpacePoint image = apply(map_at(i), y.points[i]);
      if (!finite) {
        y.points[i + 1] = SpacePoint::real(image.value() + gaps[i]);
      } else if (gaps[i] == 0.0) {
        y.points[i + 1] = image;
      } else {
        const auto img = semigroup_image(g, y.points[i]);
        auto it = std::find_if(g.space().labels().begin(), g.space().labels().end(), [&](int l) {
          return std::find(img.begin(), img.end(), SpacePoint::label(l)) == img.end();
        });
        if (it == g.space().labels().end()) {
          throw ValidationError(fmt::format("no label lies outside G y at t={}", spec.t_min + static_cast<Time>(i)));
        }
        y.points[i + 1] = SpacePoint::label(*it);
      }
    }
  } else {
    y.points[steps] = spec.start;
    for (std::size_t i = steps; i-- > 0;) {
      const SpacePoint target = SpacePoint::real(y.points[i + 1].value() - gaps[i]);
      auto p = pick_preimage(map_at(i), target, y.points[i + 1]);
      if (!p) {
        throw ValidationError(fmt::format("no preimage for the backward build at t={}", spec.t_min + static_cast<Time>(i)));
      }
      y.points[i] = *p;
    }
  }
  y.reference_word = std::move(word);
  return y;
}

JoinSegments build_join(const GeneratorSet& g, const JoinSpec& spec) {
  if (!(spec.t_min < spec.t0 && spec.t0 <= spec.t_max)) throw ValidationError("join needs t_min < t0 <= t_max");
  const auto& lmap = g.at(g.require(spec.left_generator)).map;
  const auto& rmap = g.at(g.require(spec.right_generator)).map;

  auto back_step = [&](const SpacePoint& y) -> SpacePoint {
    const auto pre = preimages(lmap, y);
    if (pre.empty()) throw ValidationError(fmt::format("'{}' has no preimage of {}", spec.left_generator, to_string(y)));
    SpacePoint best = pre.front();
    if (y.is_real()) {
      for (const auto& p : pre) {
        if (std::abs(p.value() - y.value()) < std::abs(best.value() - y.value())) best = p;
      }
    }
    return best;
  };

  JoinSegments out;
  SpacePoint cur = spec.anchor == JoinAnchor::end ? spec.u : back_step(spec.u);
  std::vector<SpacePoint> back{cur};
  for (Time t = spec.t0 - 2; t >= spec.t_min; --t) {
    cur = back_step(cur);
    back.push_back(cur);
  }
  out.left.t_min = spec.t_min;
  out.left.points.assign(back.rbegin(), back.rend());
  out.left.word.assign(out.left.points.size() - 1, spec.left_generator);

  out.right.t_min = spec.t0;
  out.right.points.push_back(spec.v);
  for (Time t = spec.t0; t < spec.t_max; ++t) {
    out.right.points.push_back(apply(rmap, out.right.points.back()));
    out.right.word.push_back(spec.right_generator);
  }
  return out;
}

}  // namespace shadowing
