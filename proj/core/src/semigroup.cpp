#include "shadowing/semigroup.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

GeneratorSet::GeneratorSet(Space space, std::vector<Generator> generators)
    : space_(std::move(space)), gens_(std::move(generators)) {
  if (gens_.empty()) throw std::invalid_argument("generator set is empty");
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    const auto& g = gens_[i];
    if (g.map.space_kind() != space_.kind()) {
      throw std::invalid_argument(fmt::format("generator '{}' acts on a different space", g.id));
    }
    if (const auto* t = std::get_if<FiniteTable>(&g.map.variant())) {
      auto dom = t->domain;
      std::sort(dom.begin(), dom.end());
      if (dom != space_.labels()) {
        throw std::invalid_argument(fmt::format("generator '{}' table domain differs from the label set", g.id));
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (gens_[j].id == g.id) throw std::invalid_argument(fmt::format("duplicate generator id '{}'", g.id));
    }
  }
}

std::optional<std::size_t> GeneratorSet::index_of(const GeneratorId& id) const {
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (gens_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t GeneratorSet::require(const GeneratorId& id) const {
  if (auto i = index_of(id)) return *i;
  throw ValidationError(fmt::format("unknown generator id '{}'", id));
}

std::vector<SpacePoint> semigroup_image(const GeneratorSet& g, const SpacePoint& x) {
  std::vector<SpacePoint> out;
  out.reserve(g.size());
  for (const auto& gen : g.generators()) {
    auto p = apply(gen.map, x);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

PseudoTrajectory as_pseudo(const Trajectory& x) { return {x.t_min, x.points, x.word}; }

void validate_trajectory(const GeneratorSet& g, const Trajectory& x) {
  if (x.points.empty()) throw ValidationError("trajectory has no points");
  if (x.word.size() + 1 != x.points.size()) {
    throw ValidationError(fmt::format("trajectory word has {} entries for {} points", x.word.size(),
                                      x.points.size()));
  }
  for (std::size_t i = 0; i < x.points.size(); ++i) {
    if (!g.space().contains(x.points[i])) {
      throw ValidationError(fmt::format("point at t={} is outside the space", x.t_min + static_cast<Time>(i)));
    }
  }
  for (std::size_t i = 0; i < x.word.size(); ++i) {
    const auto& gen = g.at(g.require(x.word[i]));
    const double d = g.space().distance(apply(gen.map, x.points[i]), x.points[i + 1]);
    if (d > kExactTolerance) {
      throw ValidationError(fmt::format("step t={} -> t+1 under '{}' misses by {}",
                                        x.t_min + static_cast<Time>(i), gen.id, d));
    }
  }
}

bool is_valid_trajectory(const GeneratorSet& g, const Trajectory& x) {
  try {
    validate_trajectory(g, x);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

std::vector<StepGap> step_gaps(const GeneratorSet& g, const PseudoTrajectory& y) {
  std::vector<StepGap> out;
  if (y.points.size() < 2) return out;
  out.reserve(y.points.size() - 1);
  for (std::size_t i = 0; i + 1 < y.points.size(); ++i) {
    StepGap s{y.t_min + static_cast<Time>(i), std::numeric_limits<double>::infinity(), 0};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double d = g.space().distance(apply(g.at(j).map, y.points[i]), y.points[i + 1]);
      if (d < s.gap) {
        s.gap = d;
        s.generator = j;
      }
    }
    out.push_back(s);
  }
  return out;
}

std::vector<StepGap> branch_step_gaps(const GeneratorSet& g, const PseudoTrajectory& y,
                                      const std::vector<GeneratorId>& word) {
  if (word.size() + 1 < y.points.size()) {
    throw ValidationError(fmt::format("branch word has {} entries, window needs {}", word.size(),
                                      y.points.size() - 1));
  }
  std::vector<StepGap> out;
  for (std::size_t i = 0; i + 1 < y.points.size(); ++i) {
    const std::size_t j = g.require(word[i]);
    out.push_back({y.t_min + static_cast<Time>(i),
                   g.space().distance(apply(g.at(j).map, y.points[i]), y.points[i + 1]), j});
  }
  return out;
}

GapProfile gap_profile(const std::vector<StepGap>& gaps) {
  GapProfile p;
  for (const auto& s : gaps) {
    if (s.gap > kExactTolerance) {
      p.entries.push_back({s.t, s.gap});
      p.gap_max = std::max(p.gap_max, s.gap);
    }
  }
  return p;
}

GapProfile gap_profile(const GeneratorSet& g, const PseudoTrajectory& y) {
  return gap_profile(step_gaps(g, y));
}

PseudoFlags classify_pseudo(const PseudoTrajectory& y, const GeneratorSet& g, double eps,
                            std::optional<std::size_t> k_min) {
  if (!(eps > 0.0)) throw std::domain_error("classify_pseudo needs eps > 0");
  const auto gaps = step_gaps(g, y);
  std::vector<double> values;
  values.reserve(gaps.size());
  PseudoFlags f;
  f.is_u = true;
  std::size_t positive = 0;
  for (const auto& s : gaps) {
    const double v = s.gap > kExactTolerance ? s.gap : 0.0;
    values.push_back(v);
    if (v > eps) f.is_u = false;
    if (v > 0.0) ++positive;
  }
  f.is_s = positive == 1;
  f.is_a = max_cesaro(values, y.t_min, k_min).max_average <= eps;
  return f;
}

namespace {

std::vector<SpacePoint> sample_grid(const Space& space) {
  if (space.kind() == SpaceKind::finite_discrete) return space.enumerate();
  std::vector<SpacePoint> pts;
  for (int i = 0; i <= 100; ++i) pts.push_back(SpacePoint::real(-10.0 + 0.2 * i));
  return pts;
}

SpacePoint apply_word(const GeneratorSet& g, const std::vector<GeneratorId>& word, SpacePoint x) {
  for (const auto& id : word) x = apply(g.at(g.require(id)).map, x);
  return x;
}

}  // namespace

void validate_dictionary(const GeneratorSet& old, const GeneratorSet& fresh,
                         const GeneratorDictionary& dictionary) {
  if (!(old.space() == fresh.space())) throw ValidationError("old and new generators act on different spaces");
  const auto grid = sample_grid(old.space());
  for (const auto& gen : fresh.generators()) {
    auto it = dictionary.find(gen.id);
    if (it == dictionary.end()) throw ValidationError(fmt::format("no dictionary word for '{}'", gen.id));
    if (it->second.empty()) throw ValidationError(fmt::format("empty dictionary word for '{}'", gen.id));
    for (const auto& x : grid) {
      const double d = old.space().distance(apply(gen.map, x), apply_word(old, it->second, x));
      if (d > kExactTolerance) {
        throw ValidationError(fmt::format("dictionary word for '{}' differs by {} at x={}", gen.id, d, to_string(x)));
      }
    }
  }
}

PseudoTrajectory reencode_generators(const PseudoTrajectory& y, const GeneratorSet& old,
                                     const GeneratorSet& fresh,
                                     const GeneratorDictionary& dictionary) {
  validate_dictionary(old, fresh, dictionary);
  const auto gaps = y.reference_word ? branch_step_gaps(fresh, y, *y.reference_word) : step_gaps(fresh, y);

  PseudoTrajectory out;
  out.t_min = y.t_min;
  out.reference_word.emplace();
  out.points.push_back(y.points.front());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const auto& word = dictionary.at(fresh.at(gaps[i].generator).id);
    SpacePoint p = y.points[i];
    for (std::size_t j = 0; j + 1 < word.size(); ++j) {
      p = apply(old.at(old.require(word[j])).map, p);
      out.points.push_back(p);
      out.reference_word->push_back(word[j]);
    }
    out.points.push_back(y.points[i + 1]);
    out.reference_word->push_back(word.back());
  }
  return out;
}

}  // namespace shadowing
