#include "shadowing/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

std::string to_string(GlueStrategy s) {
  switch (s) {
    case GlueStrategy::expanding_pick_forward: return "expanding-pick-forward";
    case GlueStrategy::contracting_pick_backward: return "contracting-pick-backward";
    case GlueStrategy::finite_cyclic_reroute: return "finite-cyclic-reroute";
    case GlueStrategy::custom_table: return "custom-table";
  }
  return "?";
}

GlueStrategy parse_strategy(const std::string& name) {
  for (auto s : {GlueStrategy::expanding_pick_forward, GlueStrategy::contracting_pick_backward,
                 GlueStrategy::finite_cyclic_reroute, GlueStrategy::custom_table}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument(fmt::format("unknown glue strategy '{}'", name));
}

const GeneratorId& BranchWord::at(Time t) const {
  if (t < t_min || t >= t_min + static_cast<Time>(word.size())) {
    throw ValidationError(fmt::format("branch word does not cover step t={}", t));
  }
  return word[static_cast<std::size_t>(t - t_min)];
}

bool BranchWord::covers(Time from, Time to) const {
  return from >= t_min && to <= t_min + static_cast<Time>(word.size());
}

PseudoTrajectory concatenate_pseudo(const Trajectory& left, const Trajectory& right) {
  if (left.t_max() + 1 != right.t_min) {
    throw ValidationError(fmt::format("segments do not abut: left ends at {}, right starts at {}",
                                      left.t_max(), right.t_min));
  }
  PseudoTrajectory y;
  y.t_min = left.t_min;
  y.points = left.points;
  y.points.insert(y.points.end(), right.points.begin(), right.points.end());
  return y;
}

namespace {

struct JoinStep {
  double gap = 0.0;
  GeneratorId id;
};

JoinStep join_step(const GluingOracle& oracle, const SpacePoint& u, const SpacePoint& v, Time t0) {
  const auto& g = oracle.system;
  if (oracle.branch) {
    const auto& id = oracle.branch->at(t0 - 1);
    return {g.space().distance(apply(g.at(g.require(id)).map, u), v), id};
  }
  JoinStep best{std::numeric_limits<double>::infinity(), {}};
  for (const auto& gen : g.generators()) {
    const double d = g.space().distance(apply(gen.map, u), v);
    if (d < best.gap) best = {d, gen.id};
  }
  return best;
}

void check_segment(const GluingOracle& oracle, const Trajectory& seg, const char* name) {
  try {
    validate_trajectory(oracle.system, seg);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{} segment: {}", name, e.what()));
  }
  if (oracle.branch) {
    for (std::size_t i = 0; i < seg.word.size(); ++i) {
      const Time t = seg.t_min + static_cast<Time>(i);
      if (seg.word[i] != oracle.branch->at(t)) {
        throw ValidationError(fmt::format("{} segment leaves the branch at t={}", name, t));
      }
    }
  }
}

// Preimage of `target` nearest to `guide`; ties go to the smaller value.
std::optional<SpacePoint> nearest_preimage(const Space& space, const EndomorphismSpec& map,
                                           const SpacePoint& target, const SpacePoint& guide) {
  std::optional<SpacePoint> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : preimages(map, target)) {
    const double d = space.distance(p, guide);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

void pull_back(const GluingOracle& oracle, const Trajectory& left, const JoinStep& join, Trajectory& x) {
  const auto& g = oracle.system;
  const Time t0 = left.t_max() + 1;
  for (Time t = t0 - 1; t >= left.t_min; --t) {
    const std::size_t i = static_cast<std::size_t>(t - x.t_min);
    const GeneratorId& id = oracle.branch ? oracle.branch->at(t)
                            : t == t0 - 1 ? join.id
                                          : left.word[static_cast<std::size_t>(t - left.t_min)];
    const SpacePoint& guide = left.at(t);
    auto p = nearest_preimage(g.space(), g.at(g.require(id)).map, x.points[i + 1], guide);
    GeneratorId used = id;
    if (!p && !oracle.branch) {
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto& gen : g.generators()) {
        auto q = nearest_preimage(g.space(), gen.map, x.points[i + 1], guide);
        if (q && g.space().distance(*q, guide) < best_d) {
          best_d = g.space().distance(*q, guide);
          p = q;
          used = gen.id;
        }
      }
    }
    if (!p) {
      throw OracleFailure(fmt::format("no preimage available at t={}", t), t,
                          std::numeric_limits<double>::infinity());
    }
    x.points[i] = *p;
    x.word[i] = used;
  }
}

void push_forward(const GluingOracle& oracle, const Trajectory& right, const JoinStep& join, Trajectory& x) {
  const auto& g = oracle.system;
  const Time t0 = right.t_min;
  for (Time t = t0 - 1; t < right.t_max(); ++t) {
    const std::size_t i = static_cast<std::size_t>(t - x.t_min);
    const GeneratorId& id = oracle.branch ? oracle.branch->at(t)
                            : t == t0 - 1 ? join.id
                                          : right.word[static_cast<std::size_t>(t - right.t_min)];
    x.points[i + 1] = apply(g.at(g.require(id)).map, x.points[i]);
    x.word[i] = id;
  }
}

SpacePoint run_word(const GeneratorSet& g, const std::vector<GeneratorId>& word, SpacePoint p,
                    std::vector<SpacePoint>* trace) {
  for (const auto& id : word) {
    p = apply(g.at(g.require(id)).map, p);
    if (trace) trace->push_back(p);
  }
  return p;
}

// Replace the steps a..b-1 by `word`; returns the number of changed points.
std::size_t splice(const GeneratorSet& g, const std::vector<GeneratorId>& word, Time a, Trajectory& x) {
  std::vector<SpacePoint> trace;
  run_word(g, word, x.at(a), &trace);
  std::size_t changed = 0;
  for (std::size_t j = 0; j + 1 < trace.size(); ++j) {
    auto& slot = x.points[static_cast<std::size_t>(a - x.t_min) + 1 + j];
    if (!(slot == trace[j])) ++changed;
    slot = trace[j];
  }
  for (std::size_t j = 0; j < word.size(); ++j) x.word[static_cast<std::size_t>(a - x.t_min) + j] = word[j];
  return changed;
}

struct RerouteChoice {
  std::size_t changed = 0;
  std::size_t length = 0;
  std::vector<GeneratorId> word;
  Time a = 0;
};

bool better(const RerouteChoice& c, const std::optional<RerouteChoice>& best) {
  if (!best) return true;
  if (c.changed != best->changed) return c.changed < best->changed;
  if (c.length != best->length) return c.length < best->length;
  if (c.word != best->word) return c.word < best->word;
  return c.a < best->a;
}

void reroute(const GluingOracle& oracle, const PseudoTrajectory& y, Time t0, Trajectory& x) {
  constexpr Time kRadius = 3;
  const auto& g = oracle.system;
  std::optional<RerouteChoice> best;
  for (std::size_t len = 2; len <= 3; ++len) {
    for (Time a = t0 - kRadius; a <= t0 - 1; ++a) {
      const Time b = a + static_cast<Time>(len);
      if (a < y.t_min || b > y.t_max() || b < t0 || b > t0 + kRadius) continue;
      std::vector<std::vector<GeneratorId>> words;
      if (oracle.branch) {
        std::vector<GeneratorId> w;
        for (Time t = a; t < b; ++t) w.push_back(oracle.branch->at(t));
        if (run_word(g, w, y.at(a), nullptr) == y.at(b)) words.push_back(std::move(w));
      } else {
        words = connecting_words(g, y.at(a), y.at(b), len);
      }
      for (auto& w : words) {
        Trajectory trial = x;
        const std::size_t changed = splice(g, w, a, trial);
        RerouteChoice c{changed, len, std::move(w), a};
        if (better(c, best)) best = std::move(c);
      }
    }
  }
  if (!best) {
    throw OracleFailure(fmt::format("no reroute within radius {} of t0={}", kRadius, t0), t0,
                        std::numeric_limits<double>::infinity());
  }
  splice(g, best->word, best->a, x);
}

void custom(const GluingOracle& oracle, const PseudoTrajectory& y, Time t0, Trajectory& x) {
  const auto& g = oracle.system;
  if (g.space().kind() != SpaceKind::finite_discrete) {
    throw ValidationError("custom-table gluing needs a finite space");
  }
  const Time a = t0 - 1;
  for (const auto& e : oracle.table) {
    if (y.at(a).label_value() != e.from || e.word.empty()) continue;
    const Time b = a + static_cast<Time>(e.word.size());
    if (b > y.t_max() || y.at(b).label_value() != e.to) continue;
    if (!(run_word(g, e.word, y.at(a), nullptr) == y.at(b))) {
      throw ValidationError(fmt::format("custom glue word {} does not take {} to {}", fmt::join(e.word, ","),
                                        e.from, e.to));
    }
    if (oracle.branch) {
      for (Time t = a; t < b; ++t) {
        if (e.word[static_cast<std::size_t>(t - a)] != oracle.branch->at(t)) {
          throw OracleFailure("custom glue word leaves the branch", t, std::numeric_limits<double>::infinity());
        }
      }
    }
    splice(g, e.word, a, x);
    return;
  }
  throw OracleFailure(fmt::format("no custom glue entry matches the join at t0={}", t0), t0,
                      std::numeric_limits<double>::infinity());
}

}  // namespace

double join_gap(const GluingOracle& oracle, const SpacePoint& left_end, const SpacePoint& right_start, Time t0) {
  return join_step(oracle, left_end, right_start, t0).gap;
}

GlueResult glue_pair(const GluingOracle& oracle, const Trajectory& left, const Trajectory& right,
                     const RateFunction& phi) {
  check_segment(oracle, left, "left");
  check_segment(oracle, right, "right");
  const PseudoTrajectory y = concatenate_pseudo(left, right);
  const Time t0 = right.t_min;
  const JoinStep join = join_step(oracle, left.points.back(), right.points.front(), t0);

  GlueResult r;
  r.t0 = t0;
  r.gap = join.gap;
  r.x.t_min = y.t_min;
  r.x.points = y.points;
  r.x.word = left.word;
  r.x.word.push_back(join.id);
  r.x.word.insert(r.x.word.end(), right.word.begin(), right.word.end());

  if (join.gap > kExactTolerance) {
    switch (oracle.strategy) {
      case GlueStrategy::expanding_pick_forward: pull_back(oracle, left, join, r.x); break;
      case GlueStrategy::contracting_pick_backward: push_forward(oracle, right, join, r.x); break;
      case GlueStrategy::finite_cyclic_reroute: reroute(oracle, y, t0, r.x); break;
      case GlueStrategy::custom_table: custom(oracle, y, t0, r.x); break;
    }
  }

  const auto& space = oracle.system.space();
  r.errors.reserve(y.points.size());
  for (std::size_t i = 0; i < y.points.size(); ++i) {
    r.errors.push_back(space.distance(r.x.points[i], y.points[i]));
    if (r.errors.back() > 0.0) ++r.changed;
  }

  const auto check = verify_strong_approx(r.x, y, phi, t0, join.gap, oracle.mode);
  if (!check.ok) {
    throw OracleFailure(fmt::format("{} glue at t0={} breaks the {} bound at t={} (ratio {})",
                                    to_string(oracle.strategy), t0,
                                    oracle.mode == ApproxMode::strong ? "strong" : "weak", check.worst_index,
                                    check.worst_ratio),
                        check.worst_index, check.worst_ratio);
  }
  try {
    validate_trajectory(oracle.system, r.x);
  } catch (const ValidationError& e) {
    throw OracleFailure(fmt::format("glue output is not a trajectory: {}", e.what()), t0,
                        std::numeric_limits<double>::infinity());
  }
  if (oracle.branch) {
    for (std::size_t i = 0; i < r.x.word.size(); ++i) {
      const Time t = r.x.t_min + static_cast<Time>(i);
      if (r.x.word[i] != oracle.branch->at(t)) {
        throw OracleFailure(fmt::format("glue output leaves the branch at t={}", t), t,
                            std::numeric_limits<double>::infinity());
      }
    }
  }
  return r;
}

ApproxCheck verify_strong_approx(const Trajectory& x, const PseudoTrajectory& y, const RateFunction& phi,
                                 Time t0, double gap, ApproxMode mode) {
  if (x.t_min != y.t_min || x.points.size() != y.points.size()) {
    throw ValidationError("verify_strong_approx: windows differ");
  }
  ApproxCheck c;
  c.worst_index = x.t_min;
  for (std::size_t i = 0; i < x.points.size(); ++i) {
    const Time t = x.t_min + static_cast<Time>(i);
    const double d = std::abs(x.points[i].is_real() ? x.points[i].value() - y.points[i].value()
                                                    : (x.points[i] == y.points[i] ? 0.0 : 1.0));
    const double bound = phi(t - t0) * (mode == ApproxMode::strong ? gap : 1.0);
    double ratio = 0.0;
    if (bound > 0.0) {
      ratio = d / bound;
    } else if (d > kExactTolerance) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (d > bound + kExactTolerance) c.ok = false;
    if (ratio > c.worst_ratio) {
      c.worst_ratio = ratio;
      c.worst_index = t;
    }
  }
  return c;
}

std::vector<std::vector<GeneratorId>> connecting_words(const GeneratorSet& g, const SpacePoint& u,
                                                        const SpacePoint& v, std::size_t n) {
  std::vector<GeneratorId> ids;
  for (const auto& gen : g.generators()) ids.push_back(gen.id);
  std::sort(ids.begin(), ids.end());
  std::vector<std::vector<GeneratorId>> out;
  std::vector<std::size_t> digits(n, 0);
  std::vector<GeneratorId> w(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) w[i] = ids[digits[i]];
    if (g.space().distance(run_word(g, w, u, nullptr), v) <= kExactTolerance) out.push_back(w);
    std::size_t i = n;
    while (i > 0 && ++digits[i - 1] == ids.size()) digits[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

}  // namespace shadowing
