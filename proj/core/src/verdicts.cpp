#include "shadowing/verdicts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

std::string to_string(ShadowKind k) {
  switch (k) {
    case ShadowKind::U: return "U";
    case ShadowKind::A: return "A";
    case ShadowKind::L: return "L";
  }
  return "?";
}

std::vector<double> pointwise_distances(const Space& space, const std::vector<SpacePoint>& a,
                                        const std::vector<SpacePoint>& b) {
  if (a.size() != b.size()) throw ValidationError("sequences have different lengths");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = space.distance(a[i], b[i]);
  return d;
}

ShadowVerdict check_shadowing(const Space& space, const Trajectory& x, const PseudoTrajectory& y, ShadowKind kind,
                              double delta, const CheckOptions& options) {
  if (x.t_min != y.t_min || x.points.size() != y.points.size()) {
    throw ValidationError(fmt::format("windows differ: [{},{}] vs [{},{}]", x.t_min, x.t_max(), y.t_min, y.t_max()));
  }
  const auto d = pointwise_distances(space, x.points, y.points);
  ShadowVerdict v;
  v.kind = kind;
  v.delta = delta;
  switch (kind) {
    case ShadowKind::U:
      v.statistic = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
      v.pass = v.statistic <= delta;
      break;
    case ShadowKind::A: {
      const auto stat = max_cesaro(d, y.t_min, options.k_min);
      v.statistic = stat.max_average;
      v.k_min = stat.k_min;
      v.k_max = stat.k_max;
      v.pass = v.statistic <= delta;
      break;
    }
    case ShadowKind::L: {
      LimitEnvelope env;
      if (options.envelope) {
        env = *options.envelope;
      } else {
        auto it = std::max_element(d.begin(), d.end());
        env.amplitude = d.empty() ? 0.0 : *it;
        env.center = y.t_min + (d.empty() ? 0 : static_cast<Time>(it - d.begin()));
      }
      const auto quarter = static_cast<Time>(d.size() / 4);
      v.tail_lo = y.t_min + quarter - 1;
      v.tail_hi = y.t_max() - quarter + 1;
      v.pass = true;
      for (std::size_t i = 0; i < d.size(); ++i) {
        const Time t = y.t_min + static_cast<Time>(i);
        if (t > v.tail_lo && t < v.tail_hi) continue;
        const double bound = env.amplitude * env.rate(t - env.center);
        v.statistic = std::max(v.statistic, d[i]);
        if (d[i] > bound + kExactTolerance) v.pass = false;
        const double ratio = bound > 0.0 ? d[i] / bound
                             : d[i] > kExactTolerance ? std::numeric_limits<double>::infinity()
                                                      : 0.0;
        v.envelope_worst_ratio = std::max(v.envelope_worst_ratio, ratio);
      }
      break;
    }
  }
  return v;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Search {
  const GeneratorSet& g;
  const PseudoTrajectory& y;
  FalsifyStatistic statistic;
  double best = kInf;
  std::vector<SpacePoint> best_points;
  std::vector<GeneratorId> best_word;
  std::uint64_t visited = 0;

  double score(const std::vector<double>& d) const {
    if (statistic == FalsifyStatistic::U) return *std::max_element(d.begin(), d.end());
    return max_cesaro(d, y.t_min).max_average;
  }

  void offer(double s, std::vector<SpacePoint> pts, std::vector<GeneratorId> word) {
    ++visited;
    if (s < best) {
      best = s;
      best_points = std::move(pts);
      best_word = std::move(word);
    }
  }
};

// Depth-first over words from a fixed start. `d` holds distances so far.
void dfs(Search& s, std::vector<SpacePoint>& pts, std::vector<GeneratorId>& word, std::vector<double>& d,
         double running_max) {
  const std::size_t depth = pts.size();
  if (depth == s.y.points.size()) {
    const double score = s.statistic == FalsifyStatistic::U ? running_max : s.score(d);
    s.offer(score, pts, word);
    return;
  }
  for (const auto& gen : s.g.generators()) {
    SpacePoint next;
    try {
      next = apply(gen.map, pts.back());
    } catch (const std::domain_error&) {
      continue;  // overflowed to a non-finite value
    }
    const double dist = s.g.space().distance(next, s.y.points[depth]);
    const double m = std::max(running_max, dist);
    if (s.statistic == FalsifyStatistic::U && m >= s.best) continue;  // cannot improve
    pts.push_back(next);
    word.push_back(gen.id);
    d.push_back(dist);
    dfs(s, pts, word, d, m);
    pts.pop_back();
    word.pop_back();
    d.pop_back();
  }
}

void run_from(Search& s, const SpacePoint& start) {
  std::vector<SpacePoint> pts{start};
  std::vector<GeneratorId> word;
  const double d0 = s.g.space().distance(start, s.y.points.front());
  std::vector<double> d{d0};
  if (s.statistic == FalsifyStatistic::U && d0 >= s.best) return;
  dfs(s, pts, word, d, d0);
}

// Single real generator: score of the orbit through `start` at the anchor.
struct OrbitScorer {
  const GeneratorSet& g;
  const PseudoTrajectory& y;
  FalsifyStatistic statistic;
  bool backward = false;

  double operator()(double start, std::vector<double>* out_points = nullptr) const {
    const auto& map = g.at(0).map;
    const std::size_t n = y.points.size();
    std::vector<double> pts(n);
    std::vector<double> d(n);
    if (!backward) {
      pts[0] = start;
      for (std::size_t i = 1; i < n; ++i) pts[i] = apply_real(map, pts[i - 1]);
    } else {
      pts[n - 1] = start;
      for (std::size_t i = n - 1; i-- > 0;) {
        std::vector<SpacePoint> pre;
        try {
          pre = preimages(map, SpacePoint::real(pts[i + 1]));
        } catch (const std::exception&) {
          return kInf;
        }
        if (pre.empty()) return kInf;  // orbit does not reach back across the window
        double best = pre.front().value();
        for (const auto& p : pre) {
          if (std::abs(p.value() - y.points[i].value()) < std::abs(best - y.points[i].value())) best = p.value();
        }
        pts[i] = best;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(pts[i])) return kInf;
      d[i] = std::abs(pts[i] - y.points[i].value());
    }
    if (out_points) *out_points = pts;
    if (statistic == FalsifyStatistic::U) return *std::max_element(d.begin(), d.end());
    return max_cesaro(d, y.t_min).max_average;
  }
};

void single_generator(Search& s, const FalsifyBudget& b, FalsificationWitness& w) {
  const auto steps = static_cast<std::int64_t>(std::llround(b.grid_radius / b.grid_spacing));
  for (bool backward : {false, true}) {
    OrbitScorer score{s.g, s.y, s.statistic, backward};
    const double anchor = backward ? s.y.points.back().value() : s.y.points.front().value();
    const double center = b.grid_center.value_or(anchor);
    double best_start = center;
    double best = kInf;
    for (std::int64_t j = -steps; j <= steps; ++j) {
      const double start = center + static_cast<double>(j) * b.grid_spacing;
      const double v = score(start);
      ++w.candidates;
      if (v < best) {
        best = v;
        best_start = start;
      }
    }
    // Ternary refinement around the best grid point; only meaningful where
    // the score is unimodal, but every evaluation is a genuine candidate.
    double lo = best_start - b.grid_spacing;
    double hi = best_start + b.grid_spacing;
    for (int it = 0; it < b.refine_iters; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      const double v1 = score(m1);
      const double v2 = score(m2);
      w.candidates += 2;
      if (v1 < best) {
        best = v1;
        best_start = m1;
      }
      if (v2 < best) {
        best = v2;
        best_start = m2;
      }
      if (v1 <= v2) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    if (best < s.best) {
      std::vector<double> pts;
      score(best_start, &pts);
      s.best = best;
      s.best_points.clear();
      for (double p : pts) s.best_points.push_back(SpacePoint::real(p));
      s.best_word.assign(pts.size() - 1, s.g.at(0).id);
    }
  }
}

}  // namespace

FalsificationWitness falsify_shadowing(const GeneratorSet& system, const PseudoTrajectory& y, double delta,
                                       const FalsifyBudget& budget, FalsifyStatistic statistic) {
  if (y.points.size() < 2) throw ValidationError("pseudo-trajectory window must have at least 2 points");
  FalsificationWitness w;
  w.pseudo = y;
  w.budget = budget;
  w.statistic = statistic;
  w.delta = delta;
  Search s{system, y, statistic, kInf, {}, {}, 0};
  const std::size_t steps = y.points.size() - 1;
  const bool finite = system.space().kind() == SpaceKind::finite_discrete;

  if (!finite && system.size() == 1) {
    w.method = "single-generator start grid at both window ends with ternary refinement";
    single_generator(s, budget, w);
  } else {
    w.method = finite ? "exhaustive starts x words" : "start grid at t_min x every word";
    const double n_starts =
        finite ? static_cast<double>(system.space().labels().size())
               : 2.0 * std::floor(budget.grid_radius / budget.grid_spacing + 0.5) + 1.0;
    const double nominal = n_starts * std::pow(static_cast<double>(system.size()), static_cast<double>(steps));
    if (steps > budget.word_length || nominal > static_cast<double>(budget.max_candidates)) {
      w.conclusive = false;
      w.lower_bound = kInf;
      w.claim = false;
      w.diagnostics = fmt::format("budget exhausted: window has {} steps (word limit {}), {} nominal candidates (limit {})",
                                  steps, budget.word_length, nominal, budget.max_candidates);
      return w;
    }
    if (finite) {
      for (const auto& start : system.space().enumerate()) run_from(s, start);
    } else {
      const auto k = static_cast<std::int64_t>(std::llround(budget.grid_radius / budget.grid_spacing));
      const double center = budget.grid_center.value_or(y.points.front().value());
      for (std::int64_t j = -k; j <= k; ++j) {
        run_from(s, SpacePoint::real(center + static_cast<double>(j) * budget.grid_spacing));
      }
    }
    w.candidates = static_cast<std::uint64_t>(nominal);
    w.diagnostics = fmt::format("{} complete candidates scored, the rest pruned as dominated", s.visited);
  }

  w.lower_bound = s.best;
  if (!s.best_points.empty()) w.best = Trajectory{y.t_min, s.best_points, s.best_word};
  if (!std::isfinite(s.best)) {
    w.conclusive = false;
    w.diagnostics += "; no candidate covered the whole window";
  }
  w.claim = w.conclusive && w.lower_bound > delta;
  return w;
}

}  // namespace shadowing
