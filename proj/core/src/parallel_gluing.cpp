#include "shadowing/parallel_gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

std::vector<double> gap_recursion_step(const std::vector<double>& gaps, const RateFunction& phi, int n) {
  const double minus = phi.minus(n);
  const double plus = phi.plus(n);
  std::vector<double> out(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    out[i] = gaps[i];
    if (i > 0) out[i] += minus * gaps[i - 1];
    if (i + 1 < gaps.size()) out[i] += plus * gaps[i + 1];
  }
  return out;
}

ProductBound product_exp_bound(const std::vector<double>& b) {
  ProductBound r;
  double sum = 0.0;
  for (double v : b) {
    if (!(v >= 0.0)) throw std::domain_error("product_exp_bound: negative or NaN entry");
    r.product *= 1.0 + v;
    sum += v;
    r.partial_products.push_back(r.product);
  }
  r.exp_bound = std::exp(sum);
  // 1 + x <= e^x termwise; allow for rounding in the running product.
  r.holds = r.product <= r.exp_bound * (1.0 + 1e-12);
  return r;
}

namespace {

double point_distance(const Space& space, const SpacePoint& a, const SpacePoint& b) {
  return space.distance(a, b);
}

std::vector<PartialSum> partial_sums(const std::vector<Time>& moments, const std::vector<double>& gaps,
                                     const std::vector<Time>& ks) {
  std::vector<PartialSum> out;
  for (Time k : ks) {
    PartialSum p{k, 0.0};
    for (std::size_t i = 0; i < moments.size(); ++i) {
      if (moments[i] >= -k && moments[i] <= k) p.value += gaps[i];
    }
    out.push_back(p);
  }
  return out;
}

std::vector<SpacePoint> concat_points(const std::vector<Trajectory>& segs) {
  std::vector<SpacePoint> pts;
  for (const auto& s : segs) pts.insert(pts.end(), s.points.begin(), s.points.end());
  return pts;
}

struct Distances {
  double sup = 0.0;
  double cesaro = 0.0;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
};

Distances distances_to(const Space& space, const std::vector<SpacePoint>& z, const PseudoTrajectory& y,
                       std::optional<std::size_t> k_min) {
  std::vector<double> d(z.size());
  Distances out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    d[i] = point_distance(space, z[i], y.points[i]);
    out.sup = std::max(out.sup, d[i]);
  }
  const auto stat = max_cesaro(d, y.t_min, k_min);
  out.cesaro = stat.max_average;
  out.k_min = stat.k_min;
  out.k_max = stat.k_max;
  return out;
}

int round_cap(std::size_t segments) {
  int c = 0;
  while ((std::size_t{1} << c) < segments) ++c;
  return c + 1;
}

}  // namespace

ShadowResult shadow_construct(const PseudoTrajectory& y, const GluingOracle& oracle, const RateFunction& phi,
                              const ConstructOptions& options) {
  if (y.points.size() < 2) throw ValidationError("pseudo-trajectory window must have at least 2 points");
  const auto& g = oracle.system;
  const RateFunction rate = effective_rate(phi);

  std::vector<StepGap> gaps;
  if (oracle.branch) {
    if (!oracle.branch->covers(y.t_min, y.t_max())) throw ValidationError("branch word does not cover the window");
    std::vector<GeneratorId> w;
    for (Time t = y.t_min; t < y.t_max(); ++t) w.push_back(oracle.branch->at(t));
    gaps = branch_step_gaps(g, y, w);
  } else {
    gaps = step_gaps(g, y);
  }

  ShadowResult res;
  auto& cert = res.cert;
  cert.branch_mode = oracle.branch.has_value();
  cert.strategy = to_string(oracle.strategy);
  cert.t_min = y.t_min;
  cert.t_max = y.t_max();
  cert.bounds.phi_sum = phi_sum(rate);
  cert.bounds.e_phi = std::exp(cert.bounds.phi_sum);

  // Cut into true segments at the perturbation moments.
  std::vector<Trajectory> segs;
  Trajectory cur{y.t_min, {y.points.front()}, {}};
  for (const auto& s : gaps) {
    const std::size_t i = static_cast<std::size_t>(s.t - y.t_min);
    if (s.gap > kExactTolerance) {
      cert.initial_moments.push_back(s.t);
      cert.initial_gaps.push_back(s.gap);
      cert.gamma0_sup = std::max(cert.gamma0_sup, s.gap);
      segs.push_back(std::move(cur));
      cur = Trajectory{s.t + 1, {y.points[i + 1]}, {}};
    } else {
      cur.points.push_back(y.points[i + 1]);
      cur.word.push_back(g.at(s.generator).id);
    }
  }
  segs.push_back(std::move(cur));
  cert.bounds.gap_bound = cert.bounds.e_phi * cert.gamma0_sup;
  cert.initial_partial_sums = partial_sums(cert.initial_moments, cert.initial_gaps, options.partial_sum_ks);

  const int cap = round_cap(segs.size());
  int n = 0;
  while (segs.size() > 1) {
    if (n >= cap) throw std::logic_error("parallel gluing exceeded its round cap");
    RoundRecord rec;
    rec.round = n;
    for (const auto& s : segs) rec.segments_before.push_back({s.t_min, s.t_max()});

    std::vector<double> junction_gaps;
    for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
      junction_gaps.push_back(join_gap(oracle, segs[j].points.back(), segs[j + 1].points.front(), segs[j + 1].t_min));
    }
    const auto prediction = gap_recursion_step(junction_gaps, rate, n);
    const auto before = concat_points(segs);

    std::vector<Trajectory> next;
    std::vector<Time> glue_t0;  // per next segment, or min() when carried
    rec.untouched_radius = std::numeric_limits<Time>::max();
    for (std::size_t j = 0; j < segs.size(); j += 2) {
      if (j + 1 == segs.size()) {
        next.push_back(segs[j]);
        glue_t0.push_back(std::numeric_limits<Time>::min());
        continue;
      }
      rec.glued_moments.push_back(segs[j + 1].t_min);
      rec.untouched_radius = std::min({rec.untouched_radius, static_cast<Time>(segs[j].points.size()),
                                       static_cast<Time>(segs[j + 1].points.size())});
      try {
        auto glued = glue_pair(oracle, segs[j], segs[j + 1], rate);
        next.push_back(std::move(glued.x));
        glue_t0.push_back(glued.t0);
      } catch (const OracleFailure& e) {
        cert.rounds.push_back(std::move(rec));
        cert.completed = false;
        cert.failure = e.what();
        throw ConstructionFailure(e, cert);
      }
    }

    for (std::size_t i = 0; i + 1 < next.size(); ++i) {
      rec.moments.push_back(next[i].t_max());
      rec.gaps.push_back(join_gap(oracle, next[i].points.back(), next[i + 1].points.front(), next[i + 1].t_min));
      rec.predicted.push_back(prediction[2 * i + 1]);
      rec.gap_sup = std::max(rec.gap_sup, rec.gaps.back());
    }
    rec.partial_sums = partial_sums(rec.moments, rec.gaps, options.partial_sum_ks);

    const auto after = concat_points(next);
    const auto dist = distances_to(g.space(), after, y, options.cesaro_k_min);
    rec.sup_distance = dist.sup;
    rec.cesaro_distance = dist.cesaro;

    // Cauchy control: change at t against the tail of phi beyond its distance
    // to the glue that moved it.
    std::size_t offset = 0;
    for (std::size_t s = 0; s < next.size(); ++s) {
      for (std::size_t i = 0; i < next[s].points.size(); ++i, ++offset) {
        const double change = point_distance(g.space(), after[offset], before[offset]);
        if (change == 0.0 || glue_t0[s] == std::numeric_limits<Time>::min()) continue;
        const Time t = y.t_min + static_cast<Time>(offset);
        const Time tau = std::abs(t - glue_t0[s]);
        const double bound = cert.bounds.gap_bound * tail_sum(rate, tau);
        const double ratio = bound > 0.0 ? change / bound : std::numeric_limits<double>::infinity();
        if (ratio > rec.cauchy_worst_ratio) {
          rec.cauchy_worst_ratio = ratio;
          rec.cauchy_worst_index = t;
        }
      }
    }

    cert.rounds.push_back(std::move(rec));
    segs = std::move(next);
    ++n;
  }

  res.z = std::move(segs.front());
  validate_trajectory(g, res.z);
  const auto dist = distances_to(g.space(), res.z.points, y, options.cesaro_k_min);
  cert.final_sup_distance = dist.sup;
  cert.final_cesaro_distance = dist.cesaro;
  cert.cesaro_k_min = dist.k_min;
  cert.cesaro_k_max = dist.k_max;
  cert.completed = true;
  return res;
}

BoundsReport certify_bounds(const GluingCertificate& cert, double eps, PerturbationType type) {
  BoundsReport rep;
  const double phi = cert.bounds.phi_sum;
  const double e_phi = cert.bounds.e_phi;
  auto add = [&](std::string name, double lhs, double rhs) {
    BoundCheck c{std::move(name), lhs, rhs, lhs <= rhs + kExactTolerance, rhs - lhs};
    rep.all_pass = rep.all_pass && c.pass;
    rep.checks.push_back(std::move(c));
  };

  const double eps_u = type == PerturbationType::U ? eps : cert.gamma0_sup;
  add("err-u", cert.final_sup_distance, eps_u * phi * e_phi);

  double gap_sup = cert.gamma0_sup;
  for (const auto& r : cert.rounds) gap_sup = std::max(gap_sup, r.gap_sup);
  add("bound-est", gap_sup, e_phi * cert.gamma0_sup);

  for (std::size_t i = 0; i < cert.initial_partial_sums.size(); ++i) {
    const auto& r0 = cert.initial_partial_sums[i];
    double worst = r0.value;
    for (const auto& r : cert.rounds) worst = std::max(worst, r.partial_sums.at(i).value);
    add(fmt::format("est-a[k={}]", r0.k), worst, e_phi * r0.value);
  }

  add("fin-a", cert.final_cesaro_distance, eps * phi * e_phi);

  double excess = 0.0;
  for (const auto& r : cert.rounds) {
    for (std::size_t i = 0; i < r.gaps.size(); ++i) excess = std::max(excess, r.gaps[i] - r.predicted[i]);
  }
  add("rec-est", excess, 0.0);
  return rep;
}

}  // namespace shadowing
