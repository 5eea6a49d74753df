#include "shadowing/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

namespace shadowing {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double signed_power(const SignedPower& s, double x) {
  if (x == 0.0) return 0.0;
  const double m = s.scale * std::pow(std::abs(x), s.p);
  return x < 0.0 ? -m : m;
}

struct Roles {
  const GeneratorSet& source;
  const GeneratorSet& target;
  std::vector<std::pair<GeneratorId, GeneratorId>> ids;  // source id -> target id
};

Roles roles(const ConjugacySpec& spec, const GeneratorSet& f_system, const GeneratorSet& g_system) {
  const bool f_is_source = spec.direction == ConjugacyDirection::h_f_equals_g_h;
  Roles r{f_is_source ? f_system : g_system, f_is_source ? g_system : f_system, {}};
  if (spec.pairs.empty()) throw ValidationError("conjugacy declares no generator pairs");
  for (const auto& p : spec.pairs) {
    f_system.require(p.f_id);
    g_system.require(p.g_id);
    r.ids.emplace_back(f_is_source ? p.f_id : p.g_id, f_is_source ? p.g_id : p.f_id);
  }
  return r;
}

double tolerance_at(double magnitude) { return kExactTolerance * std::max(1.0, std::abs(magnitude)); }

}  // namespace

SpacePoint apply_homeo(const Homeomorphism& h, const SpacePoint& x) {
  return std::visit(overloaded{
                        [&](const Affine& a) { return apply(EndomorphismSpec(a), x); },
                        [&](const SignedPower& s) { return SpacePoint::real(signed_power(s, x.value())); },
                        [&](const FiniteTable& t) { return apply(EndomorphismSpec(t), x); },
                    },
                    h);
}

std::string describe(const Homeomorphism& h) {
  return std::visit(overloaded{
                        [](const Affine& a) { return describe(EndomorphismSpec(a)); },
                        [](const SignedPower& s) { return fmt::format("signed-power{{p={},scale={}}}", s.p, s.scale); },
                        [](const FiniteTable& t) { return describe(EndomorphismSpec(t)); },
                    },
                    h);
}

IntertwiningCheck validate_intertwining(const ConjugacySpec& spec, const GeneratorSet& f_system,
                                        const GeneratorSet& g_system) {
  const Roles r = roles(spec, f_system, g_system);
  IntertwiningCheck c;
  std::vector<SpacePoint> grid;
  if (r.source.space().kind() == SpaceKind::finite_discrete) {
    grid = r.source.space().enumerate();
  } else {
    for (int i = 0; i < 1000; ++i) {
      grid.push_back(SpacePoint::real(spec.region_lo + (spec.region_hi - spec.region_lo) * i / 999.0));
    }
  }
  for (const auto& [src_id, tgt_id] : r.ids) {
    const auto& src = r.source.at(r.source.require(src_id)).map;
    const auto& tgt = r.target.at(r.target.require(tgt_id)).map;
    for (const auto& x : grid) {
      const SpacePoint lhs = apply_homeo(spec.forward, apply(src, x));
      const SpacePoint rhs = apply(tgt, apply_homeo(spec.forward, x));
      const double res = r.target.space().distance(lhs, rhs);
      const double back = r.source.space().distance(apply_homeo(spec.inverse, apply_homeo(spec.forward, x)), x);
      const double scale = x.is_real() ? std::max(std::abs(lhs.value()), std::abs(x.value())) : 0.0;
      if (res > c.max_residual) {
        c.max_residual = res;
        c.worst_x = x.is_real() ? x.value() : x.label_value();
      }
      c.max_roundtrip = std::max(c.max_roundtrip, back);
      if (res > tolerance_at(scale) || back > tolerance_at(scale)) c.ok = false;
    }
  }
  return c;
}

std::vector<SamplePair> sample_pairs(double lo, double hi, std::size_t n_random, std::mt19937_64& rng) {
  std::vector<SamplePair> out;
  std::uniform_real_distribution<double> u(lo, hi);
  for (std::size_t i = 0; i < n_random; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    out.push_back({a, b});
  }
  const bool straddles = lo <= 0.0 && hi >= 0.0;
  for (int k = 1; k <= 12; ++k) {
    const double s = std::pow(10.0, -k);
    if (straddles) {
      if (-s >= lo && s <= hi) out.push_back({-s, s});
      if (s <= hi) out.push_back({0.0, s});
      if (-s >= lo) out.push_back({-s, 0.0});
    } else if (lo + s <= hi) {
      out.push_back({lo, lo + s});
      out.push_back({hi - s, hi});
    }
  }
  return out;
}

namespace {

// Longest run of consecutive decades (shrinking separation) along which
// `value` grows by at least `factor` per decade.
int growth_run(const std::vector<DecadeRatio>& decades, double (*value)(const DecadeRatio&), double factor) {
  int best = 0;
  int run = 0;
  for (std::size_t i = 1; i < decades.size(); ++i) {
    const bool adjacent = decades[i].decade == decades[i - 1].decade - 1;
    if (adjacent && value(decades[i]) >= factor * value(decades[i - 1])) {
      best = std::max(best, ++run);
    } else {
      run = 0;
    }
  }
  return best;
}

}  // namespace

BiLipschitzEstimate estimate_bilipschitz(const Homeomorphism& h, const std::vector<SamplePair>& pairs) {
  BiLipschitzEstimate e;
  e.c_lower = std::numeric_limits<double>::infinity();
  std::map<int, DecadeRatio, std::greater<>> by_decade;
  const bool discrete = std::holds_alternative<FiniteTable>(h);
  for (const auto& p : pairs) {
    if (p.a == p.b) {
      ++e.skipped_pairs;
      continue;
    }
    double sep = 0.0;
    double img = 0.0;
    if (discrete) {
      sep = 1.0;
      const auto ha = apply_homeo(h, SpacePoint::label(static_cast<int>(p.a)));
      const auto hb = apply_homeo(h, SpacePoint::label(static_cast<int>(p.b)));
      img = ha == hb ? 0.0 : 1.0;
    } else {
      sep = std::abs(p.a - p.b);
      img = std::abs(apply_homeo(h, SpacePoint::real(p.a)).value() - apply_homeo(h, SpacePoint::real(p.b)).value());
    }
    const double ratio = img / sep;
    ++e.used_pairs;
    e.c_lower = std::min(e.c_lower, ratio);
    e.c_upper = std::max(e.c_upper, ratio);
    const int dec = static_cast<int>(std::floor(std::log10(sep)));
    auto [it, fresh] = by_decade.try_emplace(dec, DecadeRatio{dec, ratio, ratio});
    if (!fresh) {
      it->second.max_ratio = std::max(it->second.max_ratio, ratio);
      it->second.min_ratio = std::min(it->second.min_ratio, ratio);
    }
  }
  if (e.used_pairs == 0) throw std::domain_error("estimate_bilipschitz: no usable sample pairs");
  for (const auto& [dec, r] : by_decade) e.decades.push_back(r);

  constexpr double kFactor = 1.2;
  constexpr int kRun = 3;
  const int up = growth_run(e.decades, [](const DecadeRatio& d) { return d.max_ratio; }, kFactor);
  const int down = growth_run(
      e.decades, [](const DecadeRatio& d) { return d.min_ratio > 0.0 ? 1.0 / d.min_ratio : 1e300; }, kFactor);
  e.divergent = up >= kRun || down >= kRun || e.c_lower == 0.0;
  e.c = e.c_lower > 0.0 ? std::max(e.c_upper, 1.0 / e.c_lower) : std::numeric_limits<double>::infinity();
  if (e.divergent) {
    e.diagnostics = fmt::format(
        "ratio range keeps widening as pairs shrink: upper grows over {} decades, 1/lower over {} "
        "(C_upper so far {}, C_lower {})",
        up, down, e.c_upper, e.c_lower);
  }
  return e;
}

TransferResult conjugate_transfer(const ConjugacySpec& spec, const GeneratorSet& f_system,
                                  const GeneratorSet& g_system, const PseudoTrajectory& y, const Trajectory& x,
                                  double delta, std::uint64_t seed) {
  const Roles r = roles(spec, f_system, g_system);
  TransferResult out;
  out.intertwining = validate_intertwining(spec, f_system, g_system);
  if (!out.intertwining.ok) {
    throw TransferRefused(fmt::format("intertwining fails: residual {} at x={}", out.intertwining.max_residual,
                                      out.intertwining.worst_x),
                          {});
  }
  validate_trajectory(r.source, x);

  if (r.source.space().kind() == SpaceKind::finite_discrete) {
    std::vector<SamplePair> pairs;
    for (int a : r.source.space().labels()) {
      for (int b : r.source.space().labels()) pairs.push_back({static_cast<double>(a), static_cast<double>(b)});
    }
    out.estimate = estimate_bilipschitz(spec.forward, pairs);
  } else {
    double lo = spec.region_lo;
    double hi = spec.region_hi;
    for (const auto& p : y.points) {
      lo = std::min(lo, p.value());
      hi = std::max(hi, p.value());
    }
    for (const auto& p : x.points) {
      lo = std::min(lo, p.value());
      hi = std::max(hi, p.value());
    }
    std::mt19937_64 rng(seed);
    out.estimate = estimate_bilipschitz(spec.forward, sample_pairs(lo, hi, 200, rng));
  }
  if (out.estimate.divergent) {
    throw TransferRefused(fmt::format("conjugacy {} is not bi-Lipschitz on the data hull: {}", describe(spec.forward),
                                      out.estimate.diagnostics),
                          out.estimate);
  }

  out.y_image.t_min = y.t_min;
  for (const auto& p : y.points) out.y_image.points.push_back(apply_homeo(spec.forward, p));
  out.x_image.t_min = x.t_min;
  for (const auto& p : x.points) out.x_image.points.push_back(apply_homeo(spec.forward, p));
  for (const auto& id : x.word) {
    auto it = std::find_if(r.ids.begin(), r.ids.end(), [&](const auto& e) { return e.first == id; });
    if (it == r.ids.end()) throw ValidationError(fmt::format("generator '{}' has no conjugate partner", id));
    out.x_image.word.push_back(it->second);
  }
  if (y.reference_word) {
    out.y_image.reference_word.emplace();
    for (const auto& id : *y.reference_word) {
      auto it = std::find_if(r.ids.begin(), r.ids.end(), [&](const auto& e) { return e.first == id; });
      if (it == r.ids.end()) throw ValidationError(fmt::format("generator '{}' has no conjugate partner", id));
      out.y_image.reference_word->push_back(it->second);
    }
  }
  validate_trajectory(r.target, out.x_image);

  const double c = out.estimate.c;
  out.before_u = check_shadowing(r.source.space(), x, y, ShadowKind::U, delta);
  out.before_a = check_shadowing(r.source.space(), x, y, ShadowKind::A, delta);
  out.after_u = check_shadowing(r.target.space(), out.x_image, out.y_image, ShadowKind::U, c * delta);
  out.after_a = check_shadowing(r.target.space(), out.x_image, out.y_image, ShadowKind::A, c * delta);
  out.bound_holds = out.after_u.statistic <= c * out.before_u.statistic + kExactTolerance &&
                    out.after_a.statistic <= c * out.before_a.statistic + kExactTolerance;
  return out;
}

InversionResult invert_transfer(const Generator& f, const Space& space, const PseudoTrajectory& y,
                                const Trajectory& x) {
  if (!is_invertible(f.map)) throw std::domain_error("invert_transfer: " + describe(f.map) + " is not a bijection");
  if (x.t_min != y.t_min || x.points.size() != y.points.size()) throw ValidationError("invert_transfer: windows differ");
  const GeneratorSet forward(space, {f});
  const Generator inv{f.id + "^-1", inverse(f.map)};

  double c_lower = 0.0;
  if (auto b = lipschitz_bounds(f.map)) {
    c_lower = b->lower;
  } else {
    // Estimate on the hull of the data.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : y.points) {
      lo = std::min(lo, p.value());
      hi = std::max(hi, p.value());
    }
    std::mt19937_64 rng(0);
    c_lower = std::numeric_limits<double>::infinity();
    for (const auto& p : sample_pairs(lo, hi, 500, rng)) {
      if (p.a == p.b) continue;
      c_lower = std::min(c_lower, std::abs(apply_real(f.map, p.a) - apply_real(f.map, p.b)) / std::abs(p.a - p.b));
    }
  }

  InversionResult out{GeneratorSet(space, {inv}), {}, {}, c_lower, {}, {}, true, true};
  out.y_reversed.t_min = -y.t_max();
  out.y_reversed.points.assign(y.points.rbegin(), y.points.rend());
  out.x_reversed.t_min = -x.t_max();
  out.x_reversed.points.assign(x.points.rbegin(), x.points.rend());
  out.x_reversed.word.assign(x.word.size(), inv.id);

  out.original_gaps = step_gaps(forward, y);
  out.reversed_gaps = step_gaps(out.inverse_system, out.y_reversed);
  for (const auto& s : out.reversed_gaps) {
    // reversed step k -> k+1 mirrors the original step -k-1 -> -k
    const Time orig_t = -s.t - 1;
    const double orig = out.original_gaps.at(static_cast<std::size_t>(orig_t - y.t_min)).gap;
    if (c_lower <= 0.0 || s.gap > orig / c_lower + tolerance_at(orig)) out.bound_holds = false;
  }
  out.x_reversed_valid = is_valid_trajectory(out.inverse_system, out.x_reversed);
  return out;
}

}  // namespace shadowing
