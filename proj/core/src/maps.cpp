#include "shadowing/maps.hpp"

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

int table_lookup(const FiniteTable& t, int x) {
  auto it = std::find(t.domain.begin(), t.domain.end(), x);
  if (it == t.domain.end()) throw std::domain_error(fmt::format("label {} outside table domain", x));
  return t.images[static_cast<std::size_t>(it - t.domain.begin())];
}

void sort_unique(std::vector<SpacePoint>& pts) {
  auto key_less = [](const SpacePoint& a, const SpacePoint& b) {
    if (a.is_real()) return a.value() < b.value();
    return a.label_value() < b.label_value();
  };
  std::sort(pts.begin(), pts.end(), key_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// Solutions of slope*x + intercept = y restricted by `keep`.
void solve_branch(double slope, double intercept, double y, bool (*keep)(double),
                  std::vector<SpacePoint>& out) {
  if (slope == 0.0) {
    if (y == intercept) {
      throw UnsupportedDomain("constant branch: preimage is an interval");
    }
    return;
  }
  const double x = (y - intercept) / slope;
  if (keep(x)) out.push_back(SpacePoint::real(x));
}

}  // namespace

EndomorphismSpec::EndomorphismSpec(FiniteTable t) : v_(std::move(t)) {
  const auto& tab = std::get<FiniteTable>(v_);
  if (tab.domain.size() != tab.images.size() || tab.domain.empty()) {
    throw std::invalid_argument("finite table needs one image per domain label");
  }
  for (int img : tab.images) {
    if (std::find(tab.domain.begin(), tab.domain.end(), img) == tab.domain.end()) {
      throw std::invalid_argument(fmt::format("table image {} lies outside the label set", img));
    }
  }
}

EndomorphismSpec::EndomorphismSpec(CompositionWord w) : v_(std::move(w)) {
  const auto& word = std::get<CompositionWord>(v_);
  if (word.components.empty()) throw std::invalid_argument("composition word must be non-empty");
  const SpaceKind kind = word.components.front().space_kind();
  for (const auto& c : word.components) {
    if (c.space_kind() != kind) throw std::invalid_argument("composition mixes spaces");
  }
}

SpaceKind EndomorphismSpec::space_kind() const {
  return std::visit(overloaded{
                        [](const FiniteTable&) { return SpaceKind::finite_discrete; },
                        [](const CompositionWord& w) { return w.components.front().space_kind(); },
                        [](const auto&) { return SpaceKind::real_line; },
                    },
                    v_);
}

EndomorphismSpec psi(double a, double b, double c, double d) { return PiecewisePsi{a, b, c, d}; }
EndomorphismSpec affine(double slope, double intercept) { return Affine{slope, intercept}; }
EndomorphismSpec compose(std::vector<EndomorphismSpec> first_to_last) {
  return CompositionWord{std::move(first_to_last)};
}

EndomorphismSpec cyclic_three() {
  FiniteTable t;
  for (int x = 1; x <= 3; ++x) {
    t.domain.push_back(x);
    t.images.push_back((x + 1) % 3 + 1);
  }
  return t;
}

double apply_real(const EndomorphismSpec& map, double x) {
  return std::visit(overloaded{
                        [x](const PiecewisePsi& p) { return x <= 0.0 ? p.a * x + p.c : p.b * x + p.d; },
                        [x](const Affine& a) { return a.slope * x + a.intercept; },
                        [](const FiniteTable&) -> double {
                          throw std::domain_error("finite table applied to a real point");
                        },
                        [x](const CompositionWord& w) {
                          double v = x;
                          for (const auto& c : w.components) v = apply_real(c, v);
                          return v;
                        },
                    },
                    map.variant());
}

SpacePoint apply(const EndomorphismSpec& map, const SpacePoint& x) {
  if (map.space_kind() == SpaceKind::real_line) return SpacePoint::real(apply_real(map, x.value()));
  return std::visit(overloaded{
                        [&](const FiniteTable& t) { return SpacePoint::label(table_lookup(t, x.label_value())); },
                        [&](const CompositionWord& w) {
                          SpacePoint v = x;
                          for (const auto& c : w.components) v = apply(c, v);
                          return v;
                        },
                        [](const auto&) -> SpacePoint { throw std::logic_error("unreachable"); },
                    },
                    map.variant());
}

std::vector<SpacePoint> preimages(const EndomorphismSpec& map, const SpacePoint& y) {
  std::vector<SpacePoint> out;
  std::visit(overloaded{
                 [&](const PiecewisePsi& p) {
                   solve_branch(p.a, p.c, y.value(), [](double x) { return x <= 0.0; }, out);
                   solve_branch(p.b, p.d, y.value(), [](double x) { return x > 0.0; }, out);
                 },
                 [&](const Affine& a) {
                   solve_branch(a.slope, a.intercept, y.value(), [](double) { return true; }, out);
                 },
                 [&](const FiniteTable& t) {
                   for (std::size_t i = 0; i < t.domain.size(); ++i) {
                     if (t.images[i] == y.label_value()) out.push_back(SpacePoint::label(t.domain[i]));
                   }
                 },
                 [&](const CompositionWord& w) {
                   std::vector<SpacePoint> current{y};
                   for (auto it = w.components.rbegin(); it != w.components.rend(); ++it) {
                     std::vector<SpacePoint> next;
                     for (const auto& p : current) {
                       auto pre = preimages(*it, p);
                       next.insert(next.end(), pre.begin(), pre.end());
                     }
                     current = std::move(next);
                   }
                   out = std::move(current);
                 },
             },
             map.variant());
  sort_unique(out);
  return out;
}

bool is_invertible(const EndomorphismSpec& map) {
  return std::visit(overloaded{
                        [](const PiecewisePsi& p) { return p.c == p.d && p.a * p.b > 0.0; },
                        [](const Affine& a) { return a.slope != 0.0; },
                        [](const FiniteTable& t) {
                          auto imgs = t.images;
                          std::sort(imgs.begin(), imgs.end());
                          return std::adjacent_find(imgs.begin(), imgs.end()) == imgs.end();
                        },
                        [](const CompositionWord& w) {
                          return std::all_of(w.components.begin(), w.components.end(),
                                             [](const auto& c) { return is_invertible(c); });
                        },
                    },
                    map.variant());
}

EndomorphismSpec inverse(const EndomorphismSpec& map) {
  if (!is_invertible(map)) throw std::domain_error("map is not a bijection: " + describe(map));
  return std::visit(overloaded{
                        [](const PiecewisePsi& p) -> EndomorphismSpec {
                          // Shift the branch point back to 0, then undo each slope.
                          // Positive slopes keep branch order, negative slopes swap it.
                          PiecewisePsi undo = p.a > 0.0 ? PiecewisePsi{1.0 / p.a, 1.0 / p.b, 0.0, 0.0}
                                                        : PiecewisePsi{1.0 / p.b, 1.0 / p.a, 0.0, 0.0};
                          if (p.c == 0.0) return undo;
                          return compose({affine(1.0, -p.c), undo});
                        },
                        [](const Affine& a) -> EndomorphismSpec {
                          return Affine{1.0 / a.slope, -a.intercept / a.slope};
                        },
                        [](const FiniteTable& t) -> EndomorphismSpec {
                          FiniteTable inv{t.domain, t.domain};
                          for (std::size_t i = 0; i < t.domain.size(); ++i) {
                            auto pos = std::find(t.domain.begin(), t.domain.end(), t.images[i]);
                            inv.images[static_cast<std::size_t>(pos - t.domain.begin())] = t.domain[i];
                          }
                          return inv;
                        },
                        [](const CompositionWord& w) -> EndomorphismSpec {
                          std::vector<EndomorphismSpec> parts;
                          for (auto it = w.components.rbegin(); it != w.components.rend(); ++it) {
                            parts.push_back(inverse(*it));
                          }
                          return compose(std::move(parts));
                        },
                    },
                    map.variant());
}

std::optional<LipschitzBounds> lipschitz_bounds(const EndomorphismSpec& map) {
  return std::visit(
      overloaded{
          [](const PiecewisePsi& p) -> std::optional<LipschitzBounds> {
            if (p.c != p.d || p.a <= 0.0 || p.b <= 0.0) return std::nullopt;
            return LipschitzBounds{std::min(p.a, p.b), std::max(p.a, p.b)};
          },
          [](const Affine& a) -> std::optional<LipschitzBounds> {
            return LipschitzBounds{std::abs(a.slope), std::abs(a.slope)};
          },
          [&](const FiniteTable&) -> std::optional<LipschitzBounds> {
            // Discrete metric: injective maps preserve every distance.
            return is_invertible(map) ? LipschitzBounds{1.0, 1.0} : LipschitzBounds{0.0, 1.0};
          },
          [](const CompositionWord& w) -> std::optional<LipschitzBounds> {
            LipschitzBounds acc{1.0, 1.0};
            for (const auto& c : w.components) {
              auto b = lipschitz_bounds(c);
              if (!b) return std::nullopt;
              acc.lower *= b->lower;
              acc.upper *= b->upper;
            }
            return acc;
          },
      },
      map.variant());
}

std::string describe(const EndomorphismSpec& map) {
  return std::visit(overloaded{
                        [](const PiecewisePsi& p) {
                          return fmt::format("psi{{a={},b={},c={},d={}}}", p.a, p.b, p.c, p.d);
                        },
                        [](const Affine& a) { return fmt::format("affine{{{}x+{}}}", a.slope, a.intercept); },
                        [](const FiniteTable& t) {
                          return fmt::format("table{{{}->{}}}", fmt::join(t.domain, ","), fmt::join(t.images, ","));
                        },
                        [](const CompositionWord& w) {
                          std::vector<std::string> parts;
                          for (const auto& c : w.components) parts.push_back(describe(c));
                          return fmt::format("compose[{}]", fmt::join(parts, ";"));
                        },
                    },
                    map.variant());
}

}  // namespace shadowing
