#include "shadowing/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

SpacePoint SpacePoint::real(double v) {
  if (!std::isfinite(v)) {
    throw std::domain_error("real point must be finite");
  }
  return SpacePoint(v);
}

double SpacePoint::value() const {
  if (const auto* d = std::get_if<double>(&v_)) return *d;
  throw std::domain_error("point is a label, not a real number");
}

int SpacePoint::label_value() const {
  if (const auto* l = std::get_if<Label>(&v_)) return l->value;
  throw std::domain_error("point is a real number, not a label");
}

std::string to_string(const SpacePoint& p) {
  if (p.is_real()) return fmt::format("{}", p.value());
  return fmt::format("{}", p.label_value());
}

Space Space::finite(std::vector<int> labels) {
  if (labels.empty()) throw std::invalid_argument("finite space needs at least one label");
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw std::invalid_argument("duplicate label in finite space");
  }
  return Space(SpaceKind::finite_discrete, std::move(labels));
}

bool Space::contains(const SpacePoint& p) const {
  if (kind_ == SpaceKind::real_line) return p.is_real();
  if (!p.is_label()) return false;
  return std::binary_search(labels_.begin(), labels_.end(), p.label_value());
}

double Space::distance(const SpacePoint& a, const SpacePoint& b) const {
  if (!contains(a) || !contains(b)) {
    throw std::domain_error("point does not belong to the space");
  }
  if (kind_ == SpaceKind::real_line) return std::abs(a.value() - b.value());
  return a.label_value() == b.label_value() ? 0.0 : 1.0;
}

std::size_t Space::label_index(int label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    throw std::domain_error(fmt::format("label {} not in space", label));
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<SpacePoint> Space::enumerate() const {
  std::vector<SpacePoint> out;
  out.reserve(labels_.size());
  for (int l : labels_) out.push_back(SpacePoint::label(l));
  return out;
}

namespace {

void require_nonempty(std::span<const SpacePoint> a, std::span<const SpacePoint> b) {
  if (a.empty() || b.empty()) throw std::domain_error("set distance of an empty set");
}

// sup over a in A of inf over b in B.
double directed_sup_inf(const Space& space, std::span<const SpacePoint> a,
                        std::span<const SpacePoint> b) {
  double sup = 0.0;
  for (const auto& p : a) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& q : b) inf = std::min(inf, space.distance(p, q));
    sup = std::max(sup, inf);
  }
  return sup;
}

}  // namespace

SetDistance set_distance(const Space& space, std::span<const SpacePoint> a,
                         std::span<const SpacePoint> b) {
  require_nonempty(a, b);
  SetDistance best{std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = space.distance(a[i], b[j]);
      if (d < best.value) best = {d, i, j};
    }
  }
  return best;
}

double hausdorff_distance(const Space& space, std::span<const SpacePoint> a,
                          std::span<const SpacePoint> b, HausdorffVariant variant) {
  require_nonempty(a, b);
  const double ab = directed_sup_inf(space, a, b);
  const double ba = directed_sup_inf(space, b, a);
  return variant == HausdorffVariant::standard ? std::max(ab, ba) : std::min(ab, ba);
}

CesaroStat max_cesaro(std::span<const double> values, Time t_first,
                      std::optional<std::size_t> k_min) {
  CesaroStat stat;
  if (values.empty()) return stat;
  const auto n = static_cast<Time>(values.size());
  const Time t_last = t_first + n - 1;
  const std::size_t default_k_min = values.size() / 4;

  // prefix[i] = sum of values[0..i)
  std::vector<double> prefix(values.size() + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) prefix[i + 1] = prefix[i] + values[i];
  auto range_sum = [&](Time lo, Time hi) {  // inclusive times
    return prefix[static_cast<std::size_t>(hi - t_first + 1)] -
           prefix[static_cast<std::size_t>(lo - t_first)];
  };

  // Symmetric only when the centred part covers at least half the window;
  // otherwise [0, N] would degenerate to the single value at 0.
  const Time half = std::min(-t_first, t_last);
  if (t_first <= 0 && t_last >= 0 && 2 * (2 * half + 1) >= n) {
    stat.symmetric = true;
    stat.k_max = static_cast<std::size_t>(std::min(-t_first, t_last));
    stat.k_min = std::min(k_min.value_or(default_k_min), stat.k_max);
    double best = 0.0;
    for (std::size_t k = stat.k_min; k <= stat.k_max; ++k) {
      const auto kk = static_cast<Time>(k);
      best = std::max(best, range_sum(-kk, kk) / static_cast<double>(2 * k + 1));
    }
    stat.max_average = best;
    return stat;
  }

  stat.symmetric = false;
  stat.k_max = values.size() - 1;
  stat.k_min = std::min(k_min.value_or(default_k_min), stat.k_max);
  double best = 0.0;
  for (std::size_t k = stat.k_min; k <= stat.k_max; ++k) {
    const auto kk = static_cast<Time>(k);
    const bool from_first = std::abs(t_first) <= std::abs(t_last);
    const double s = from_first ? range_sum(t_first, t_first + kk) : range_sum(t_last - kk, t_last);
    best = std::max(best, s / static_cast<double>(k + 1));
  }
  stat.max_average = best;
  return stat;
}

}  // namespace shadowing
