#include "shadowing/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace shadowing {

RateFunction RateFunction::geometric(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::domain_error(fmt::format("geometric rate needs lambda in (0,1), got {}", lambda));
  }
  RateFunction r;
  r.geometric_ = true;
  r.lambda_ = lambda;
  return r;
}

RateFunction RateFunction::tabulated(Time k_lo, std::vector<double> values, double tail_scale,
                                     double tail_ratio) {
  if (values.empty()) throw std::invalid_argument("rate table is empty");
  const Time k_hi = k_lo + static_cast<Time>(values.size()) - 1;
  if (k_lo > 0 || k_hi < 0) throw std::invalid_argument("rate table must cover k = 0");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("rate values must be finite and >= 0");
  }
  if (tail_scale < 0.0 || tail_ratio < 0.0) throw std::invalid_argument("negative tail parameters");
  RateFunction r;
  r.geometric_ = false;
  r.k_lo_ = k_lo;
  r.values_ = std::move(values);
  r.tail_scale_ = tail_scale;
  r.tail_ratio_ = tail_ratio;
  return r;
}

double RateFunction::operator()(Time k) const {
  if (geometric_) return std::pow(lambda_, static_cast<double>(k < 0 ? -k : k));
  if (k >= k_lo_ && k <= k_hi()) return values_[static_cast<std::size_t>(k - k_lo_)];
  if (tail_scale_ == 0.0) return 0.0;
  const Time d = k > k_hi() ? k - k_hi() : k_lo_ - k;
  return tail_scale_ * std::pow(tail_ratio_, static_cast<double>(d));
}

double RateFunction::plus(int n) const { return (*this)(Time{1} << n); }
double RateFunction::minus(int n) const { return (*this)(-(Time{1} << n)); }

namespace {

// sum_{d >= d0} scale * ratio^d, d0 >= 1
double geometric_tail(double scale, double ratio, Time d0) {
  if (scale == 0.0) return 0.0;
  if (ratio >= 1.0) throw std::domain_error("rate tail diverges (ratio >= 1)");
  return scale * std::pow(ratio, static_cast<double>(d0)) / (1.0 - ratio);
}

}  // namespace

double phi_sum(const RateFunction& phi) { return tail_sum(phi, 0); }

double tail_sum(const RateFunction& phi, Time tau) {
  tau = std::max<Time>(tau, 0);
  if (phi.is_geometric()) {
    const double l = phi.lambda();
    if (tau == 0) return (1.0 + l) / (1.0 - l);
    return 2.0 * std::pow(l, static_cast<double>(tau)) / (1.0 - l);
  }
  double s = 0.0;
  for (Time k = phi.k_lo(); k <= phi.k_hi(); ++k) {
    if ((k < 0 ? -k : k) >= tau) s += phi(k);
  }
  // right tail: k = k_hi + d, need k >= tau; left tail: k = k_lo - d, need -k >= tau
  s += geometric_tail(phi.tail_scale(), phi.tail_ratio(), std::max<Time>(1, tau - phi.k_hi()));
  s += geometric_tail(phi.tail_scale(), phi.tail_ratio(), std::max<Time>(1, tau + phi.k_lo()));
  return s;
}

RateFunction monotone_envelope(const RateFunction& phi) {
  if (phi.is_geometric()) return phi;
  // Largest value the tail ever takes (at distance 1), or 0 without a tail.
  double tail_peak = 0.0;
  if (phi.tail_scale() > 0.0) {
    tail_peak = phi.tail_ratio() >= 1.0 ? std::numeric_limits<double>::infinity()
                                        : phi.tail_scale() * phi.tail_ratio();
  }
  std::vector<double> v = phi.table();
  const auto zero = static_cast<std::size_t>(-phi.k_lo());
  double run = tail_peak;
  for (std::size_t i = v.size(); i-- > zero;) {  // k >= 0: suffix sup
    run = std::max(run, v[i]);
    v[i] = run;
  }
  run = tail_peak;
  for (std::size_t i = 0; i < zero; ++i) {  // k < 0: prefix sup
    run = std::max(run, v[i]);
    v[i] = run;
  }
  v[zero] = std::max(v[zero], run);  // k = 0 sits on both sides
  return RateFunction::tabulated(phi.k_lo(), std::move(v), phi.tail_scale(), phi.tail_ratio());
}

RateFunction symmetrize(const RateFunction& phi) {
  if (phi.is_geometric()) return phi;
  const Time k = std::max(-phi.k_lo(), phi.k_hi());
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(2 * k + 1));
  for (Time i = -k; i <= k; ++i) v.push_back(std::max(phi(i), phi(-i)));
  // Past the wider edge the narrower side's tail has run longer, so for
  // ratio < 1 it is the smaller of the two and the tail parameters carry over.
  double scale = phi.tail_scale();
  const Time shift = k - std::min(-phi.k_lo(), phi.k_hi());
  if (phi.tail_ratio() > 1.0) scale *= std::pow(phi.tail_ratio(), static_cast<double>(shift));
  return RateFunction::tabulated(-k, std::move(v), scale, phi.tail_ratio());
}

RateFunction effective_rate(const RateFunction& phi) { return symmetrize(monotone_envelope(phi)); }

}  // namespace shadowing
