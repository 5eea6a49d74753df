#pragma once

// Accuracy rates phi: Z -> R+ and their sums.

#include <vector>

#include "shadowing/core.hpp"

namespace shadowing {

class RateFunction {
 public:
  /// phi(k) = lambda^|k|, lambda in (0,1).
  static RateFunction geometric(double lambda);

  /// values[i] = phi(k_lo + i) on [k_lo, k_hi] with k_lo <= 0 <= k_hi.
  /// Outside the table phi(k) = tail_scale * tail_ratio^d, d = distance to the
  /// nearest table edge. tail_scale = 0 means finite support.
  static RateFunction tabulated(Time k_lo, std::vector<double> values, double tail_scale = 0.0,
                                double tail_ratio = 0.0);

  double operator()(Time k) const;

  bool is_geometric() const noexcept { return geometric_; }
  double lambda() const noexcept { return lambda_; }
  Time k_lo() const noexcept { return k_lo_; }
  Time k_hi() const noexcept { return k_lo_ + static_cast<Time>(values_.size()) - 1; }
  const std::vector<double>& table() const noexcept { return values_; }
  double tail_scale() const noexcept { return tail_scale_; }
  double tail_ratio() const noexcept { return tail_ratio_; }

  /// phi(2^n) and phi(-2^n).
  double plus(int n) const;
  double minus(int n) const;

 private:
  RateFunction() = default;

  bool geometric_ = true;
  double lambda_ = 0.5;
  Time k_lo_ = 0;
  std::vector<double> values_;
  double tail_scale_ = 0.0;
  double tail_ratio_ = 0.0;
};

/// Sum over all of Z. Throws std::domain_error if the tail diverges.
double phi_sum(const RateFunction& phi);

/// Sum of phi(j) over |j| >= tau.
double tail_sum(const RateFunction& phi, Time tau);

/// sup_{i<=k} phi(i) for k<0, sup_{i>=k} phi(i) for k>0, and the larger of
/// the two sides at k=0.
RateFunction monotone_envelope(const RateFunction& phi);

/// max(phi(-k), phi(k)).
RateFunction symmetrize(const RateFunction& phi);

/// symmetrize(monotone_envelope(phi)): the even, monotone rate the engine uses.
RateFunction effective_rate(const RateFunction& phi);

}  // namespace shadowing
