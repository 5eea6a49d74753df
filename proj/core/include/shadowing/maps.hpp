#pragma once

// Concrete endomorphisms used as semigroup generators.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shadowing/core.hpp"

namespace shadowing {

/// psi_{a,b,c,d}(x) = a*x + c for x <= 0, b*x + d for x > 0.
struct PiecewisePsi {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double d = 0.0;
};

struct Affine {
  double slope = 1.0;
  double intercept = 0.0;
};

/// images[i] is the image of domain[i]; domain is the full label set.
struct FiniteTable {
  std::vector<int> domain;
  std::vector<int> images;
};

class EndomorphismSpec;

/// components[0] is applied first.
struct CompositionWord {
  std::vector<EndomorphismSpec> components;
};

class EndomorphismSpec {
 public:
  using Variant = std::variant<PiecewisePsi, Affine, FiniteTable, CompositionWord>;

  EndomorphismSpec(PiecewisePsi p) : v_(p) {}
  EndomorphismSpec(Affine a) : v_(a) {}
  EndomorphismSpec(FiniteTable t);
  EndomorphismSpec(CompositionWord w);

  const Variant& variant() const noexcept { return v_; }
  SpaceKind space_kind() const;

 private:
  Variant v_;
};

EndomorphismSpec psi(double a, double b, double c, double d);
EndomorphismSpec affine(double slope, double intercept = 0.0);
EndomorphismSpec compose(std::vector<EndomorphismSpec> first_to_last);

/// g(x) = (x+1 mod 3) + 1 on {1,2,3}.
EndomorphismSpec cyclic_three();

SpacePoint apply(const EndomorphismSpec& map, const SpacePoint& x);
double apply_real(const EndomorphismSpec& map, double x);

/// All x with apply(map, x) = y, sorted ascending (by value or label).
/// Throws UnsupportedDomain when a constant branch makes the preimage an interval.
std::vector<SpacePoint> preimages(const EndomorphismSpec& map, const SpacePoint& y);

bool is_invertible(const EndomorphismSpec& map);

/// Throws std::domain_error when the map is not a bijection.
EndomorphismSpec inverse(const EndomorphismSpec& map);

/// Analytic bounds L, U with L*rho(x,y) <= rho(fx,fy) <= U*rho(x,y), when the
/// map is simple enough to know them (affine, continuous psi with positive
/// slopes, tables, compositions of those).
struct LipschitzBounds {
  double lower = 0.0;
  double upper = 0.0;
};
std::optional<LipschitzBounds> lipschitz_bounds(const EndomorphismSpec& map);

std::string describe(const EndomorphismSpec& map);

}  // namespace shadowing
