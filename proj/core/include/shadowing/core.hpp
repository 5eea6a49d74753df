#pragma once

// Metric spaces, points and set-valued distances.
//
// Two spaces are supported: the real line with |x - y|, and a finite label
// set carrying the 0/1 discrete metric. Everything else in the library is
// written against these two.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace shadowing {

using Time = std::int64_t;

/// Tolerance for "equal" in every verification step (step identities,
/// gap thresholding, inequality checks).
inline constexpr double kExactTolerance = 1e-9;

/// Raised when a glue cannot produce a trajectory meeting its accuracy
/// contract. Carries the worst offending time index.
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, Time worst_index, double worst_ratio)
      : std::runtime_error(what), worst_index_(worst_index), worst_ratio_(worst_ratio) {}

  Time worst_index() const noexcept { return worst_index_; }
  double worst_ratio() const noexcept { return worst_ratio_; }

 private:
  Time worst_index_;
  double worst_ratio_;
};

/// Input failed a structural check (dictionary mismatch, broken trajectory, ...).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Preimage of a constant branch is an interval, which we do not represent.
class UnsupportedDomain : public std::domain_error {
  using std::domain_error::domain_error;
};

struct Label {
  int value = 0;
  friend auto operator<=>(const Label&, const Label&) = default;
};

class SpacePoint {
 public:
  SpacePoint() = default;

  static SpacePoint real(double v);
  static SpacePoint label(int v) { return SpacePoint(Label{v}); }

  bool is_real() const noexcept { return std::holds_alternative<double>(v_); }
  bool is_label() const noexcept { return std::holds_alternative<Label>(v_); }

  double value() const;
  int label_value() const;

  friend bool operator==(const SpacePoint&, const SpacePoint&) = default;

 private:
  explicit SpacePoint(double v) : v_(v) {}
  explicit SpacePoint(Label l) : v_(l) {}

  std::variant<double, Label> v_{0.0};
};

std::string to_string(const SpacePoint& p);

enum class SpaceKind { real_line, finite_discrete };

class Space {
 public:
  static Space real_line() { return Space(SpaceKind::real_line, {}); }
  static Space finite(std::vector<int> labels);

  SpaceKind kind() const noexcept { return kind_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  bool contains(const SpacePoint& p) const;
  /// Throws std::domain_error if either point is foreign to this space.
  double distance(const SpacePoint& a, const SpacePoint& b) const;
  std::size_t label_index(int label) const;

  /// Every point of a finite space, or nothing for the real line.
  std::vector<SpacePoint> enumerate() const;

  friend bool operator==(const Space&, const Space&) = default;

 private:
  Space(SpaceKind kind, std::vector<int> labels) : kind_(kind), labels_(std::move(labels)) {}

  SpaceKind kind_;
  std::vector<int> labels_;  // sorted, unique
};

struct SetDistance {
  double value = 0.0;
  std::size_t index_a = 0;  // achieving pair, lowest index in A then B
  std::size_t index_b = 0;
};

/// rho(A,B) = min over pairs. Not a metric.
SetDistance set_distance(const Space& space, std::span<const SpacePoint> a,
                         std::span<const SpacePoint> b);

enum class HausdorffVariant {
  min_variant,  // min of the two one-sided sup-inf values
  standard,       // max of them
};

double hausdorff_distance(const Space& space, std::span<const SpacePoint> a,
                          std::span<const SpacePoint> b,
                          HausdorffVariant variant = HausdorffVariant::standard);

/// Largest finite-window Cesaro average of a time-indexed sequence.
struct CesaroStat {
  double max_average = 0.0;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  bool symmetric = true;
};

/// values[i] sits at time t_first + i. Symmetric averages
/// (1/(2k+1)) sum_{t=-k..k} when the window is roughly centred on 0 (the
/// symmetric part covers at least half of it), one-sided (1/(k+1)) sums from
/// the end nearest 0 otherwise. The maximum is taken over
/// k in [k_min, k_max]; k_min defaults to values.size()/4.
CesaroStat max_cesaro(std::span<const double> values, Time t_first,
                      std::optional<std::size_t> k_min = std::nullopt);

}  // namespace shadowing
