#pragma once

// Dyadic parallel gluing: cut a pseudo-trajectory at its perturbation moments,
// glue neighbouring segments pairwise round by round until one true
// trajectory spans the window, and keep an audit trail of every round.

#include <optional>
#include <string>
#include <vector>

#include "shadowing/gluing.hpp"

namespace shadowing {

/// Right-hand side of the gap recursion for each surviving moment:
/// gaps[i] + phi(-2^n) gaps[i-1] + phi(2^n) gaps[i+1], missing neighbours = 0.
std::vector<double> gap_recursion_step(const std::vector<double>& gaps, const RateFunction& phi, int n);

struct ProductBound {
  std::vector<double> partial_products;  // prod_{j<=k} (1 + b_j)
  double product = 1.0;
  double exp_bound = 1.0;  // e^{sum b}
  bool holds = true;
};

/// Throws std::domain_error on a negative entry.
ProductBound product_exp_bound(const std::vector<double>& b);

struct Segment {
  Time t_min = 0;
  Time t_max = 0;
};

struct PartialSum {
  Time k = 0;
  double value = 0.0;  // sum of gaps at moments t with |t| <= k
};

/// One row per gluing round. Round n glues the pairs present at its start;
/// gaps/moments describe the junctions that survive it.
struct RoundRecord {
  int round = 0;
  std::vector<Segment> segments_before;
  std::vector<Time> glued_moments;     // join times t0 consumed by this round
  std::vector<Time> moments;           // surviving junctions (step start times)
  std::vector<double> gaps;            // measured gaps at `moments`
  std::vector<double> predicted;       // recursion bound at `moments`
  double gap_sup = 0.0;
  std::vector<PartialSum> partial_sums;
  Time untouched_radius = 0;           // shortest glued segment this round
  double sup_distance = 0.0;           // to the original pseudo-trajectory
  double cesaro_distance = 0.0;
  double cauchy_worst_ratio = 0.0;     // change / (e^Phi gamma0 sum_{|j|>=tau} phi)
  Time cauchy_worst_index = 0;
};

struct BoundsSummary {
  double phi_sum = 0.0;          // Phi of the effective rate
  double e_phi = 0.0;            // e^Phi
  double gap_bound = 0.0;        // e^Phi * gamma0_sup
};

struct GluingCertificate {
  bool branch_mode = false;
  std::string strategy;
  Time t_min = 0;
  Time t_max = 0;
  std::vector<Time> initial_moments;
  std::vector<double> initial_gaps;
  double gamma0_sup = 0.0;
  std::vector<PartialSum> initial_partial_sums;
  std::vector<RoundRecord> rounds;
  BoundsSummary bounds;
  double final_sup_distance = 0.0;
  double final_cesaro_distance = 0.0;
  std::size_t cesaro_k_min = 0;
  std::size_t cesaro_k_max = 0;
  bool completed = false;
  std::string failure;
};

struct ConstructOptions {
  std::vector<Time> partial_sum_ks{8, 32, 128};
  std::optional<std::size_t> cesaro_k_min;
};

struct ShadowResult {
  Trajectory z;
  GluingCertificate cert;
};

/// Raised when a glue fails mid-run; carries everything recorded so far.
class ConstructionFailure : public OracleFailure {
 public:
  ConstructionFailure(const OracleFailure& cause, GluingCertificate partial)
      : OracleFailure(cause), partial_(std::move(partial)) {}
  const GluingCertificate& partial() const noexcept { return partial_; }

 private:
  GluingCertificate partial_;
};

/// Dyadic gluing engine. In branch mode (oracle.branch set) gaps are measured
/// against the branch generator only and the output word equals the branch.
ShadowResult shadow_construct(const PseudoTrajectory& y, const GluingOracle& oracle, const RateFunction& phi,
                              const ConstructOptions& options = {});

enum class PerturbationType { U, A };

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  double slack = 0.0;  // rhs - lhs
};

struct BoundsReport {
  std::vector<BoundCheck> checks;
  bool all_pass = true;
};

/// err-u, bound-est, est-a, fin-a, plus rec-est (measured <= predicted gaps).
/// For type A the err-u line uses gamma0_sup as its epsilon.
BoundsReport certify_bounds(const GluingCertificate& cert, double eps, PerturbationType type);

}  // namespace shadowing
