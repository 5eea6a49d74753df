#pragma once

// CSV and JSON emission. Reals are printed in shortest round-trip form so that
// identical runs give byte-identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include "shadowing/nonauto.hpp"
#include "shadowing/parallel_gluing.hpp"
#include "shadowing/transfer.hpp"
#include "shadowing/verdicts.hpp"

namespace shadowing {

std::string format_real(double v);
std::string format_point(const SpacePoint& p);

inline constexpr const char* kTrajectoryCsvHeader = "t,point,generator_id,gap";

/// ids and gaps have one entry per step (points.size() - 1); the last row
/// leaves both columns empty.
void write_sequence_csv(std::ostream& out, Time t_min, const std::vector<SpacePoint>& points,
                        const std::vector<GeneratorId>& ids, const std::vector<double>& gaps);

/// Rows from step_gaps: argmin generator and its gap.
void write_pseudo_csv(std::ostream& out, const GeneratorSet& g, const PseudoTrajectory& y);
/// Rows from the trajectory's own word; gaps are the measured step residuals.
void write_trajectory_csv(std::ostream& out, const GeneratorSet& g, const Trajectory& x);

struct CsvSequence {
  Time t_min = 0;
  std::vector<SpacePoint> points;
  std::vector<GeneratorId> ids;
  std::vector<double> gaps;
};

/// Throws ValidationError("line N: ...") on malformed input.
CsvSequence read_sequence_csv(std::istream& in, const Space& space);
Trajectory to_trajectory(const CsvSequence& s);

std::string to_json(const Trajectory& x);
std::string to_json(const GluingCertificate& cert);
std::string to_json(const BoundsReport& report);
std::string to_json(const ShadowVerdict& v);
std::string to_json(const FalsificationWitness& w);
std::string to_json(const BiLipschitzEstimate& e);
std::string to_json(const TransferResult& r);
std::string to_json(const InversionResult& r);
std::string to_json(const BranchCompareReport& r);

}  // namespace shadowing
