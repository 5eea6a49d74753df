#include "shadowing/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"

namespace shadowing {

using nlohmann::ordered_json;

std::string format_real(double v) { return fmt::format("{}", v); }

std::string format_point(const SpacePoint& p) {
  return p.is_real() ? format_real(p.value()) : fmt::format("{}", p.label_value());
}

void write_sequence_csv(std::ostream& out, Time t_min, const std::vector<SpacePoint>& points,
                        const std::vector<GeneratorId>& ids, const std::vector<double>& gaps) {
  if (points.empty()) throw ValidationError("cannot write an empty sequence");
  if (ids.size() + 1 != points.size() || gaps.size() + 1 != points.size()) {
    throw ValidationError("csv columns have inconsistent lengths");
  }
  out << kTrajectoryCsvHeader << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << t_min + static_cast<Time>(i) << ',' << format_point(points[i]) << ',';
    if (i + 1 < points.size()) out << ids[i] << ',' << format_real(gaps[i]);
    else out << ',';
    out << '\n';
  }
}

void write_pseudo_csv(std::ostream& out, const GeneratorSet& g, const PseudoTrajectory& y) {
  std::vector<GeneratorId> ids;
  std::vector<double> gaps;
  for (const auto& s : step_gaps(g, y)) {
    ids.push_back(g.at(s.generator).id);
    gaps.push_back(s.gap);
  }
  write_sequence_csv(out, y.t_min, y.points, ids, gaps);
}

void write_trajectory_csv(std::ostream& out, const GeneratorSet& g, const Trajectory& x) {
  std::vector<double> gaps;
  for (std::size_t i = 0; i < x.word.size(); ++i) {
    gaps.push_back(g.space().distance(apply(g.at(g.require(x.word[i])).map, x.points[i]), x.points[i + 1]));
  }
  write_sequence_csv(out, x.t_min, x.points, x.word, gaps);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const char* what) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(fmt::format("line {}: cannot parse {} '{}'", line, what, s));
  }
  return v;
}

}  // namespace

CsvSequence read_sequence_csv(std::istream& in, const Space& space) {
  CsvSequence s;
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw ValidationError("line 1: missing header");
  ++n;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryCsvHeader) {
    throw ValidationError(fmt::format("line 1: expected header '{}', got '{}'", kTrajectoryCsvHeader, line));
  }
  bool ended = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (ended) throw ValidationError(fmt::format("line {}: row after the final row", n));
    const auto cells = split(line);
    if (cells.size() != 4) throw ValidationError(fmt::format("line {}: expected 4 columns, got {}", n, cells.size()));
    const auto t = parse_number<Time>(cells[0], n, "time");
    if (s.points.empty()) {
      s.t_min = t;
    } else if (t != s.t_min + static_cast<Time>(s.points.size())) {
      throw ValidationError(fmt::format("line {}: time {} breaks the consecutive index", n, t));
    }
    SpacePoint p = space.kind() == SpaceKind::real_line ? SpacePoint::real(parse_number<double>(cells[1], n, "point"))
                                                        : SpacePoint::label(parse_number<int>(cells[1], n, "label"));
    if (!space.contains(p)) throw ValidationError(fmt::format("line {}: point outside the space", n));
    s.points.push_back(p);
    if (cells[2].empty() && cells[3].empty()) {
      ended = true;
    } else {
      s.ids.push_back(cells[2]);
      s.gaps.push_back(parse_number<double>(cells[3], n, "gap"));
    }
  }
  if (s.points.empty()) throw ValidationError(fmt::format("line {}: no rows", n));
  if (!ended) throw ValidationError(fmt::format("line {}: last row must leave generator_id and gap empty", n));
  return s;
}

Trajectory to_trajectory(const CsvSequence& s) { return Trajectory{s.t_min, s.points, s.ids}; }

namespace {

ordered_json real(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

ordered_json point(const SpacePoint& p) {
  if (p.is_real()) return real(p.value());
  return p.label_value();
}

ordered_json reals(const std::vector<double>& v) {
  auto a = ordered_json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

ordered_json traj(const Trajectory& x) {
  ordered_json j;
  j["t_min"] = x.t_min;
  j["t_max"] = x.t_max();
  auto pts = ordered_json::array();
  for (const auto& p : x.points) pts.push_back(point(p));
  j["points"] = pts;
  j["word"] = x.word;
  return j;
}

ordered_json pseudo(const PseudoTrajectory& y) {
  ordered_json j;
  j["t_min"] = y.t_min;
  j["t_max"] = y.t_max();
  auto pts = ordered_json::array();
  for (const auto& p : y.points) pts.push_back(point(p));
  j["points"] = pts;
  if (y.reference_word) j["reference_word"] = *y.reference_word;
  return j;
}

ordered_json sums(const std::vector<PartialSum>& v) {
  auto a = ordered_json::array();
  for (const auto& p : v) a.push_back({{"k", p.k}, {"value", real(p.value)}});
  return a;
}

ordered_json cert_json(const GluingCertificate& c) {
  ordered_json j;
  j["completed"] = c.completed;
  if (!c.completed) j["failure"] = c.failure;
  j["branch_mode"] = c.branch_mode;
  j["strategy"] = c.strategy;
  j["window"] = {c.t_min, c.t_max};
  j["bounds"] = {{"phi_sum", real(c.bounds.phi_sum)},
                 {"e_phi", real(c.bounds.e_phi)},
                 {"gap_bound", real(c.bounds.gap_bound)}};
  j["initial"] = {{"moments", c.initial_moments},
                  {"gaps", reals(c.initial_gaps)},
                  {"gap_sup", real(c.gamma0_sup)},
                  {"partial_sums", sums(c.initial_partial_sums)}};
  auto rounds = ordered_json::array();
  for (const auto& r : c.rounds) {
    ordered_json rj;
    rj["round"] = r.round;
    auto segs = ordered_json::array();
    for (const auto& s : r.segments_before) segs.push_back({s.t_min, s.t_max});
    rj["segments_before"] = segs;
    rj["glued_moments"] = r.glued_moments;
    rj["moments"] = r.moments;
    rj["gaps"] = reals(r.gaps);
    rj["predicted"] = reals(r.predicted);
    rj["gap_sup"] = real(r.gap_sup);
    rj["partial_sums"] = sums(r.partial_sums);
    rj["untouched_radius"] = r.untouched_radius;
    rj["sup_distance"] = real(r.sup_distance);
    rj["cesaro_distance"] = real(r.cesaro_distance);
    rj["cauchy_worst_ratio"] = real(r.cauchy_worst_ratio);
    rj["cauchy_worst_index"] = r.cauchy_worst_index;
    rounds.push_back(rj);
  }
  j["rounds"] = rounds;
  j["final"] = {{"sup_distance", real(c.final_sup_distance)},
                {"cesaro_distance", real(c.final_cesaro_distance)},
                {"cesaro_k_min", c.cesaro_k_min},
                {"cesaro_k_max", c.cesaro_k_max}};
  return j;
}

ordered_json verdict_json(const ShadowVerdict& v) {
  ordered_json j;
  j["kind"] = to_string(v.kind);
  j["delta"] = real(v.delta);
  j["statistic"] = real(v.statistic);
  j["pass"] = v.pass;
  if (v.kind == ShadowKind::A) j["k_range"] = {v.k_min, v.k_max};
  if (v.kind == ShadowKind::L) {
    j["tail_split"] = {v.tail_lo, v.tail_hi};
    j["envelope_worst_ratio"] = real(v.envelope_worst_ratio);
  }
  return j;
}

ordered_json estimate_json(const BiLipschitzEstimate& e) {
  ordered_json j;
  j["c_lower"] = real(e.c_lower);
  j["c_upper"] = real(e.c_upper);
  j["c"] = real(e.c);
  j["divergent"] = e.divergent;
  j["used_pairs"] = e.used_pairs;
  j["skipped_pairs"] = e.skipped_pairs;
  auto d = ordered_json::array();
  for (const auto& r : e.decades) {
    d.push_back({{"decade", r.decade}, {"max_ratio", real(r.max_ratio)}, {"min_ratio", real(r.min_ratio)}});
  }
  j["decades"] = d;
  if (!e.diagnostics.empty()) j["diagnostics"] = e.diagnostics;
  return j;
}

ordered_json gaps_json(const std::vector<StepGap>& gaps) {
  auto a = ordered_json::array();
  for (const auto& s : gaps) a.push_back({{"t", s.t}, {"gap", real(s.gap)}});
  return a;
}

}  // namespace

std::string to_json(const Trajectory& x) { return traj(x).dump(2); }
std::string to_json(const GluingCertificate& cert) { return cert_json(cert).dump(2); }

std::string to_json(const BoundsReport& report) {
  ordered_json j;
  j["all_pass"] = report.all_pass;
  auto a = ordered_json::array();
  for (const auto& c : report.checks) {
    a.push_back({{"name", c.name}, {"lhs", real(c.lhs)}, {"rhs", real(c.rhs)}, {"pass", c.pass}, {"slack", real(c.slack)}});
  }
  j["checks"] = a;
  return j.dump(2);
}

std::string to_json(const ShadowVerdict& v) { return verdict_json(v).dump(2); }

std::string to_json(const FalsificationWitness& w) {
  ordered_json j;
  j["claim"] = w.claim;
  j["conclusive"] = w.conclusive;
  j["delta"] = real(w.delta);
  j["lower_bound"] = real(w.lower_bound);
  j["statistic"] = w.statistic == FalsifyStatistic::U ? "U" : "A";
  j["method"] = w.method;
  j["candidates"] = w.candidates;
  j["budget"] = {{"word_length", w.budget.word_length},
                 {"grid_spacing", real(w.budget.grid_spacing)},
                 {"grid_radius", real(w.budget.grid_radius)},
                 {"refine_iters", w.budget.refine_iters},
                 {"max_candidates", w.budget.max_candidates}};
  if (w.budget.grid_center) j["budget"]["grid_center"] = real(*w.budget.grid_center);
  if (!w.diagnostics.empty()) j["diagnostics"] = w.diagnostics;
  j["pseudo"] = pseudo(w.pseudo);
  if (w.best) j["best_candidate"] = traj(*w.best);
  return j.dump(2);
}

std::string to_json(const BiLipschitzEstimate& e) { return estimate_json(e).dump(2); }

std::string to_json(const TransferResult& r) {
  ordered_json j;
  j["intertwining"] = {{"ok", r.intertwining.ok},
                       {"max_residual", real(r.intertwining.max_residual)},
                       {"max_roundtrip", real(r.intertwining.max_roundtrip)}};
  j["estimate"] = estimate_json(r.estimate);
  j["before"] = {{"U", verdict_json(r.before_u)}, {"A", verdict_json(r.before_a)}};
  j["after"] = {{"U", verdict_json(r.after_u)}, {"A", verdict_json(r.after_a)}};
  j["bound_holds"] = r.bound_holds;
  j["pseudo_image"] = pseudo(r.y_image);
  j["trajectory_image"] = traj(r.x_image);
  return j.dump(2);
}

std::string to_json(const InversionResult& r) {
  ordered_json j;
  j["inverse_generator"] = r.inverse_system.at(0).id;
  j["inverse_map"] = describe(r.inverse_system.at(0).map);
  j["c_lower"] = real(r.c_lower);
  j["bound_holds"] = r.bound_holds;
  j["x_reversed_valid"] = r.x_reversed_valid;
  j["original_gaps"] = gaps_json(r.original_gaps);
  j["reversed_gaps"] = gaps_json(r.reversed_gaps);
  j["pseudo_reversed"] = pseudo(r.y_reversed);
  j["trajectory_reversed"] = traj(r.x_reversed);
  return j.dump(2);
}

std::string to_json(const BranchCompareReport& r) {
  ordered_json j;
  j["delta"] = real(r.delta);
  j["semigroup"] = {{"pass", r.semigroup_pass}};
  if (r.semigroup_verdict) j["semigroup"]["verdict"] = verdict_json(*r.semigroup_verdict);
  if (!r.semigroup_failure.empty()) j["semigroup"]["failure"] = r.semigroup_failure;
  j["branch"] = {{"pass", r.branch_pass},
                 {"engine_failed", r.branch_engine_failed},
                 {"best_statistic", real(r.branch_best_statistic)}};
  if (!r.branch_failure.empty()) j["branch"]["failure"] = r.branch_failure;
  auto ex = ordered_json::array();
  for (const auto& v : r.branch_exhaustive) ex.push_back(verdict_json(v));
  j["branch"]["exhaustive"] = ex;
  if (r.branch_partial) j["branch"]["partial_certificate"] = cert_json(*r.branch_partial);
  j["pseudo"] = pseudo(r.pseudo);
  return j.dump(2);
}

}  // namespace shadowing
