#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "implication.hpp"
#include "output.hpp"
#include "seeds.hpp"
#include "shadowing/io.hpp"

namespace shadowctl {

namespace fs = std::filesystem;

namespace {

OJson parsed(const std::string& core_json) { return OJson::parse(core_json); }

std::string real(double v) { return format_real(v); }

void write_pseudo(const fs::path& path, const GeneratorSet& g, const PseudoTrajectory& y,
                  const std::optional<NonAutoSystem>& branch) {
  write_csv(path, [&](std::ostream& out) {
    if (!branch) {
      write_pseudo_csv(out, g, y);
      return;
    }
    std::vector<GeneratorId> ids;
    for (Time t = y.t_min; t < y.t_max(); ++t) ids.push_back(branch->branch.at(t));
    std::vector<double> gaps;
    for (const auto& s : branch_step_gaps(g, y, ids)) gaps.push_back(s.gap);
    write_sequence_csv(out, y.t_min, y.points, ids, gaps);
  });
}

Trajectory unperturbed(const GeneratorSet& g, PerturbSpec spec) {
  spec.model = ExplicitModel{};
  std::mt19937_64 rng(0);  // no gaps, nothing is drawn
  const auto y = make_pseudo(g, spec, rng);
  Trajectory x{y.t_min, y.points, *y.reference_word};
  validate_trajectory(g, x);
  return x;
}

double default_delta(double eps, const RateFunction& rate) {
  const double phi = phi_sum(effective_rate(rate));
  return eps * phi * std::exp(phi);
}

OJson header(const RunRequest& req) { return OJson{{"command", req.command}, {"seed", req.seed}}; }

std::optional<NonAutoSystem> branch_for(const ConfigDoc& doc, const GeneratorSet& g, PerturbSpec& spec) {
  auto branch = build_branch(doc, g);
  if (!branch) return branch;
  if (!branch->branch.covers(spec.t_min, spec.t_max)) doc.fail("/branch", "branch word does not cover the window");
  if (!spec.word) {
    std::vector<GeneratorId> w;
    for (Time t = spec.t_min; t < spec.t_max; ++t) w.push_back(branch->branch.at(t));
    spec.word = std::move(w);
  }
  return branch;
}

// --- perturb -----------------------------------------------------------------

int cmd_perturb(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  const auto g = build_generators(doc, "/generators", build_space(doc));
  auto spec = build_perturb_spec(doc, g);
  const auto branch = branch_for(doc, g, spec);
  const auto th = build_thresholds(doc);
  std::mt19937_64 rng(run_seed(req.seed, 0));
  const auto y = make_pseudo(g, spec, rng);
  write_pseudo(req.out / "pseudo.csv", g, y, branch);

  const auto gaps = branch ? branch_step_gaps(g, y, *y.reference_word) : step_gaps(g, y);
  const auto profile = gap_profile(gaps);
  double total = 0.0;
  for (const auto& s : gaps) total += s.gap;
  OJson j = header(req);
  j["t_min"] = y.t_min;
  j["t_max"] = y.t_max();
  j["moments"] = profile.entries.size();
  j["gap_max"] = profile.gap_max;
  j["gap_mean"] = gaps.empty() ? 0.0 : total / static_cast<double>(gaps.size());
  OJson entries = OJson::array();
  for (const auto& e : profile.entries) entries.push_back({{"t", e.t}, {"amplitude", e.amplitude}});
  j["entries"] = entries;
  if (th.eps && *th.eps > 0.0) {
    const auto f = classify_pseudo(y, g, *th.eps, th.k_min);
    j["classification"] = {{"eps", *th.eps}, {"U", f.is_u}, {"A", f.is_a}, {"S", f.is_s}};
  }
  write_json(req.out / "gaps.json", j);
  summary << fmt::format("perturb: {} points, {} perturbation moments, max gap {}\n", y.points.size(),
                         profile.entries.size(), real(profile.gap_max));
  return kExitOk;
}

// --- glue --------------------------------------------------------------------

int cmd_glue(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  const auto g = build_generators(doc, "/generators", build_space(doc));
  const auto js = build_join_spec(doc, g);
  const auto oracle = build_oracle(doc, g);
  const auto rate = build_rate(doc);
  const auto seg = build_join(g, js);
  const auto y = concatenate_pseudo(seg.left, seg.right);
  write_pseudo(req.out / "pseudo.csv", g, y, std::nullopt);

  OJson j = header(req);
  j["strategy"] = to_string(oracle.strategy);
  j["mode"] = oracle.mode == ApproxMode::strong ? "strong" : "weak";
  try {
    const auto r = glue_pair(oracle, seg.left, seg.right, rate);
    const auto check = verify_strong_approx(r.x, y, rate, r.t0, r.gap, oracle.mode);
    write_csv(req.out / "glued.csv", [&](std::ostream& out) { write_trajectory_csv(out, g, r.x); });
    double worst = 0.0;
    for (double e : r.errors) worst = std::max(worst, e);
    j["t0"] = r.t0;
    j["gap"] = r.gap;
    j["changed"] = r.changed;
    j["max_error"] = worst;
    j["approximation"] = {{"ok", check.ok}, {"worst_ratio", check.worst_ratio}, {"worst_index", check.worst_index}};
    j["errors"] = r.errors;
    write_json(req.out / "glue.json", j);
    summary << fmt::format("glue: t0={} gap {} changed {} points, max error {}, {} approximation {}\n", r.t0,
                           real(r.gap), r.changed, real(worst), j["mode"].get<std::string>(),
                           check.ok ? "holds" : "fails");
    return kExitOk;
  } catch (const OracleFailure& e) {
    j["failure"] = e.what();
    j["worst_index"] = e.worst_index();
    j["worst_ratio"] = std::isfinite(e.worst_ratio()) ? OJson(e.worst_ratio()) : OJson("inf");
    write_json(req.out / "glue.json", j);
    summary << fmt::format("glue: oracle failure at t={}: {}\n", e.worst_index(), e.what());
    return kExitConstruction;
  }
}

// --- shadow ------------------------------------------------------------------

int cmd_shadow(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  const auto g = build_generators(doc, "/generators", build_space(doc));
  auto spec = build_perturb_spec(doc, g);
  const auto branch = branch_for(doc, g, spec);
  const auto oracle = build_oracle(doc, g);
  const auto rate = build_rate(doc);
  const auto th = build_thresholds(doc);
  if (!th.eps) doc.fail("/thresholds", "'eps' is required unless the perturbation model is uniform");
  const double delta = th.delta.value_or(default_delta(*th.eps, rate));
  const auto runs = doc.get_or<std::size_t>("/runs", 1);
  ConstructOptions opts;
  opts.cesaro_k_min = th.k_min;
  const ShadowKind kind = th.type == PerturbationType::U ? ShadowKind::U : ShadowKind::A;

  std::size_t completed = 0;
  std::size_t certified = 0;
  std::size_t verdicts = 0;
  double worst_sup = 0.0;
  double worst_cesaro = 0.0;
  OJson rows = OJson::array();
  for (std::size_t i = 0; i < runs; ++i) {
    const fs::path dir = runs == 1 ? req.out : req.out / fmt::format("run_{:04}", i);
    const std::uint64_t seed = run_seed(req.seed, i);
    std::mt19937_64 rng(seed);
    const auto y = make_pseudo(g, spec, rng);
    write_pseudo(dir / "pseudo.csv", g, y, branch);
    OJson row{{"run", i}, {"run_seed", seed}};
    try {
      const auto res = branch ? branch_shadow_construct(y, *branch, oracle.strategy, rate, opts)
                              : shadow_construct(y, oracle, rate, opts);
      const auto report = certify_bounds(res.cert, *th.eps, th.type);
      const auto verdict = check_shadowing(g.space(), res.z, y, kind, delta, CheckOptions{th.k_min, std::nullopt});
      write_csv(dir / "shadow.csv", [&](std::ostream& out) { write_trajectory_csv(out, g, res.z); });
      write_text(dir / "certificate.json", to_json(res.cert));
      write_text(dir / "bounds.json", to_json(report));
      write_text(dir / "verdict.json", to_json(verdict));
      ++completed;
      certified += report.all_pass ? 1 : 0;
      verdicts += verdict.pass ? 1 : 0;
      worst_sup = std::max(worst_sup, res.cert.final_sup_distance);
      worst_cesaro = std::max(worst_cesaro, res.cert.final_cesaro_distance);
      row["completed"] = true;
      row["rounds"] = res.cert.rounds.size();
      row["final_sup_distance"] = res.cert.final_sup_distance;
      row["final_cesaro_distance"] = res.cert.final_cesaro_distance;
      row["bounds_pass"] = report.all_pass;
      row["verdict_pass"] = verdict.pass;
    } catch (const ConstructionFailure& e) {
      write_text(dir / "certificate.json", to_json(e.partial()));
      row["completed"] = false;
      row["failure"] = e.what();
    }
    rows.push_back(row);
  }

  OJson j = header(req);
  j["runs"] = runs;
  j["eps"] = *th.eps;
  j["delta"] = delta;
  j["perturbation_type"] = th.type == PerturbationType::U ? "U" : "A";
  j["branch_mode"] = branch.has_value();
  j["completed"] = completed;
  j["bounds_pass"] = certified;
  j["verdict_pass"] = verdicts;
  j["worst_sup_distance"] = worst_sup;
  j["worst_cesaro_distance"] = worst_cesaro;
  j["per_run"] = rows;
  write_json(req.out / "summary.json", j);
  summary << fmt::format("shadow: {}/{} runs completed, {} with all bounds passing, {} {}-shadowed at delta {}, "
                         "worst sup {}\n",
                         completed, runs, certified, verdicts, to_string(kind), real(delta), real(worst_sup));
  return completed == runs ? kExitOk : kExitConstruction;
}

// --- falsify -----------------------------------------------------------------

int cmd_falsify(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  const auto g = build_generators(doc, "/generators", build_space(doc));
  const std::string source = doc.get_or<std::string>("/falsify/pseudo/source", "perturbation");
  PseudoTrajectory y;
  if (source == "perturbation") {
    const auto spec = build_perturb_spec(doc, g);
    std::mt19937_64 rng(run_seed(req.seed, 0));
    y = make_pseudo(g, spec, rng);
  } else if (source == "join") {
    const auto seg = build_join(g, build_join_spec(doc, g));
    y = concatenate_pseudo(seg.left, seg.right);
  } else {
    if (g.space().kind() != SpaceKind::real_line) doc.fail("/falsify/pseudo/source", "'points' needs a real space");
    if (!doc.has("/falsify/pseudo/values")) doc.fail("/falsify/pseudo", "missing 'values'");
    y.t_min = doc.get_or<Time>("/falsify/pseudo/t_min", 0);
    for (double v : doc.at("/falsify/pseudo/values").get<std::vector<double>>()) y.points.push_back(SpacePoint::real(v));
  }
  const auto th = build_thresholds(doc);
  std::optional<double> delta = th.delta;
  if (doc.has("/falsify/delta")) delta = doc.at("/falsify/delta").get<double>();
  if (!delta) doc.fail("/falsify", "missing 'delta' (here or under thresholds)");
  const auto stat = doc.get_or<std::string>("/falsify/statistic", "U") == "A" ? FalsifyStatistic::A : FalsifyStatistic::U;
  FalsifyBudget b;
  b.word_length = doc.get_or<std::size_t>("/falsify/budget/word_length", b.word_length);
  b.grid_spacing = doc.get_or("/falsify/budget/grid_spacing", b.grid_spacing);
  b.grid_radius = doc.get_or("/falsify/budget/grid_radius", b.grid_radius);
  b.refine_iters = doc.get_or("/falsify/budget/refine_iters", b.refine_iters);
  b.max_candidates = doc.get_or<std::uint64_t>("/falsify/budget/max_candidates", b.max_candidates);
  if (doc.has("/falsify/budget/grid_center")) b.grid_center = doc.at("/falsify/budget/grid_center").get<double>();

  const auto w = falsify_shadowing(g, y, *delta, b, stat);
  write_pseudo(req.out / "pseudo.csv", g, y, std::nullopt);
  if (w.best) write_csv(req.out / "best.csv", [&](std::ostream& out) { write_trajectory_csv(out, g, *w.best); });
  OJson j = header(req);
  j["witness"] = parsed(to_json(w));
  write_json(req.out / "witness.json", j);
  summary << fmt::format("falsify: claim {}, lower bound {} vs delta {}, {} candidates ({})\n", w.claim,
                         real(w.lower_bound), real(*delta), w.candidates, w.conclusive ? "conclusive" : "inconclusive");
  return kExitOk;
}

// --- transfer ----------------------------------------------------------------

int cmd_transfer(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  if (!doc.has("/transfer")) doc.fail("", "missing 'transfer'");
  const auto space = build_space(doc);
  const auto f = build_generators(doc, "/generators", space);
  const auto rate = build_rate(doc);
  const auto th = build_thresholds(doc);
  const std::string x_source = doc.get_or<std::string>("/transfer/x_source", "unperturbed");
  OJson j = header(req);

  auto make_pair = [&](const GeneratorSet& sys) {
    const auto spec = build_perturb_spec(doc, sys);
    std::mt19937_64 rng(run_seed(req.seed, 0));
    auto y = make_pseudo(sys, spec, rng);
    Trajectory x = x_source == "shadow" ? shadow_construct(y, build_oracle(doc, sys), rate).z : unperturbed(sys, spec);
    return std::pair{std::move(y), std::move(x)};
  };

  if (doc.at("/transfer/mode") == "invert") {
    std::string id = f.at(0).id;
    if (doc.has("/transfer/generator")) {
      id = doc.at("/transfer/generator").get<std::string>();
      if (!f.index_of(id)) doc.fail("/transfer/generator", fmt::format("unknown generator '{}'", id));
    }
    const auto& gen = f.at(f.require(id));
    if (!is_invertible(gen.map)) doc.fail("/transfer/generator", fmt::format("'{}' is not a bijection", id));
    const GeneratorSet single(space, {gen});
    auto [y, x] = make_pair(single);
    const auto r = invert_transfer(gen, space, y, x);
    write_csv(req.out / "reversed_pseudo.csv", [&](std::ostream& out) { write_pseudo_csv(out, r.inverse_system, r.y_reversed); });
    write_csv(req.out / "reversed_trajectory.csv",
              [&](std::ostream& out) { write_trajectory_csv(out, r.inverse_system, r.x_reversed); });
    j["inversion"] = parsed(to_json(r));
    write_json(req.out / "inversion.json", j);
    summary << fmt::format("transfer: inverted '{}', C_lower {}, reversed gap bound {}, reversed trajectory {}\n", id,
                           real(r.c_lower), r.bound_holds ? "holds" : "fails", r.x_reversed_valid ? "valid" : "invalid");
    return kExitOk;
  }

  if (!doc.has("/transfer/target_generators")) doc.fail("/transfer", "conjugate mode needs 'target_generators'");
  const auto g = build_generators(doc, "/transfer/target_generators", space);
  ConjugacySpec spec{build_homeomorphism(doc, "/transfer/forward"), build_homeomorphism(doc, "/transfer/inverse")};
  spec.direction = doc.get_or<std::string>("/transfer/direction", "h_f_equals_g_h") == "h_g_equals_f_h"
                       ? ConjugacyDirection::h_g_equals_f_h
                       : ConjugacyDirection::h_f_equals_g_h;
  if (doc.has("/transfer/pairs")) {
    const auto& pairs = doc.at("/transfer/pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string fid = pairs[i].at("f");
      const std::string gid = pairs[i].at("g");
      if (!f.index_of(fid)) doc.fail(fmt::format("/transfer/pairs/{}/f", i), fmt::format("unknown generator '{}'", fid));
      if (!g.index_of(gid)) doc.fail(fmt::format("/transfer/pairs/{}/g", i), fmt::format("unknown target generator '{}'", gid));
      spec.pairs.push_back({fid, gid});
    }
  } else if (f.size() == 1 && g.size() == 1) {
    spec.pairs.push_back({f.at(0).id, g.at(0).id});
  } else {
    doc.fail("/transfer", "'pairs' is required when either system has several generators");
  }
  if (doc.has("/transfer/region")) {
    const auto region = doc.at("/transfer/region").get<std::vector<double>>();
    if (!(region[0] < region[1])) doc.fail("/transfer/region", "needs lo < hi");
    spec.region_lo = region[0];
    spec.region_hi = region[1];
  }
  std::optional<double> delta = th.delta;
  if (doc.has("/transfer/delta")) delta = doc.at("/transfer/delta").get<double>();
  if (!delta) doc.fail("/transfer", "missing 'delta' (here or under thresholds)");

  const bool forward = spec.direction == ConjugacyDirection::h_f_equals_g_h;
  const GeneratorSet& src = forward ? f : g;
  const GeneratorSet& tgt = forward ? g : f;
  auto [y, x] = make_pair(src);
  try {
    const auto r = conjugate_transfer(spec, f, g, y, x, *delta, run_seed(req.seed, 1));
    write_csv(req.out / "pseudo_image.csv", [&](std::ostream& out) { write_pseudo_csv(out, tgt, r.y_image); });
    write_csv(req.out / "trajectory_image.csv", [&](std::ostream& out) { write_trajectory_csv(out, tgt, r.x_image); });
    j["refused"] = false;
    j["transfer"] = parsed(to_json(r));
    write_json(req.out / "transfer.json", j);
    summary << fmt::format("transfer: U {} -> {}, A {} -> {}, C {}, bound {}\n", real(r.before_u.statistic),
                           real(r.after_u.statistic), real(r.before_a.statistic), real(r.after_a.statistic),
                           real(r.estimate.c), r.bound_holds ? "holds" : "fails");
  } catch (const TransferRefused& e) {
    j["refused"] = true;
    j["reason"] = e.what();
    j["estimate"] = parsed(to_json(e.estimate()));
    write_json(req.out / "transfer.json", j);
    summary << fmt::format("transfer: refused: {}\n", e.what());
  }
  return kExitOk;
}

// --- branch-compare ----------------------------------------------------------

int cmd_branch_compare(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  BranchCompareSpec spec;
  spec.u = doc.get_or("/branch_compare/u", spec.u);
  spec.v = doc.get_or("/branch_compare/v", spec.v);
  spec.t_min = doc.get_or<Time>("/branch_compare/t_min", spec.t_min);
  spec.t_max = doc.get_or<Time>("/branch_compare/t_max", spec.t_max);
  spec.t0 = doc.get_or<Time>("/branch_compare/t0", spec.t0);
  if (doc.has("/branch_compare/delta")) spec.delta = doc.at("/branch_compare/delta").get<double>();
  if (!(spec.t_min < spec.t0 && spec.t0 <= spec.t_max)) doc.fail("/branch_compare", "need t_min < t0 <= t_max");
  const auto r = branch_vs_semigroup_report(spec);
  const GeneratorSet cyclic(Space::finite({1, 2, 3}), {{"g", cyclic_three()}, {"g^-1", inverse(cyclic_three())}});
  write_pseudo(req.out / "pseudo.csv", cyclic, r.pseudo, std::nullopt);
  OJson j = header(req);
  j["report"] = parsed(to_json(r));
  write_json(req.out / "report.json", j);
  summary << fmt::format("branch-compare: semigroup {}, branch {} (best branch statistic {} vs delta {})\n",
                         r.semigroup_pass ? "pass" : "fail", r.branch_pass ? "pass" : "fail",
                         real(r.branch_best_statistic), real(r.delta));
  return kExitOk;
}

}  // namespace

int run_command(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  if (req.command == "perturb") return cmd_perturb(doc, req, summary);
  if (req.command == "glue") return cmd_glue(doc, req, summary);
  if (req.command == "shadow") return cmd_shadow(doc, req, summary);
  if (req.command == "falsify") return cmd_falsify(doc, req, summary);
  if (req.command == "transfer") return cmd_transfer(doc, req, summary);
  if (req.command == "branch-compare") return cmd_branch_compare(doc, req, summary);
  if (req.command == "implication-matrix") return cmd_implication_matrix(doc, req, summary);
  throw ConfigError(fmt::format("unknown command '{}'", req.command));
}

}  // namespace shadowctl
