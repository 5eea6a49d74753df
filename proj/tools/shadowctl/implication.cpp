#include "implication.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include <fmt/format.h>

#include "output.hpp"
#include "shadowing/io.hpp"
#include "shadowing/verdicts.hpp"

namespace shadowctl {

namespace {

// A class is (perturbation type, shadowing type).
struct ShadowClass {
  const char* name;
  char perturbation;  // 'U', 'A', 'S'
  ShadowKind kind;
};

constexpr std::array<ShadowClass, 7> kClasses{{{"UU", 'U', ShadowKind::U},
                                               {"UA", 'U', ShadowKind::A},
                                               {"AU", 'A', ShadowKind::U},
                                               {"AA", 'A', ShadowKind::A},
                                               {"SU", 'S', ShadowKind::U},
                                               {"SA", 'S', ShadowKind::A},
                                               {"SL", 'S', ShadowKind::L}}};

// Published table, row => column, in kClasses order. Reference only.
constexpr std::array<std::array<const char*, 7>, 7> kReference{{
    {"=", "+", "-", "-", "+", "+", "?"},
    {"-?", "=", "?", "-?", "+", "+", "?"},
    {"+?", "+?", "=", "+", "+", "+", "?"},
    {"-", "-?", "-", "=", "-?", "+", "-?"},
    {"-?", "?", "+?", "?", "=", "+", "+?"},
    {"-", "+?", "?", "+?", "-", "=", "+?"},
    {"-", "?", "-?", "-?", "-", "?", "="},
}};

enum class Status { holds, fails, undecided, not_evaluated };

const char* to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::undecided: return "undecided";
    case Status::not_evaluated: return "not-evaluated";
  }
  return "?";
}

struct Params {
  double delta = 0.1;
  std::vector<double> eps{0.01, 0.005};
  double gamma_max = 1.0;
  Time half_window = 64;
};

// How pseudo-trajectories of each perturbation type are laid out for one system.
struct System {
  std::string name;
  GeneratorSet g;
  GlueStrategy strategy;
  BuildDirection direction;
  SpacePoint start;
  std::function<std::vector<GeneratorId>(Time, Time)> word;  // null: first generator every step
  bool finite = false;
  bool long_windows = true;  // A-type pseudo-trajectories need >= gamma_max/eps steps
  bool single_real = false;  // falsifier can refine starts and check A
  RateFunction rate = RateFunction::geometric(0.5);
};

System make_system(const std::string& name) {
  const Space R = Space::real_line();
  if (name == "doubling")
    return {name, GeneratorSet(R, {{"2x", affine(2.0)}}), GlueStrategy::expanding_pick_forward,
            BuildDirection::backward, SpacePoint::real(0.3), nullptr, false, true, true};
  if (name == "halving")
    return {name, GeneratorSet(R, {{"x/2", affine(0.5)}}), GlueStrategy::contracting_pick_backward,
            BuildDirection::forward, SpacePoint::real(0.3), nullptr, false, true, true};
  if (name == "shift")
    return {name, GeneratorSet(R, {{"x+1", psi(1, 1, 1, 1)}}), GlueStrategy::expanding_pick_forward,
            BuildDirection::forward, SpacePoint::real(0.0), nullptr, false, true, true};
  if (name == "two-generator") {
    // x/2 orbit down to 2 on t < 0, 2x orbit on t >= 0
    auto word = [](Time lo, Time hi) {
      std::vector<GeneratorId> w;
      for (Time t = lo; t < hi; ++t) w.push_back(t < -1 ? "x/2" : "2x");
      return w;
    };
    return {name, GeneratorSet(R, {{"2x", affine(2.0)}, {"x/2", affine(0.5)}}), GlueStrategy::expanding_pick_forward,
            BuildDirection::forward, SpacePoint::real(64.0), word, false, false, false};
  }
  // reroutes touch up to 3 steps either side of the join, so the rate is a box
  return {name, GeneratorSet(Space::finite({1, 2, 3}), {{"g", cyclic_three()}, {"g^-1", inverse(cyclic_three())}}),
          GlueStrategy::finite_cyclic_reroute, BuildDirection::forward, SpacePoint::label(1), nullptr, true, true,
          false, RateFunction::tabulated(-3, std::vector<double>(7, 1.0))};
}

struct Pseudo {
  PseudoTrajectory y;
  Time perturbed_step = -1;  // falsifier sub-window anchor
  std::string description;
};

// U: +eps on every step. A: one gamma_max gap on step -1 -> 0 over a window
// long enough that the mean is <= eps. S: one eps gap on step -1 -> 0.
std::optional<Pseudo> build_pseudo(const System& s, char type, double eps, const Params& p) {
  Pseudo out;
  if (s.finite) {
    // discrete metric: every nonzero gap is 1, so U-type at eps < 1 is a true
    // trajectory; A and S use the u = v = 1 join
    if (type == 'U') return std::nullopt;
    Time half = p.half_window / 2;
    if (type == 'A') half = std::max(half, static_cast<Time>(std::ceil(1.0 / (2.0 * eps))));
    JoinSpec js;
    js.left_generator = js.right_generator = "g";
    js.u = js.v = SpacePoint::label(1);
    js.anchor = JoinAnchor::end;
    js.t_min = -half;
    js.t0 = 0;
    js.t_max = half - 1;
    const auto seg = build_join(s.g, js);
    out.y = concatenate_pseudo(seg.left, seg.right);
    out.description = fmt::format("g-orbit join u=v=1, gap 1, window [{}, {}]", js.t_min, js.t_max);
    return out;
  }
  if (type == 'A' && !s.long_windows) return std::nullopt;
  Time half = s.long_windows ? p.half_window : 6;
  if (type == 'A') half = std::max(half, static_cast<Time>(std::ceil(p.gamma_max / (2.0 * eps))));
  PerturbSpec spec;
  spec.t_min = -half;
  spec.t_max = half;
  spec.start = s.start;
  spec.direction = s.direction;
  if (s.word) spec.word = s.word(spec.t_min, spec.t_max);
  ExplicitModel m;
  if (type == 'U') {
    for (Time t = spec.t_min; t < spec.t_max; ++t) m.gaps.emplace_back(t, eps);
    out.description = fmt::format("gap {} on every step, window [{}, {}]", format_real(eps), spec.t_min, spec.t_max);
  } else {
    const double a = type == 'A' ? p.gamma_max : eps;
    m.gaps.emplace_back(-1, a);
    out.description = fmt::format("single gap {} on step -1, window [{}, {}]", format_real(a), spec.t_min, spec.t_max);
  }
  spec.model = m;
  std::mt19937_64 rng(0);  // explicit gaps draw nothing
  out.y = make_pseudo(s.g, spec, rng);
  return out;
}

PseudoTrajectory sub_window(const PseudoTrajectory& y, Time lo, Time hi) {
  lo = std::max(lo, y.t_min);
  hi = std::min(hi, y.t_max());
  PseudoTrajectory out{lo, {}, std::nullopt};
  for (Time t = lo; t <= hi; ++t) out.points.push_back(y.at(t));
  if (y.reference_word) {
    out.reference_word.emplace();
    for (Time t = lo; t < hi; ++t) out.reference_word->push_back((*y.reference_word)[static_cast<std::size_t>(t - y.t_min)]);
  }
  return out;
}

struct ClassEvidence {
  Status status = Status::not_evaluated;
  OJson detail = OJson::object();
};

// holds: the engine output passes the verdict at delta for the smallest eps.
// fails: the falsifier claims for that statistic at every eps in the list.
ClassEvidence evaluate(const System& s, const ShadowClass& c, const Params& p) {
  ClassEvidence ev;
  const double eps_small = *std::min_element(p.eps.begin(), p.eps.end());
  const auto probe = build_pseudo(s, c.perturbation, eps_small, p);
  if (!probe) {
    ev.detail["reason"] = s.finite ? "U-type pseudo-trajectories at eps < 1 are exact under the discrete metric"
                                   : "A-type windows of >= gamma_max/eps steps overflow the backward x/2 orbit";
    return ev;
  }
  ev.detail["pseudo"] = probe->description;

  bool holds = false;
  try {
    const GluingOracle oracle{ApproxMode::strong, s.strategy, s.g, std::nullopt, {}};
    const auto res = shadow_construct(probe->y, oracle, s.rate);
    const auto v = check_shadowing(s.g.space(), res.z, probe->y, c.kind, p.delta);
    holds = v.pass;
    ev.detail["engine"] = {{"eps", eps_small}, {"statistic", v.statistic}, {"pass", v.pass}};
  } catch (const OracleFailure& e) {
    ev.detail["engine"] = {{"eps", eps_small}, {"failure", e.what()}};
  }

  bool fails = false;
  const bool a_checkable = s.single_real;  // the A statistic needs the whole window
  if (c.kind == ShadowKind::L) {
    ev.detail["falsifier"] = "L-shadowing has no finite-window falsifier";
  } else if (c.kind == ShadowKind::A && !a_checkable) {
    ev.detail["falsifier"] = "A statistic is only falsified for single real generators";
  } else {
    fails = true;
    OJson runs = OJson::array();
    for (double eps : p.eps) {
      const auto ps = build_pseudo(s, c.perturbation, eps, p);
      PseudoTrajectory y = ps->y;
      FalsifyBudget b;
      if (s.single_real) {
        double drift = p.gamma_max;
        for (std::size_t i = 0; i + 1 < y.points.size(); ++i) drift += eps;
        b.grid_radius = std::max(2.0 * p.delta, std::min(drift, 20.0));
        b.grid_spacing = 1e-3;
      } else {
        // U over a sub-window bounds U over the full window from below
        y = sub_window(y, ps->perturbed_step - 6, ps->perturbed_step + 6);
        b.word_length = 12;
        b.grid_radius = std::max(0.1, p.delta);
      }
      const auto stat = c.kind == ShadowKind::A ? FalsifyStatistic::A : FalsifyStatistic::U;
      const auto w = falsify_shadowing(s.g, y, p.delta, b, stat);
      runs.push_back({{"eps", eps},
                      {"window", {y.t_min, y.t_max()}},
                      {"lower_bound", w.lower_bound},
                      {"claim", w.claim},
                      {"conclusive", w.conclusive},
                      {"candidates", w.candidates}});
      fails = fails && w.claim;
    }
    ev.detail["falsifier"] = runs;
  }
  ev.status = fails ? Status::fails : holds ? Status::holds : Status::undecided;
  if (fails && holds) ev.detail["conflict"] = "engine passed while the falsifier claimed";
  return ev;
}

}  // namespace

int cmd_implication_matrix(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary) {
  Params p;
  p.delta = doc.get_or("/implication/delta", p.delta);
  p.eps = doc.get_or("/implication/eps", p.eps);
  p.gamma_max = doc.get_or("/implication/gamma_max", p.gamma_max);
  p.half_window = doc.get_or<Time>("/implication/half_window", p.half_window);
  std::vector<std::string> names{"doubling", "halving", "shift", "two-generator", "cyclic-pair"};
  names = doc.get_or("/implication/systems", names);
  if (names.size() < 2) doc.fail("/implication/systems", "needs at least 2 systems");
  if (p.eps.empty()) doc.fail("/implication/eps", "needs at least one eps");

  std::map<std::string, std::array<ClassEvidence, 7>> evidence;
  OJson ej = OJson::object();
  ej["command"] = req.command;
  ej["delta"] = p.delta;
  ej["eps"] = p.eps;
  ej["gamma_max"] = p.gamma_max;
  ej["half_window"] = p.half_window;
  OJson systems = OJson::object();
  for (const auto& name : names) {
    const auto sys = make_system(name);
    OJson sj = OJson::object();
    for (std::size_t i = 0; i < kClasses.size(); ++i) {
      evidence[name][i] = evaluate(sys, kClasses[i], p);
      OJson cj = evidence[name][i].detail;
      cj["status"] = to_string(evidence[name][i].status);
      sj[kClasses[i].name] = cj;
    }
    systems[name] = sj;
  }
  ej["systems"] = systems;

  std::size_t counter = 0;
  std::size_t consistent = 0;
  std::string matrix = "premise";
  for (const auto& c : kClasses) matrix += fmt::format(",{}", c.name);
  matrix += "\n";
  std::string cells = "premise,conclusion,evidence,witnesses,published_reference\n";
  for (std::size_t r = 0; r < kClasses.size(); ++r) {
    matrix += kClasses[r].name;
    for (std::size_t c = 0; c < kClasses.size(); ++c) {
      std::string verdict = "no-evidence";
      std::vector<std::string> witnesses;
      if (r == c) {
        verdict = "consistent";
      } else {
        for (const auto& name : names) {
          if (evidence[name][r].status == Status::holds && evidence[name][c].status == Status::fails)
            witnesses.push_back(name);
        }
        if (!witnesses.empty()) {
          verdict = "counterexample-found";
        } else if (std::string ref = kReference[r][c]; ref == "+" || ref == "+?") {
          for (const auto& name : names) {
            if (evidence[name][r].status == Status::holds && evidence[name][c].status == Status::holds)
              witnesses.push_back(name);
          }
          if (!witnesses.empty()) verdict = "consistent";
        }
      }
      counter += verdict == "counterexample-found" ? 1 : 0;
      consistent += verdict == "consistent" && r != c ? 1 : 0;
      matrix += "," + verdict;
      std::string joined;
      for (const auto& w : witnesses) joined += (joined.empty() ? "" : ";") + w;
      cells += fmt::format("{},{},{},{},{}\n", kClasses[r].name, kClasses[c].name, verdict, joined, kReference[r][c]);
    }
    matrix += "\n";
  }
  write_text(req.out / "implication_matrix.csv", matrix);
  write_text(req.out / "implication_cells.csv", cells);
  write_json(req.out / "evidence.json", ej);
  summary << fmt::format("implication-matrix: {} systems, {} counterexample cells, {} consistent off-diagonal cells\n",
                         names.size(), counter, consistent);
  return kExitOk;
}

}  // namespace shadowctl
