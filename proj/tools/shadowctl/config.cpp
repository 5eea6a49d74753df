#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/reader.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>
#include <rapidjson/writer.h>

#include "schema_text.hpp"

namespace shadowctl {

namespace rj = rapidjson;

namespace {

std::string escape_token(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string stringify(const rj::Pointer& p) {
  rj::StringBuffer sb;
  p.Stringify(sb);
  return sb.GetString();
}

std::string render(const rj::Value& v) {
  rj::StringBuffer sb;
  rj::Writer<rj::StringBuffer> w(sb);
  v.Accept(w);
  return sb.GetString();
}

// Records the line of every value (object members: the line of their key).
class LineRecorder : public rj::BaseReaderHandler<rj::UTF8<>, LineRecorder> {
 public:
  LineRecorder(rj::StringStream& ss, const std::vector<std::size_t>& newlines, std::map<std::string, int>& out)
      : ss_(ss), newlines_(newlines), out_(out) {}

  bool Default() { return value(false, false); }
  bool StartObject() { return value(true, true); }
  bool StartArray() { return value(true, false); }
  bool EndObject(rj::SizeType) { return pop(); }
  bool EndArray(rj::SizeType) { return pop(); }
  bool Key(const char* s, rj::SizeType n, bool) {
    auto& top = stack_.back();
    top.key.assign(s, n);
    out_[top.path + "/" + escape_token(top.key)] = line_here();
    return true;
  }

 private:
  struct Frame {
    bool object = false;
    std::string path;
    std::size_t index = 0;
    std::string key;
  };

  int line_here() const {
    const std::size_t off = ss_.Tell() == 0 ? 0 : ss_.Tell() - 1;
    return 1 + static_cast<int>(std::lower_bound(newlines_.begin(), newlines_.end(), off) - newlines_.begin());
  }

  bool value(bool container, bool object) {
    std::string path;
    if (!stack_.empty()) {
      auto& top = stack_.back();
      if (top.object) {
        path = top.path + "/" + escape_token(top.key);
      } else {
        path = top.path + "/" + std::to_string(top.index++);
        out_[path] = line_here();
      }
    } else {
      out_[""] = line_here();
    }
    if (container) stack_.push_back({object, path, 0, {}});
    return true;
  }

  bool pop() {
    stack_.pop_back();
    return true;
  }

  rj::StringStream& ss_;
  const std::vector<std::size_t>& newlines_;
  std::map<std::string, int>& out_;
  std::vector<Frame> stack_;
};

struct Violation {
  std::string pointer;
  std::string message;
};

std::string join_names(const rj::Value& arr) {
  std::string s;
  for (const auto& v : arr.GetArray()) {
    if (!s.empty()) s += ", ";
    s += render(v);
  }
  return s;
}

std::optional<Violation> check(const rj::Value& schema, const rj::Value& definitions, const rj::Value& node,
                               const std::string& base);

// Explains a failing keyword from the schema node that raised it.
Violation explain(const rj::Value& s, const char* keyword, const rj::Value& node, const std::string& ptr,
                  const rj::Value& definitions) {
  const std::string kw = keyword;
  if (kw == "required" && node.IsObject()) {
    for (const auto& r : s["required"].GetArray()) {
      if (!node.HasMember(r)) return {ptr, fmt::format("missing required property '{}'", r.GetString())};
    }
  }
  if (kw == "additionalProperties" && node.IsObject()) {
    for (const auto& m : node.GetObject()) {
      if (!s.HasMember("properties") || !s["properties"].HasMember(m.name)) {
        return {ptr + "/" + escape_token(m.name.GetString()), fmt::format("unknown property '{}'", m.name.GetString())};
      }
    }
  }
  if (kw == "additionalProperties") {
    // rapidjson points at the offending member itself
    const auto slash = ptr.rfind('/');
    return {ptr, fmt::format("unknown property '{}'", slash == std::string::npos ? ptr : ptr.substr(slash + 1))};
  }
  if (kw == "type") return {ptr, fmt::format("expected type {}", render(s["type"]))};
  if (kw == "enum") return {ptr, fmt::format("must be one of {}", join_names(s["enum"]))};
  if (kw == "minimum" || kw == "maximum") {
    const bool excl = s.HasMember(kw == "minimum" ? "exclusiveMinimum" : "exclusiveMaximum");
    return {ptr, fmt::format("must be {} {}", kw == "minimum" ? (excl ? ">" : ">=") : (excl ? "<" : "<="),
                             render(s[keyword]))};
  }
  if (kw == "minItems") return {ptr, fmt::format("needs at least {} items", render(s["minItems"]))};
  if (kw == "maxItems") return {ptr, fmt::format("allows at most {} items", render(s["maxItems"]))};
  if (kw == "minLength") return {ptr, "must not be empty"};
  if (kw == "uniqueItems") return {ptr, "items must be unique"};
  if (kw == "oneOf") {
    // Pick the branch whose discriminator accepts this node and report its first problem.
    for (const char* disc : {"type", "model"}) {
      if (!node.IsObject() || !node.HasMember(disc) || !s.HasMember("properties") || !s["properties"].HasMember(disc)) continue;
      for (const auto& branch : s["oneOf"].GetArray()) {
        const auto& bp = branch["properties"];
        if (!bp.HasMember(disc)) continue;
        for (const auto& e : bp[disc]["enum"].GetArray()) {
          if (e == node[disc]) {
            if (auto v = check(branch, definitions, node, ptr)) return *v;
          }
        }
      }
      return {ptr + "/" + disc, fmt::format("'{}' must be one of {}", disc, join_names(s["properties"][disc]["enum"]))};
    }
    return {ptr, "does not match any allowed form"};
  }
  return {ptr, fmt::format("violates '{}'", kw)};
}

std::optional<Violation> check(const rj::Value& schema, const rj::Value& definitions, const rj::Value& node,
                               const std::string& base) {
  rj::Document sd;
  sd.CopyFrom(schema, sd.GetAllocator());
  if (sd.HasMember("definitions")) sd.RemoveMember("definitions");
  rj::Value defs;
  defs.CopyFrom(definitions, sd.GetAllocator());
  sd.AddMember("definitions", defs, sd.GetAllocator());
  rj::SchemaDocument compiled(sd);
  rj::SchemaValidator validator(compiled);
  if (node.Accept(validator)) return std::nullopt;

  const std::string rel = stringify(validator.GetInvalidDocumentPointer());
  const std::string spath = stringify(validator.GetInvalidSchemaPointer());
  const rj::Value* failing_schema = rj::Pointer(spath.c_str()).Get(sd);
  const rj::Value* failing_node = validator.GetInvalidDocumentPointer().Get(node);
  if (failing_schema == nullptr || failing_node == nullptr) {
    return Violation{base + rel, fmt::format("violates '{}'", validator.GetInvalidSchemaKeyword())};
  }
  return explain(*failing_schema, validator.GetInvalidSchemaKeyword(), *failing_node, base + rel, definitions);
}

}  // namespace

const std::string& experiment_schema() {
  static const std::string text = kExperimentSchema;
  return text;
}

ConfigDoc ConfigDoc::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

ConfigDoc ConfigDoc::parse(const std::string& text, const std::string& name) {
  ConfigDoc doc;
  doc.name_ = name;
  std::vector<std::size_t> newlines;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') newlines.push_back(i);
  }
  auto line_at = [&](std::size_t off) {
    return 1 + static_cast<int>(std::lower_bound(newlines.begin(), newlines.end(), off) - newlines.begin());
  };

  rj::StringStream ss(text.c_str());
  LineRecorder rec(ss, newlines, doc.lines_);
  rj::Reader reader;
  const auto res = reader.Parse<rj::kParseFullPrecisionFlag>(ss, rec);
  if (res.IsError()) {
    throw ConfigError(fmt::format("{}:{}: syntax error: {}", name, line_at(res.Offset()),
                                  rj::GetParseError_En(res.Code())));
  }

  rj::Document d;
  d.Parse<rj::kParseFullPrecisionFlag>(text.c_str());
  rj::Document sd;
  sd.Parse(experiment_schema().c_str());
  if (auto v = check(sd, sd["definitions"], d, "")) doc.fail(v->pointer, v->message);

  doc.root_ = Json::parse(text);
  return doc;
}

bool ConfigDoc::has(const std::string& pointer) const { return root_.contains(Json::json_pointer(pointer)); }

const Json& ConfigDoc::at(const std::string& pointer) const { return root_.at(Json::json_pointer(pointer)); }

int ConfigDoc::line_of(std::string pointer) const {
  // fall back to the nearest recorded ancestor
  while (true) {
    if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
    const auto slash = pointer.rfind('/');
    if (slash == std::string::npos) return 1;
    pointer.erase(slash);
  }
}

void ConfigDoc::fail(const std::string& pointer, const std::string& message) const {
  throw ConfigError(fmt::format("{}:{}: {}: {}", name_, line_of(pointer), pointer.empty() ? "/" : pointer, message));
}

Space build_space(const ConfigDoc& doc) {
  if (!doc.has("/space") || doc.at("/space/kind") == "real") {
    if (doc.has("/space/labels")) doc.fail("/space/labels", "labels are only allowed for finite spaces");
    return Space::real_line();
  }
  if (!doc.has("/space/labels")) doc.fail("/space", "finite space needs 'labels'");
  auto labels = doc.at("/space/labels").get<std::vector<int>>();
  std::set<int> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen.insert(labels[i]).second) doc.fail(fmt::format("/space/labels/{}", i), "duplicate label");
  }
  return Space::finite(std::move(labels));
}

namespace {

EndomorphismSpec build_map(const ConfigDoc& doc, const std::string& ptr, const Space& space,
                           const std::vector<Generator>& earlier) {
  const auto& m = doc.at(ptr);
  const std::string type = m.at("type");
  auto lookup = [&](const std::string& id, const std::string& p) -> const EndomorphismSpec& {
    for (const auto& g : earlier) {
      if (g.id == id) return g.map;
    }
    doc.fail(p, fmt::format("generator '{}' is not defined before this entry", id));
  };
  try {
    if (type == "affine") {
      if (space.kind() != SpaceKind::real_line) doc.fail(ptr + "/type", "affine maps need a real space");
      return affine(m.at("slope").get<double>(), m.value("intercept", 0.0));
    }
    if (type == "psi") {
      if (space.kind() != SpaceKind::real_line) doc.fail(ptr + "/type", "psi maps need a real space");
      return psi(m.at("a").get<double>(), m.at("b").get<double>(), m.at("c").get<double>(), m.at("d").get<double>());
    }
    if (type == "table") {
      if (space.kind() != SpaceKind::finite_discrete) doc.fail(ptr + "/type", "table maps need a finite space");
      auto images = m.at("images").get<std::vector<int>>();
      if (images.size() != space.labels().size()) {
        doc.fail(ptr + "/images", fmt::format("needs {} images, one per label", space.labels().size()));
      }
      for (std::size_t i = 0; i < images.size(); ++i) {
        if (!space.contains(SpacePoint::label(images[i]))) {
          doc.fail(fmt::format("{}/images/{}", ptr, i), fmt::format("{} is not a label of the space", images[i]));
        }
      }
      return EndomorphismSpec(FiniteTable{space.labels(), std::move(images)});
    }
    if (type == "inverse") return inverse(lookup(m.at("of"), ptr + "/of"));
    std::vector<EndomorphismSpec> parts;
    for (std::size_t i = 0; i < m.at("of").size(); ++i) {
      parts.push_back(lookup(m.at("of")[i], fmt::format("{}/of/{}", ptr, i)));
    }
    return compose(std::move(parts));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    doc.fail(ptr, e.what());
  }
}

}  // namespace

GeneratorSet build_generators(const ConfigDoc& doc, const std::string& pointer, const Space& space) {
  if (!doc.has(pointer)) doc.fail(pointer.substr(0, pointer.rfind('/')), fmt::format("missing '{}'", pointer.substr(pointer.rfind('/') + 1)));
  std::vector<Generator> gens;
  const auto& arr = doc.at(pointer);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = fmt::format("{}/{}", pointer, i);
    const std::string id = arr[i].at("id");
    for (const auto& g : gens) {
      if (g.id == id) doc.fail(p + "/id", fmt::format("duplicate generator id '{}'", id));
    }
    gens.push_back({id, build_map(doc, p + "/map", space, gens)});
  }
  return GeneratorSet(space, std::move(gens));
}

std::vector<GeneratorId> build_word(const ConfigDoc& doc, const std::string& pointer, const GeneratorSet& g) {
  std::vector<GeneratorId> out;
  auto resolve = [&](const std::string& id, const std::string& p) {
    if (!g.index_of(id)) doc.fail(p, fmt::format("unknown generator '{}'", id));
    return id;
  };
  const auto& arr = doc.at(pointer);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = fmt::format("{}/{}", pointer, i);
    if (arr[i].is_string()) {
      out.push_back(resolve(arr[i], p));
      continue;
    }
    const auto& rep = arr[i].at("repeat");
    const auto times = arr[i].at("times").get<std::size_t>();
    if (out.size() + rep.size() * times > 10'000'000) doc.fail(p, "word longer than 10^7 steps");
    for (std::size_t k = 0; k < times; ++k) {
      for (std::size_t j = 0; j < rep.size(); ++j) out.push_back(resolve(rep[j], fmt::format("{}/repeat/{}", p, j)));
    }
  }
  return out;
}

RateFunction build_rate(const ConfigDoc& doc) {
  if (!doc.has("/rate")) return RateFunction::geometric(0.5);
  if (doc.at("/rate/type") == "geometric") return RateFunction::geometric(doc.at("/rate/lambda").get<double>());
  const auto k_lo = doc.at("/rate/k_lo").get<Time>();
  auto values = doc.at("/rate/values").get<std::vector<double>>();
  if (k_lo + static_cast<Time>(values.size()) - 1 < 0) doc.fail("/rate/values", "table must reach k = 0");
  return RateFunction::tabulated(k_lo, std::move(values), doc.get_or("/rate/tail_scale", 0.0),
                                 doc.get_or("/rate/tail_ratio", 0.0));
}

Window build_window(const ConfigDoc& doc) {
  if (!doc.has("/window")) doc.fail("", "missing 'window'");
  Window w{doc.at("/window/t_min").get<Time>(), doc.at("/window/t_max").get<Time>()};
  if (w.t_max <= w.t_min) doc.fail("/window/t_max", "must be greater than t_min");
  if (w.t_max - w.t_min > 10'000'000) doc.fail("/window", "window longer than 10^7 steps");
  return w;
}

PerturbSpec build_perturb_spec(const ConfigDoc& doc, const GeneratorSet& g) {
  const Window w = build_window(doc);
  PerturbSpec spec;
  spec.t_min = w.t_min;
  spec.t_max = w.t_max;
  if (!doc.has("/perturbation")) doc.fail("", "missing 'perturbation'");
  const auto& p = doc.at("/perturbation");
  const std::string model = p.at("model");
  if (model == "uniform") {
    spec.model = UniformModel{p.at("eps").get<double>()};
  } else if (model == "clipped_gaussian") {
    spec.model = ClippedGaussianModel{p.at("sigma").get<double>(), p.at("gamma_max").get<double>()};
  } else if (model == "single") {
    const auto t = p.at("t").get<Time>();
    if (t < w.t_min || t >= w.t_max) doc.fail("/perturbation/t", "step must lie in [t_min, t_max - 1]");
    spec.model = SingleModel{t, p.at("amplitude").get<double>()};
  } else if (model == "explicit") {
    ExplicitModel m;
    for (std::size_t i = 0; i < p.at("gaps").size(); ++i) {
      const auto t = p.at("gaps")[i][0].get<Time>();
      if (t < w.t_min || t >= w.t_max) {
        doc.fail(fmt::format("/perturbation/gaps/{}", i), "step must lie in [t_min, t_max - 1]");
      }
      m.gaps.emplace_back(t, p.at("gaps")[i][1].get<double>());
    }
    spec.model = m;
  } else {
    spec.model = BernoulliModel{p.at("p").get<double>(), p.at("amplitude").get<double>()};
  }

  const auto& space = g.space();
  if (doc.has("/start")) {
    const double s = doc.at("/start").get<double>();
    if (space.kind() == SpaceKind::finite_discrete) {
      if (s != std::floor(s) || !space.contains(SpacePoint::label(static_cast<int>(s)))) {
        doc.fail("/start", "must be a label of the space");
      }
      spec.start = SpacePoint::label(static_cast<int>(s));
    } else {
      spec.start = SpacePoint::real(s);
    }
  } else if (space.kind() == SpaceKind::finite_discrete) {
    spec.start = SpacePoint::label(space.labels().front());
  }
  if (doc.get_or<std::string>("/direction", "forward") == "backward") {
    if (space.kind() == SpaceKind::finite_discrete) doc.fail("/direction", "backward builds need a real space");
    spec.direction = BuildDirection::backward;
  }
  if (doc.has("/word")) {
    auto word = build_word(doc, "/word", g);
    if (static_cast<Time>(word.size()) != w.t_max - w.t_min) {
      doc.fail("/word", fmt::format("has {} steps, the window has {}", word.size(), w.t_max - w.t_min));
    }
    spec.word = std::move(word);
  }
  return spec;
}

GluingOracle build_oracle(const ConfigDoc& doc, const GeneratorSet& g) {
  GluingOracle o{ApproxMode::strong, GlueStrategy::expanding_pick_forward, g, std::nullopt, {}};
  if (doc.get_or<std::string>("/oracle/mode", "strong") == "weak") o.mode = ApproxMode::weak;
  if (doc.has("/oracle/strategy")) o.strategy = parse_strategy(doc.at("/oracle/strategy"));
  if (doc.has("/oracle/table")) {
    const auto& t = doc.at("/oracle/table");
    for (std::size_t i = 0; i < t.size(); ++i) {
      o.table.push_back({t[i].at("from").get<int>(), t[i].at("to").get<int>(),
                         build_word(doc, fmt::format("/oracle/table/{}/word", i), g)});
    }
  }
  if (o.strategy == GlueStrategy::custom_table && o.table.empty()) {
    doc.fail("/oracle", "custom-table strategy needs a non-empty 'table'");
  }
  return o;
}

namespace {

SpacePoint point_for(const ConfigDoc& doc, const std::string& ptr, const Space& space) {
  const double v = doc.at(ptr).get<double>();
  if (space.kind() == SpaceKind::real_line) return SpacePoint::real(v);
  if (v != std::floor(v) || !space.contains(SpacePoint::label(static_cast<int>(v)))) {
    doc.fail(ptr, "must be a label of the space");
  }
  return SpacePoint::label(static_cast<int>(v));
}

}  // namespace

JoinSpec build_join_spec(const ConfigDoc& doc, const GeneratorSet& g) {
  if (!doc.has("/glue")) doc.fail("", "missing 'glue'");
  JoinSpec js;
  for (const char* side : {"left_generator", "right_generator"}) {
    const std::string p = std::string("/glue/") + side;
    const std::string id = doc.at(p);
    if (!g.index_of(id)) doc.fail(p, fmt::format("unknown generator '{}'", id));
    (side[0] == 'l' ? js.left_generator : js.right_generator) = id;
  }
  js.u = point_for(doc, "/glue/u", g.space());
  js.v = point_for(doc, "/glue/v", g.space());
  js.anchor = doc.get_or<std::string>("/glue/anchor", "through") == "end" ? JoinAnchor::end : JoinAnchor::through;
  js.t_min = doc.get_or<Time>("/glue/t_min", js.t_min);
  js.t0 = doc.get_or<Time>("/glue/t0", js.t0);
  js.t_max = doc.get_or<Time>("/glue/t_max", js.t_max);
  if (!(js.t_min < js.t0 && js.t0 <= js.t_max)) doc.fail("/glue", "need t_min < t0 <= t_max");
  return js;
}

std::optional<NonAutoSystem> build_branch(const ConfigDoc& doc, const GeneratorSet& g) {
  if (!doc.has("/branch")) return std::nullopt;
  NonAutoSystem sys{BranchWord{doc.at("/branch/t_min").get<Time>(), build_word(doc, "/branch/word", g)}, g};
  return sys;
}

Homeomorphism build_homeomorphism(const ConfigDoc& doc, const std::string& pointer) {
  if (!doc.has(pointer)) doc.fail(pointer.substr(0, pointer.rfind('/')), fmt::format("missing '{}'", pointer.substr(pointer.rfind('/') + 1)));
  const auto& h = doc.at(pointer);
  const std::string type = h.at("type");
  if (type == "affine") {
    const double slope = h.at("slope");
    if (slope == 0.0) doc.fail(pointer + "/slope", "a homeomorphism needs a nonzero slope");
    return Affine{slope, h.value("intercept", 0.0)};
  }
  if (type == "signed_power") return SignedPower{h.at("p").get<double>(), h.value("scale", 1.0)};
  FiniteTable t{h.at("domain").get<std::vector<int>>(), h.at("images").get<std::vector<int>>()};
  if (t.domain.size() != t.images.size()) doc.fail(pointer + "/images", "needs one image per domain label");
  return t;
}

Thresholds build_thresholds(const ConfigDoc& doc) {
  Thresholds t;
  if (doc.has("/thresholds/eps")) t.eps = doc.at("/thresholds/eps").get<double>();
  if (doc.has("/thresholds/delta")) t.delta = doc.at("/thresholds/delta").get<double>();
  if (doc.has("/thresholds/k_min")) t.k_min = doc.at("/thresholds/k_min").get<std::size_t>();
  std::string model = doc.has("/perturbation/model") ? doc.at("/perturbation/model").get<std::string>() : "uniform";
  if (!t.eps && model == "uniform" && doc.has("/perturbation/eps")) t.eps = doc.at("/perturbation/eps").get<double>();
  const bool average = model == "clipped_gaussian" || model == "bernoulli";
  t.type = doc.get_or<std::string>("/thresholds/type", average ? "A" : "U") == "A" ? PerturbationType::A
                                                                                  : PerturbationType::U;
  return t;
}

}  // namespace shadowctl
