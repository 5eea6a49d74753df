#pragma once

// Experiment config: JSON text checked against the shipped schema, with every
// error reported as "file:LINE: /pointer: message".

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowing/gluing.hpp"
#include "shadowing/nonauto.hpp"
#include "shadowing/parallel_gluing.hpp"
#include "shadowing/perturb.hpp"
#include "shadowing/transfer.hpp"

namespace shadowctl {

using namespace shadowing;
using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed config plus the source line of every JSON pointer.
class ConfigDoc {
 public:
  /// Throws ConfigError on unreadable files, syntax errors and schema violations.
  static ConfigDoc load(const std::string& path);
  static ConfigDoc parse(const std::string& text, const std::string& name);

  const Json& root() const { return root_; }
  bool has(const std::string& pointer) const;
  const Json& at(const std::string& pointer) const;
  int line_of(std::string pointer) const;

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;

  template <class T>
  T get_or(const std::string& pointer, T fallback) const {
    return has(pointer) ? at(pointer).get<T>() : fallback;
  }

 private:
  std::string name_;
  Json root_;
  std::map<std::string, int> lines_;
};

/// The embedded schema text (schemas/experiment.schema.json).
const std::string& experiment_schema();

Space build_space(const ConfigDoc& doc);
/// Generators under `pointer` (an array of {id, map}).
GeneratorSet build_generators(const ConfigDoc& doc, const std::string& pointer, const Space& space);
/// Expands run-length entries; every id must resolve in `g`.
std::vector<GeneratorId> build_word(const ConfigDoc& doc, const std::string& pointer, const GeneratorSet& g);
RateFunction build_rate(const ConfigDoc& doc);

struct Window {
  Time t_min = 0;
  Time t_max = 0;
};
Window build_window(const ConfigDoc& doc);

PerturbSpec build_perturb_spec(const ConfigDoc& doc, const GeneratorSet& g);
GluingOracle build_oracle(const ConfigDoc& doc, const GeneratorSet& g);
JoinSpec build_join_spec(const ConfigDoc& doc, const GeneratorSet& g);
std::optional<NonAutoSystem> build_branch(const ConfigDoc& doc, const GeneratorSet& g);
Homeomorphism build_homeomorphism(const ConfigDoc& doc, const std::string& pointer);

struct Thresholds {
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::size_t> k_min;
  PerturbationType type = PerturbationType::U;
};
Thresholds build_thresholds(const ConfigDoc& doc);

}  // namespace shadowctl
