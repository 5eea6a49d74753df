#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace shadowctl {

inline const std::vector<std::string> kCommands{"perturb",  "glue",           "shadow",
                                                "falsify",  "transfer",       "branch-compare",
                                                "implication-matrix"};

// Exit codes. Negative verdicts are results, not errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConstruction = 3;  // oracle/engine failure; artifacts still written

struct RunRequest {
  std::string command;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

/// Runs one subcommand, writes its artifacts under req.out and prints the
/// one-line summary to `summary`. Returns the exit code.
int run_command(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary);

}  // namespace shadowctl
