#pragma once

#include <ostream>

#include "commands.hpp"
#include "config.hpp"

namespace shadowctl {

/// Evidence grid over the seven shadowing classes for the registered systems.
int cmd_implication_matrix(const ConfigDoc& doc, const RunRequest& req, std::ostream& summary);

}  // namespace shadowctl
