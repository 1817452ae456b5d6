#pragma once

// Orchestration: config in, report out.

#include <string>

#include "sepstab/report.hpp"

namespace sepstab {

// Desk-scale cap, overridable via SEPSTAB_DIM_CAP.
int dim_cap_from_env();

// Executes the configured mode. base_dir resolves relative kraus files.
Report run(const ExperimentConfig& cfg, const std::string& base_dir = ".");

} // namespace sepstab
