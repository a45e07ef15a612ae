#pragma once

#include "toric/config.hpp"

#include <iosfwd>
#include <string>

namespace toric {

// Runs every (measure, lattice) job of the configuration, appending one row
// per time sample and quench variant to <measure>_<m>x<n>.csv under out_dir,
// then writes summary.txt with the echoed config and per-series statistics.
// Failures map to the process exit code: 0 ok, 2 bad configuration,
// 3 convergence failure, 4 beyond the size cap.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log);

} // namespace toric
