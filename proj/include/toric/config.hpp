#pragma once

#include "toric/evolve.hpp"
#include "toric/hamiltonian.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace toric {

struct MeasureOptions {
    std::vector<std::string> list; // subset of {overlap, s_topo, fidelity, block_entropy}
    Region block_region = {0};
    std::optional<Region> fidelity_region; // unset = built-in default for the lattice
    SectorLabel sector_a{0, 0}, sector_b{1, 0};
    double tavg_window_min = 1.0;      // S_topo averages over (this, t_max]
    double recurrence_threshold = 0.999;
};

struct ExperimentConfig {
    std::string name = "run";
    std::vector<std::pair<int, int>> lattices;
    std::vector<QuenchSpec> quenches; // one per [quench] section, all sharing a name
    TimeGrid grid;
    MeasureOptions measures;
    KrylovOptions krylov;
    int threads = 1;
    std::string output_dir; // empty: resolved from the environment at run time
};

// Parse and validate `key = value` sections.  Collects one message per
// problem; the returned config is only meaningful when errors stays empty.
ExperimentConfig parse_config(std::istream& in, std::vector<std::string>& errors);

// Throws ConfigError carrying all messages, or SizeLimitError when the only
// problem is a lattice beyond the spin cap.
ExperimentConfig load_config_file(const std::string& path);

ExperimentConfig preset_config(const std::string& which); // fig1 | fig2 | fig3

// Fully-resolved listing, echoed into the summary for reproducibility.
std::string echo_config(const ExperimentConfig& cfg);

// Precedence: CLI --out, config output_dir, $TORIC_QUENCH_OUT/<name>, out/<name>.
std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& cli_out);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace toric
