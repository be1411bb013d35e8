#pragma once

#include <filesystem>
#include <vector>

#include "rdb/config.hpp"
#include "rdb/diagnostics.hpp"

namespace rdb {

struct LadderEntry {
    double h = 0.0;
    std::array<int, 3> n{};
    double E_A = 0.0;
    double E_B = 0.0;
    double E_ml = 0.0;
    double runtime_s = 0.0;
    TimeSeries I_A, I_B, ml;
};

/// Grid extents for spacing h on the config's domain; every axis length
/// must be an integer multiple of h.
GridSpec ladder_grid(const GridSpec& base, double h);

/// Runs the config at every ladder spacing (cfg.ladder is required) and
/// measures sup-in-time relative errors of I_A, I_B and ml against the
/// finest entry, over samples with t >= ladder.t_min. Ordered like the ladder.
std::vector<LadderEntry> run_ladder(const RunConfig& cfg);

void write_convergence_csv(const std::filesystem::path& path, const std::vector<LadderEntry>& entries);

} // namespace rdb
