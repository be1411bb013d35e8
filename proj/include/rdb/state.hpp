#pragma once

#include <cstdint>

#include "rdb/grid.hpp"

namespace rdb {

/// Everything that evolves in time: the unit of stepping, checkpointing and
/// diagnostics. All fields share one grid.
struct SimState {
    double t = 0.0;
    std::uint64_t step = 0;
    std::uint64_t seed = 0; ///< perturbation seed the initial data was built with
    VectorField u;
    ScalarField p;
    ScalarField a;
    ScalarField b;
    ScalarField c;

    const Grid& grid() const { return a.grid(); }
};

/// Zero velocity/pressure state around the given concentrations.
SimState make_state(ScalarField a, ScalarField b, ScalarField c);

/// Bitwise equality of every stored number (used by determinism checks).
bool bitwise_equal(const SimState& x, const SimState& y);

} // namespace rdb
