#pragma once

#include <string_view>

#include "rdb/model.hpp"
#include "rdb/state.hpp"

namespace rdb {

enum class Limiter { upwind1, muscl_minmod };

Limiter parse_limiter(std::string_view name);
std::string_view to_string(Limiter l);

struct TransportConfig {
    Limiter limiter = Limiter::muscl_minmod;
    double cfl_safety = 0.5;
    double dt_max = 1.0;
};

void validate(const TransportConfig& cfg);

/// Individual explicit stability limits (before the safety factor).
struct StabilityLimits {
    double advective;
    double diffusive;
    double viscous;
    double kinetic;
};

StabilityLimits stability_limits(const SimState& state, const PhysicalParams& params);

/// cfl_safety * min(limits), capped at cfg.dt_max.
double cfl_dt(const SimState& state, const PhysicalParams& params, const TransportConfig& cfg);

struct Concentrations {
    ScalarField a;
    ScalarField b;
    ScalarField c;
};

/// Advances a, b, c by dt with the face velocity in `state.u`:
/// conservative advection, explicit diffusion with zero-flux walls, then
/// the explicit A + B -> C update. Advection is sub-cycled internally when
/// the cell outflow fraction would exceed the limiter's positivity bound.
Concentrations step_transport(const SimState& state, double dt, const PhysicalParams& params,
    const TransportConfig& cfg);

/// Number of advection sub-steps step_transport will take for this dt.
int advection_substeps(const VectorField& u, double dt, Limiter limiter);

} // namespace rdb
