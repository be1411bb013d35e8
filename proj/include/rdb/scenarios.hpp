#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "rdb/grid.hpp"
#include "rdb/state.hpp"

namespace rdb {

enum class ScenarioKind { flat, ellipse, ellipsoid };

ScenarioKind parse_scenario_kind(std::string_view name);
std::string_view to_string(ScenarioKind k);

/// Initial-data recipe. Defaults reproduce the full-scale flat interface;
/// the ellipse/ellipsoid axes default to the full-scale blob and bulb.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::flat;
    double alpha0 = 1.0; ///< plateau of a
    double beta0 = 1.0;  ///< plateau of b
    double y0 = 400.0;   ///< flat interface ordinate
    double delta = 1e-5; ///< erf thickness of the flat interface
    double x0 = 300.0;   ///< semi-axis along x
    double ysemi = 150.0;
    double z0 = 10.0;
    std::array<double, 3> center{0.0, 600.0, 15.0};
    double perturb_amp = 0.0;
    std::uint64_t perturb_seed = 0;
};

void validate(const ScenarioSpec& s);

struct InitialData {
    ScalarField a;
    ScalarField b;
    ScalarField c;
};

/// a0 = (alpha0/2)(1 + erf((y - y0)/delta)), b0 = (beta0/2)(1 - erf(...)), c0 = 0.
InitialData flat_interface_ic(const ScenarioSpec& spec, const Grid& grid);

/// a0 = 1, b0 = 0 inside the closed ellipse around `center`; a0 = 0, b0 = 1 outside.
InitialData elliptic_blob_ic(const ScenarioSpec& spec, const Grid& grid);

/// 3D counterpart of the blob; b0 is taken as 1 - a0.
InitialData ellipsoid_ic(const ScenarioSpec& spec, const Grid& grid);

/// Dispatches on spec.kind and applies the seeded interface perturbation.
InitialData initial_data(const ScenarioSpec& spec, const Grid& grid);

/// Zero-mean multiplicative noise of amplitude `amp` on cells of the
/// interface band: cells where a is strictly between 0 and its plateau, or
/// that have a face neighbour with a different value. a is scaled by
/// (1 + amp xi), b by (1 - amp xi), and both are clipped to their plateaus.
void perturb_interface(InitialData& data, double amp, std::uint64_t seed, double alpha0, double beta0);

SimState initial_state(const ScenarioSpec& spec, const Grid& grid);

} // namespace rdb
