#include "rdb/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace rdb {

namespace {

void require(bool ok, const std::string& msg)
{
    if (!ok) {
        throw ValidationError(msg);
    }
}

// Uniform in [-1, 1) from the raw 64-bit engine output; std::mt19937_64 is
// fully specified, unlike the standard distributions.
double unit_noise(std::mt19937_64& rng)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

} // namespace

ScenarioKind parse_scenario_kind(std::string_view name)
{
    if (name == "flat") return ScenarioKind::flat;
    if (name == "ellipse") return ScenarioKind::ellipse;
    if (name == "ellipsoid") return ScenarioKind::ellipsoid;
    throw ValidationError("scenario.kind: unknown kind '" + std::string(name)
        + "' (expected flat, ellipse or ellipsoid)");
}

std::string_view to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::flat: return "flat";
    case ScenarioKind::ellipse: return "ellipse";
    case ScenarioKind::ellipsoid: return "ellipsoid";
    }
    return "?";
}

void validate(const ScenarioSpec& s)
{
    require(std::isfinite(s.alpha0) && s.alpha0 > 0.0, "scenario.alpha0: must be > 0");
    require(std::isfinite(s.beta0) && s.beta0 > 0.0, "scenario.beta0: must be > 0");
    require(std::isfinite(s.perturb_amp) && s.perturb_amp >= 0.0, "scenario.perturb_amp: must be >= 0");
    if (s.kind == ScenarioKind::flat) {
        require(std::isfinite(s.delta) && s.delta > 0.0, "scenario.delta: must be > 0");
        require(std::isfinite(s.y0), "scenario.y0: must be finite");
    } else {
        require(std::isfinite(s.x0) && s.x0 > 0.0, "scenario.x0: must be > 0");
        require(std::isfinite(s.ysemi) && s.ysemi > 0.0, "scenario.ysemi: must be > 0");
        if (s.kind == ScenarioKind::ellipsoid) {
            require(std::isfinite(s.z0) && s.z0 > 0.0, "scenario.z0: must be > 0");
        }
    }
}

InitialData flat_interface_ic(const ScenarioSpec& spec, const Grid& grid)
{
    validate(spec);
    require(spec.kind == ScenarioKind::flat, "flat_interface_ic: scenario kind must be flat");
    require(spec.y0 >= grid.lo(1) && spec.y0 <= grid.hi(1), "scenario.y0: interface lies outside the grid");

    InitialData out{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
    for (int j = 0; j < grid.n(1); ++j) {
        const double e = std::erf((grid.center(1, j) - spec.y0) / spec.delta);
        const double a = 0.5 * spec.alpha0 * (1.0 + e);
        const double b = 0.5 * spec.beta0 * (1.0 - e);
        for (int k = 0; k < grid.n(2); ++k) {
            for (int i = 0; i < grid.n(0); ++i) {
                out.a.at(i, j, k) = a;
                out.b.at(i, j, k) = b;
            }
        }
    }
    return out;
}

InitialData elliptic_blob_ic(const ScenarioSpec& spec, const Grid& grid)
{
    validate(spec);
    require(spec.kind == ScenarioKind::ellipse, "elliptic_blob_ic: scenario kind must be ellipse");
    require(grid.dim() == 2, "elliptic_blob_ic: needs a 2D grid");
    const auto& c = spec.center;
    require(c[0] - spec.x0 >= grid.lo(0) && c[0] + spec.x0 <= grid.hi(0) && c[1] - spec.ysemi >= grid.lo(1)
            && c[1] + spec.ysemi <= grid.hi(1),
        "scenario: ellipse is not contained in the grid");

    InitialData out{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
    for (int j = 0; j < grid.n(1); ++j) {
        const double dy = (grid.center(1, j) - c[1]) / spec.ysemi;
        for (int i = 0; i < grid.n(0); ++i) {
            const double dx = (grid.center(0, i) - c[0]) / spec.x0;
            const bool inside = dx * dx + dy * dy <= 1.0;
            out.a.at(i, j) = inside ? 1.0 : 0.0;
            out.b.at(i, j) = inside ? 0.0 : 1.0;
        }
    }
    return out;
}

InitialData ellipsoid_ic(const ScenarioSpec& spec, const Grid& grid)
{
    validate(spec);
    require(spec.kind == ScenarioKind::ellipsoid, "ellipsoid_ic: scenario kind must be ellipsoid");
    require(grid.dim() == 3, "ellipsoid_ic: needs a 3D grid");
    const auto& c = spec.center;
    const std::array<double, 3> semi{spec.x0, spec.ysemi, spec.z0};
    for (int axis = 0; axis < 3; ++axis) {
        require(c[axis] - semi[axis] >= grid.lo(axis) && c[axis] + semi[axis] <= grid.hi(axis),
            "scenario: ellipsoid is not contained in the grid");
    }

    InitialData out{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
    for (int k = 0; k < grid.n(2); ++k) {
        const double dz = (grid.center(2, k) - c[2]) / semi[2];
        for (int j = 0; j < grid.n(1); ++j) {
            const double dy = (grid.center(1, j) - c[1]) / semi[1];
            for (int i = 0; i < grid.n(0); ++i) {
                const double dx = (grid.center(0, i) - c[0]) / semi[0];
                const bool inside = dx * dx + dy * dy + dz * dz <= 1.0;
                out.a.at(i, j, k) = inside ? 1.0 : 0.0;
                out.b.at(i, j, k) = 1.0 - out.a.at(i, j, k);
            }
        }
    }
    return out;
}

void perturb_interface(InitialData& data, double amp, std::uint64_t seed, double alpha0, double beta0)
{
    if (amp == 0.0) {
        return;
    }
    const Grid& g = data.a.grid();
    std::vector<std::size_t> band;
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const double v = data.a.at(i, j, k);
                bool in = v > 0.0 && v < alpha0;
                const std::array<int, 3> idx{i, j, k};
                for (int axis = 0; axis < g.dim() && !in; ++axis) {
                    for (int s : {-1, 1}) {
                        auto nb = idx;
                        nb[axis] += s;
                        if (nb[axis] < 0 || nb[axis] >= g.n(axis)) {
                            continue;
                        }
                        if (data.a.at(nb[0], nb[1], nb[2]) != v) {
                            in = true;
                            break;
                        }
                    }
                }
                if (in) {
                    band.push_back(g.index(i, j, k));
                }
            }
        }
    }
    if (band.empty()) {
        return;
    }

    std::mt19937_64 rng(seed);
    std::vector<double> xi(band.size());
    double mean = 0.0;
    for (double& x : xi) {
        x = unit_noise(rng);
        mean += x;
    }
    mean /= static_cast<double>(xi.size());
    for (std::size_t n = 0; n < band.size(); ++n) {
        const double noise = amp * (xi[n] - mean);
        const std::size_t idx = band[n];
        data.a[idx] = std::clamp(data.a[idx] * (1.0 + noise), 0.0, alpha0);
        data.b[idx] = std::clamp(data.b[idx] * (1.0 - noise), 0.0, beta0);
    }
}

InitialData initial_data(const ScenarioSpec& spec, const Grid& grid)
{
    InitialData data;
    double plateau_a = spec.alpha0;
    double plateau_b = spec.beta0;
    switch (spec.kind) {
    case ScenarioKind::flat:
        data = flat_interface_ic(spec, grid);
        break;
    case ScenarioKind::ellipse:
        data = elliptic_blob_ic(spec, grid);
        plateau_a = plateau_b = 1.0;
        break;
    case ScenarioKind::ellipsoid:
        data = ellipsoid_ic(spec, grid);
        plateau_a = plateau_b = 1.0;
        break;
    }
    perturb_interface(data, spec.perturb_amp, spec.perturb_seed, plateau_a, plateau_b);
    return data;
}

SimState initial_state(const ScenarioSpec& spec, const Grid& grid)
{
    auto data = initial_data(spec, grid);
    SimState s = make_state(std::move(data.a), std::move(data.b), std::move(data.c));
    s.seed = spec.perturb_seed;
    return s;
}

} // namespace rdb
