#pragma once

#include <random>

#include "rdb/grid.hpp"
#include "rdb/state.hpp"

namespace rdb::testing {

inline Grid grid2(int nx, int ny, double x0 = 0.0, double x1 = 1.0, double y0 = 0.0, double y1 = 1.0)
{
    GridSpec s;
    s.dim = 2;
    s.lo = {x0, y0, 0.0};
    s.hi = {x1, y1, 1.0};
    s.n = {nx, ny, 1};
    return build_grid(s);
}

inline Grid grid3(int nx, int ny, int nz, double len = 1.0)
{
    GridSpec s;
    s.dim = 3;
    s.lo = {0.0, 0.0, 0.0};
    s.hi = {len, len, len};
    s.n = {nx, ny, nz};
    return build_grid(s);
}

inline ScalarField random_field(const Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    ScalarField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
    return f;
}

inline VectorField random_velocity(const Grid& g, std::uint64_t seed, double amp = 1.0)
{
    std::mt19937_64 rng(seed);
    VectorField u(g);
    for (int axis = 0; axis < g.dim(); ++axis) {
        for (double& v : u.comp(axis)) {
            v = amp * (2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0);
        }
    }
    u.apply_slip_walls();
    return u;
}

template <class F>
ScalarField sample(const Grid& g, F&& f)
{
    ScalarField out(g);
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                out.at(i, j, k) = f(g.center(0, i), g.center(1, j), g.dim() == 3 ? g.center(2, k) : 0.0);
            }
        }
    }
    return out;
}

} // namespace rdb::testing
