#include "rdb/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace rdb {

namespace {

constexpr double kNegativeTolerance = 1e-12;

// Largest total outflow fraction per sub-step for which the update is a
// convex combination of old values.
double outflow_bound(Limiter l)
{
    return l == Limiter::upwind1 ? 1.0 : 0.5;
}

double minmod(double x, double y)
{
    if (x * y <= 0.0) {
        return 0.0;
    }
    return std::abs(x) < std::abs(y) ? x : y;
}

double max_cell_outflow(const VectorField& u)
{
    const Grid& g = u.grid();
    double worst = 0.0;
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                double out = 0.0;
                for (int axis = 0; axis < g.dim(); ++axis) {
                    const int di = axis == 0, dj = axis == 1, dk = axis == 2;
                    const double hi = u.at(axis, i + di, j + dj, k + dk);
                    const double lo = u.at(axis, i, j, k);
                    out += (std::max(hi, 0.0) + std::max(-lo, 0.0)) / g.h(axis);
                }
                worst = std::max(worst, out);
            }
        }
    }
    return worst;
}

// Face flux u * f_face along `axis`; boundary faces carry no flux.
void face_fluxes(const ScalarField& f, const VectorField& u, int axis, Limiter limiter, std::vector<double>& flux)
{
    const Grid& g = f.grid();
    const auto e = g.face_extents(axis);
    const int n = g.n(axis);
    const int di = axis == 0, dj = axis == 1, dk = axis == 2;
    flux.assign(g.face_count(axis), 0.0);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < e[2]; ++k) {
        for (int j = 0; j < e[1]; ++j) {
            for (int i = 0; i < e[0]; ++i) {
                const int p = axis == 0 ? i : axis == 1 ? j : k;
                if (p == 0 || p == n) {
                    continue;
                }
                const double vel = u.at(axis, i, j, k);
                if (vel == 0.0) {
                    continue;
                }
                // Cells on either side of the face: L = p-1, R = p.
                const double fl = f.at(i - di, j - dj, k - dk);
                const double fr = f.at(i, j, k);
                double face;
                if (vel > 0.0) {
                    face = fl;
                    if (limiter == Limiter::muscl_minmod && p - 2 >= 0) {
                        const double fll = f.at(i - 2 * di, j - 2 * dj, k - 2 * dk);
                        face = fl + 0.5 * minmod(fl - fll, fr - fl);
                    }
                } else {
                    face = fr;
                    if (limiter == Limiter::muscl_minmod && p + 1 <= n - 1) {
                        const double frr = f.at(i + di, j + dj, k + dk);
                        face = fr - 0.5 * minmod(fr - fl, frr - fr);
                    }
                }
                flux[g.face_index(axis, i, j, k)] = vel * face;
            }
        }
    }
}

void advect(ScalarField& f, const VectorField& u, double dt, Limiter limiter,
    std::array<std::vector<double>, 3>& flux)
{
    const Grid& g = f.grid();
    for (int axis = 0; axis < g.dim(); ++axis) {
        face_fluxes(f, u, axis, limiter, flux[axis]);
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                double net = 0.0;
                for (int axis = 0; axis < g.dim(); ++axis) {
                    const int di = axis == 0, dj = axis == 1, dk = axis == 2;
                    const double hi = flux[axis][g.face_index(axis, i + di, j + dj, k + dk)];
                    const double lo = flux[axis][g.face_index(axis, i, j, k)];
                    net += (hi - lo) / g.h(axis);
                }
                f.at(i, j, k) -= dt * net;
            }
        }
    }
}

void diffuse(ScalarField& f, double d, double dt, ScalarField& scratch)
{
    neumann_laplacian(f, scratch);
    const double coef = dt * d;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] += coef * scratch[i];
    }
}

void require_nonnegative(const ScalarField& f, const char* name)
{
    const double m = min_value(f.values());
    if (!(m >= -kNegativeTolerance)) {
        throw ValidationError(std::string("step_transport: species ") + name
            + " has negative or non-finite values (min " + std::to_string(m) + ")");
    }
}

} // namespace

Limiter parse_limiter(std::string_view name)
{
    if (name == "upwind1") return Limiter::upwind1;
    if (name == "muscl-minmod") return Limiter::muscl_minmod;
    throw ValidationError("transport.limiter: unknown limiter '" + std::string(name)
        + "' (expected upwind1 or muscl-minmod)");
}

std::string_view to_string(Limiter l)
{
    return l == Limiter::upwind1 ? "upwind1" : "muscl-minmod";
}

void validate(const TransportConfig& cfg)
{
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) {
        throw ValidationError("transport.cfl_safety: must lie in (0, 1]");
    }
    if (!(cfg.dt_max > 0.0) || !std::isfinite(cfg.dt_max)) {
        throw ValidationError("transport.dt_max: must be finite and > 0");
    }
}

StabilityLimits stability_limits(const SimState& state, const PhysicalParams& params)
{
    const Grid& g = state.grid();
    constexpr double inf = std::numeric_limits<double>::infinity();
    StabilityLimits lim{inf, inf, inf, inf};

    for (int axis = 0; axis < g.dim(); ++axis) {
        const double umax = max_abs(std::span<const double>(state.u.comp(axis)));
        if (umax > 0.0) {
            lim.advective = std::min(lim.advective, g.h(axis) / umax);
        }
    }
    double inv_h2 = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
        inv_h2 += 1.0 / (g.h(axis) * g.h(axis));
    }
    lim.diffusive = 1.0 / (2.0 * params.d_max() * inv_h2);
    lim.viscous = 1.0 / (2.0 * params.mu_e * inv_h2);
    const double amax = max_value(state.a.values());
    const double bmax = max_value(state.b.values());
    const double rate = params.k * std::max({amax, bmax, 0.0});
    lim.kinetic = 1.0 / (rate + 1e-300);
    return lim;
}

double cfl_dt(const SimState& state, const PhysicalParams& params, const TransportConfig& cfg)
{
    const auto lim = stability_limits(state, params);
    const double dt = cfg.cfl_safety * std::min({lim.advective, lim.diffusive, lim.viscous, lim.kinetic});
    if (!std::isfinite(dt)) {
        return cfg.dt_max;
    }
    return std::min(dt, cfg.dt_max);
}

int advection_substeps(const VectorField& u, double dt, Limiter limiter)
{
    const double frac = dt * max_cell_outflow(u) / outflow_bound(limiter);
    if (!(frac > 1.0)) {
        return 1;
    }
    return static_cast<int>(std::ceil(frac));
}

Concentrations step_transport(const SimState& state, double dt, const PhysicalParams& params,
    const TransportConfig& cfg)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("step_transport: dt must be finite and > 0");
    }
    const double limit = cfl_dt(state, params, cfg);
    if (dt > limit * (1.0 + 1e-12)) {
        throw ValidationError("step_transport: dt " + std::to_string(dt) + " exceeds stability limit "
            + std::to_string(limit));
    }
    require_nonnegative(state.a, "a");
    require_nonnegative(state.b, "b");
    require_nonnegative(state.c, "c");

    Concentrations out{state.a, state.b, state.c};
    const Grid& g = state.grid();

    bool moving = false;
    for (int axis = 0; axis < g.dim(); ++axis) {
        moving = moving || max_abs(std::span<const double>(state.u.comp(axis))) > 0.0;
    }
    if (moving) {
        const int nsub = advection_substeps(state.u, dt, cfg.limiter);
        const double dts = dt / nsub;
        std::array<std::vector<double>, 3> flux;
        for (int s = 0; s < nsub; ++s) {
            advect(out.a, state.u, dts, cfg.limiter, flux);
            advect(out.b, state.u, dts, cfg.limiter, flux);
            advect(out.c, state.u, dts, cfg.limiter, flux);
        }
    }

    ScalarField scratch(g);
    diffuse(out.a, params.d_A, dt, scratch);
    diffuse(out.b, params.d_B, dt, scratch);
    diffuse(out.c, params.d_C, dt, scratch);

    const double kdt = params.k * dt;
    if (kdt > 0.0) {
        for (std::size_t i = 0; i < out.a.size(); ++i) {
            const double r = kdt * (out.a[i] * out.b[i]);
            out.a[i] -= r;
            out.b[i] -= r;
            out.c[i] += r;
        }
    }
    return out;
}

} // namespace rdb
