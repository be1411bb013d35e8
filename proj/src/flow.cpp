#include "rdb/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace rdb {

namespace {

// Diagonal of -lap with zero-flux walls.
ScalarField laplacian_diagonal(const Grid& g)
{
    ScalarField d(g);
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const std::array<int, 3> idx{i, j, k};
                double acc = 0.0;
                for (int axis = 0; axis < g.dim(); ++axis) {
                    const int p = idx[axis];
                    const int nb = (p > 0 ? 1 : 0) + (p < g.n(axis) - 1 ? 1 : 0);
                    acc += nb / (g.h(axis) * g.h(axis));
                }
                d.at(i, j, k) = acc;
            }
        }
    }
    return d;
}

void remove_mean(ScalarField& f)
{
    const double mean = sum(f.values()) / static_cast<double>(f.size());
    for (double& v : f.values()) {
        v -= mean;
    }
}

// r = -b + lap(x), i.e. the residual of (-lap) x = -b.
void residual(const ScalarField& b, const ScalarField& x, ScalarField& lap_x, ScalarField& r)
{
    neumann_laplacian(x, lap_x);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = lap_x[i] - b[i];
    }
}

} // namespace

void validate(const PoissonConfig& cfg)
{
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) {
        throw ValidationError("poisson.tol: must lie in (0, 1)");
    }
    if (cfg.max_iter < 1) {
        throw ValidationError("poisson.max_iter: must be >= 1");
    }
}

PoissonResult solve_poisson(const ScalarField& rhs, const PoissonConfig& cfg, const ScalarField* initial_guess)
{
    const Grid& g = rhs.grid();
    ScalarField b = rhs;
    remove_mean(b);

    PoissonResult result;
    result.solution = ScalarField(g);
    const double bnorm = max_abs(b.values());
    if (bnorm == 0.0) {
        return result;
    }
    const double target = cfg.tol * bnorm;

    ScalarField& x = result.solution;
    if (initial_guess != nullptr) {
        require_same_grid(g, initial_guess->grid(), "solve_poisson");
        x = *initial_guess;
    }

    const ScalarField diag = laplacian_diagonal(g);
    ScalarField r(g), z(g), p(g), q(g), lap(g);
    residual(b, x, lap, r);

    double rnorm = max_abs(r.values());
    int it = 0;
    bool converged = rnorm <= target;
    bool restart = true;
    double rz = 0.0;
    const std::size_t n = r.size();

    while (!converged && it < cfg.max_iter) {
        if (restart) {
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = r[i] / diag[i];
                p[i] = z[i];
            }
            rz = dot(r.values(), z.values());
            restart = false;
        }
        // q = (-lap) p
        neumann_laplacian(p, q);
        for (double& v : q.values()) {
            v = -v;
        }
        const double pq = dot(p.values(), q.values());
        if (!(pq > 0.0)) {
            break;
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        ++it;

        rnorm = max_abs(r.values());
        if (rnorm <= target) {
            // Confirm against the true residual; the recursive one drifts.
            residual(b, x, lap, r);
            rnorm = max_abs(r.values());
            converged = rnorm <= target;
            restart = true;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
        }
        const double rz_new = dot(r.values(), z.values());
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }

    result.iterations = it;
    result.residual = rnorm / bnorm;
    if (!converged) {
        throw PoissonError("solve_poisson: no convergence after " + std::to_string(it)
                + " iterations (relative residual " + std::to_string(result.residual) + ")",
            result.residual);
    }
    remove_mean(x);
    return result;
}

VectorField momentum_predict(const SimState& state, double dt, const PhysicalParams& params)
{
    const Grid& g = state.grid();
    // Only the deviation from the reference density drives flow; the uniform
    // part is a gradient and lives in the pressure.
    ScalarField rho(g), drag(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        rho[i] = density_at(state.a[i], state.b[i], state.c[i], params) - 1.0;
        drag[i] = drag_coefficient(state.c[i], params);
    }

    VectorField out(g);
    const VectorField& u = state.u;
    for (int comp = 0; comp < g.dim(); ++comp) {
        const auto e = g.face_extents(comp);
        const int dc = comp == 0, dj_c = comp == 1, dk_c = comp == 2;
#pragma omp parallel for schedule(static)
        for (int k = 0; k < e[2]; ++k) {
            for (int j = 0; j < e[1]; ++j) {
                for (int i = 0; i < e[0]; ++i) {
                    const std::array<int, 3> idx{i, j, k};
                    const int p = idx[comp];
                    if (p == 0 || p == e[comp] - 1) {
                        continue; // slip wall: normal velocity pinned to zero
                    }
                    const double uc = u.at(comp, i, j, k);
                    double lap = 0.0;
                    for (int axis = 0; axis < g.dim(); ++axis) {
                        const int di = axis == 0, dj = axis == 1, dk = axis == 2;
                        const int q = idx[axis];
                        const double inv_h2 = 1.0 / (g.h(axis) * g.h(axis));
                        const bool has_lo = q > 0;
                        const bool has_hi = q < e[axis] - 1;
                        // Tangential ghosts mirror the interior value (free slip);
                        // along the component axis the wall faces are real zeros.
                        if (has_lo && has_hi) {
                            const double hi = u.at(comp, i + di, j + dj, k + dk);
                            const double lo = u.at(comp, i - di, j - dj, k - dk);
                            lap += ((hi + lo) - 2.0 * uc) * inv_h2;
                        } else if (has_hi) {
                            lap += (u.at(comp, i + di, j + dj, k + dk) - uc) * inv_h2;
                        } else if (has_lo) {
                            lap += (u.at(comp, i - di, j - dj, k - dk) - uc) * inv_h2;
                        }
                    }
                    const double rho_f = 0.5 * (rho.at(i - dc, j - dj_c, k - dk_c) + rho.at(i, j, k));
                    const double drag_f = 0.5 * (drag.at(i - dc, j - dj_c, k - dk_c) + drag.at(i, j, k));
                    const double force = params.mu_e * lap + rho_f * params.g[comp];
                    out.at(comp, i, j, k) = (uc + dt * force) / (1.0 + dt * drag_f);
                }
            }
        }
    }
    return out;
}

Projection project(const VectorField& u_star, double dt, const PoissonConfig& cfg, const ScalarField* p_guess)
{
    if (!(dt > 0.0)) {
        throw ValidationError("project: dt must be > 0");
    }
    const Grid& g = u_star.grid();
    const ScalarField rhs = divergence(u_star);

    ScalarField guess;
    if (p_guess != nullptr) {
        guess = *p_guess;
        for (double& v : guess.values()) {
            v *= dt;
        }
    }
    auto solved = solve_poisson(rhs, cfg, p_guess != nullptr ? &guess : nullptr);

    Projection out;
    out.iterations = solved.iterations;
    out.u = u_star;
    const VectorField grad = face_gradient(solved.solution);
    for (int axis = 0; axis < g.dim(); ++axis) {
        auto& uc = out.u.comp(axis);
        const auto& gc = grad.comp(axis);
        for (std::size_t i = 0; i < uc.size(); ++i) {
            uc[i] -= gc[i];
        }
    }
    out.u.apply_slip_walls();
    out.p = std::move(solved.solution);
    for (double& v : out.p.values()) {
        v /= dt;
    }
    return out;
}

StepReport step(SimState& state, const PhysicalParams& params, const StepConfig& cfg, double dt_cap)
{
    StepReport report;
    double dt = std::min(cfl_dt(state, params, cfg.transport), dt_cap);
    if (!(dt > 0.0)) {
        throw ValidationError("step: non-positive time step");
    }

    SimState next = state;
    Projection proj;
    for (int attempt = 0;; ++attempt) {
        const VectorField u_star = momentum_predict(state, dt, params);
        proj = project(u_star, dt, cfg.poisson, &state.p);
        report.poisson_iterations += proj.iterations;
        next.u = proj.u;
        const double limit = cfl_dt(next, params, cfg.transport);
        if (dt <= limit * (1.0 + 1e-12)) {
            break;
        }
        if (attempt >= 8) {
            throw NumericalError("step: velocity keeps outrunning the stability limit");
        }
        dt = limit;
    }

    auto species = step_transport(next, dt, params, cfg.transport);
    next.p = std::move(proj.p);
    next.a = std::move(species.a);
    next.b = std::move(species.b);
    next.c = std::move(species.c);
    next.t = state.t + dt;
    next.step = state.step + 1;

    for (const ScalarField* f : {&next.a, &next.b, &next.c, &next.p}) {
        if (!all_finite(f->values())) {
            throw NumericalError("step: non-finite values produced at t=" + std::to_string(next.t));
        }
    }

    report.dt = dt;
    report.div_max = max_abs(divergence(next.u).values());
    state = std::move(next);
    return report;
}

double kinetic_energy(const VectorField& u)
{
    double e = 0.0;
    for (int axis = 0; axis < u.dim(); ++axis) {
        e += dot(u.comp(axis), u.comp(axis));
    }
    return 0.5 * e;
}

} // namespace rdb
