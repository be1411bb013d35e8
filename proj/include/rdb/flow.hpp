#pragma once

#include <limits>

#include "rdb/model.hpp"
#include "rdb/state.hpp"
#include "rdb/transport.hpp"

namespace rdb {

struct PoissonConfig {
    /// Stop when max|residual| <= tol * max|rhs|.
    double tol = 1e-10;
    int max_iter = 20000;
};

void validate(const PoissonConfig& cfg);

class PoissonError : public NumericalError {
public:
    PoissonError(const std::string& what, double residual)
        : NumericalError(what)
        , residual_(residual)
    {
    }
    double residual() const { return residual_; }

private:
    double residual_;
};

struct PoissonResult {
    ScalarField solution; ///< zero-mean
    int iterations = 0;
    double residual = 0.0; ///< final relative residual (max-norm)
};

/// Solves lap(x) = rhs with zero-flux walls by Jacobi-preconditioned
/// conjugate gradients. The rhs is projected onto zero mean first (the
/// pure-Neumann problem is only solvable for such data).
PoissonResult solve_poisson(const ScalarField& rhs, const PoissonConfig& cfg,
    const ScalarField* initial_guess = nullptr);

/// Tentative face velocity: buoyancy and explicit viscosity, drag taken
/// pointwise-implicitly. The pressure gradient is left to `project`.
VectorField momentum_predict(const SimState& state, double dt, const PhysicalParams& params);

struct Projection {
    VectorField u;
    ScalarField p;
    int iterations = 0;
};

/// Removes the gradient part of u_star: lap(phi) = div(u_star),
/// u = u_star - grad(phi), p = phi / dt.
Projection project(const VectorField& u_star, double dt, const PoissonConfig& cfg,
    const ScalarField* p_guess = nullptr);

struct StepConfig {
    TransportConfig transport;
    PoissonConfig poisson;
};

struct StepReport {
    double dt = 0.0;
    int poisson_iterations = 0;
    double div_max = 0.0;
};

/// One coupled step: predict, project, then transport with the new
/// velocity. dt = cfl_dt (re-evaluated against the projected velocity)
/// and never larger than dt_cap.
StepReport step(SimState& state, const PhysicalParams& params, const StepConfig& cfg,
    double dt_cap = std::numeric_limits<double>::infinity());

double kinetic_energy(const VectorField& u);

} // namespace rdb
