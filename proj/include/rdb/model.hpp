#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "rdb/grid.hpp"

namespace rdb {

/// Model constants. Everything is nondimensional.
struct PhysicalParams {
    double mu = 1.0;    ///< viscosity in the Darcy drag
    double mu_e = 1.0;  ///< effective (Brinkman) viscosity
    double alpha = 0.0; ///< permeability exponent, K(c) = exp(-alpha c)
    double R_A = 0.0;
    double R_B = 0.0;
    double R_C = 0.0;
    double d_A = 1.0;
    double d_B = 1.0;
    double d_C = 1.0;
    double k = 1.0;
    /// Gravitational acceleration; the buoyancy force is (rho - 1) g,
    /// so g = (0, -1) makes denser fluid sink.
    std::array<double, 3> g{0.0, -1.0, 0.0};

    double d_max() const;
    bool equidiffusive() const { return d_A == d_B && d_B == d_C; }
};

/// Throws ValidationError naming the offending `params.*` key.
void validate(const PhysicalParams& p);

/// Initial-data bounds: 0 <= a0 <= M_A etc., and the horizon T.
struct BoundsSpec {
    double M_A = 1.0;
    double M_B = 1.0;
    double M_C = 0.0;
    double T = 1.0;
};

void validate(const BoundsSpec& b);

enum class CaseId { I, II, III, IV, V, VI };

CaseId parse_case(std::string_view id);
std::string_view to_string(CaseId id);

struct CaseOverrides {
    double R_A;
    double R_B;
    double R_C;
    double alpha;
};

/// The six density/permeability configurations of the flat-interface study.
CaseOverrides case_preset(CaseId id);
CaseOverrides case_preset(std::string_view id);
void apply(const CaseOverrides& o, PhysicalParams& p);

/// K(c) = exp(-alpha c), pointwise.
ScalarField permeability(const ScalarField& c, double alpha);

/// rho = 1 + R_A a + R_B b + R_C c, pointwise.
ScalarField density(const ScalarField& a, const ScalarField& b, const ScalarField& c, const PhysicalParams& p);

/// k a b, pointwise.
ScalarField reaction_rate(const ScalarField& a, const ScalarField& b, double k);

/// Drag coefficient mu / K(c) written as mu * exp(alpha c).
inline double drag_coefficient(double c, const PhysicalParams& p)
{
    return p.mu * std::exp(p.alpha * c);
}

inline double density_at(double a, double b, double c, const PhysicalParams& p)
{
    return 1.0 + p.R_A * a + p.R_B * b + p.R_C * c;
}

} // namespace rdb
