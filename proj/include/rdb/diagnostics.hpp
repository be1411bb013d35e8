#pragma once

#include <vector>

#include "rdb/grid.hpp"
#include "rdb/model.hpp"
#include "rdb/state.hpp"

namespace rdb {

/// Thrown by front_metrics when the averaged reaction profile vanishes.
class NoFrontError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Moments of the averaged reaction profile Rbar(y) = abar(y) * bbar(y).
struct FrontMetrics {
    double t = 0.0;
    double y_f = 0.0;        ///< first moment
    double w_f = 0.0;        ///< sqrt of the second central moment
    double R_total = 0.0;    ///< integral of Rbar over y
    double R_at_front = 0.0; ///< Rbar linearly interpolated at y_f
};

struct InstabilityMetrics {
    double t = 0.0;
    double I_A = 0.0;
    double I_B = 0.0;
    double ml = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
};

struct TimeSeries {
    std::vector<double> t;
    std::vector<double> v;
};

/// Midpoint-rule moments of Rbar along y. For 3D states the average runs
/// over x and z.
FrontMetrics front_metrics(const SimState& state);

/// Sum of |grad f| times the cell measure.
double interfacial_length(const ScalarField& f);

/// Distance between the highest and lowest row centres whose averaged
/// value exceeds `threshold`; zero when no row qualifies.
double mixing_length(const ScalarField& c, double threshold = 0.01);

InstabilityMetrics instability_metrics(const SimState& state, double threshold = 0.01);

/// sup_t |m_h - m_ref| / |m_ref| over the reference samples. m_h is linearly
/// interpolated onto the reference times when the sample times differ;
/// reference samples with |m_ref| < 1e-12 are skipped.
double relative_error_series(const TimeSeries& m_h, const TimeSeries& m_ref);

/// Least squares on (ln t, ln v) for samples with t in [t_min, t_max].
PowerLawFit power_law_fit(const std::vector<double>& ts, const std::vector<double>& vs, double t_min, double t_max);

struct BoundsTolerance {
    double lower = 1e-12;
    double upper = 1e-10;
};

struct BoundsReport {
    double a_min = 0.0, a_max = 0.0;
    double b_min = 0.0, b_max = 0.0;
    double c_min = 0.0, c_max = 0.0;
    double c_cap = 0.0;              ///< M_C + k M_A M_B t
    double equidiffusive_cap = 0.0;  ///< (M_A + M_B + 2 M_C) / 2, when applicable
    bool equidiffusive = false;
    bool nonnegative = true;
    bool a_ok = true;
    bool b_ok = true;
    bool c_ok = true;
    bool c_equidiffusive_ok = true;
    bool finite = true;
    double sum_ac = 0.0;   ///< integral of a + c
    double sum_bc = 0.0;   ///< integral of b + c
    double sum_ab2c = 0.0; ///< integral of a + b + 2c

    bool all_ok() const { return finite && nonnegative && a_ok && b_ok && c_ok && c_equidiffusive_ok; }
};

BoundsReport bounds_report(const SimState& state, const BoundsSpec& bounds, const PhysicalParams& params,
    const BoundsTolerance& tol = {});

} // namespace rdb
