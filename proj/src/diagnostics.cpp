#include "rdb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rdb {

namespace {

Profile profile_along_y(const ScalarField& f)
{
    return f.grid().dim() == 3 ? x_average(f, 1) : x_average(f);
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x)
{
    if (x <= xs.front()) {
        return ys.front();
    }
    if (x >= xs.back()) {
        return ys.back();
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return (1.0 - w) * ys[lo] + w * ys[hi];
}

} // namespace

FrontMetrics front_metrics(const SimState& state)
{
    const Profile a = profile_along_y(state.a);
    const Profile b = profile_along_y(state.b);
    const double dy = state.grid().h(1);

    std::vector<double> rbar(a.value.size());
    double m0 = 0.0;
    double m1 = 0.0;
    for (std::size_t j = 0; j < rbar.size(); ++j) {
        rbar[j] = a.value[j] * b.value[j];
        m0 += rbar[j] * dy;
        m1 += a.coord[j] * rbar[j] * dy;
    }
    if (!(m0 > 0.0)) {
        throw NoFrontError("front_metrics: averaged reaction profile is identically zero (no front)");
    }

    FrontMetrics fm;
    fm.t = state.t;
    fm.y_f = m1 / m0;
    double m2 = 0.0;
    for (std::size_t j = 0; j < rbar.size(); ++j) {
        const double d = a.coord[j] - fm.y_f;
        m2 += d * d * rbar[j] * dy;
    }
    fm.w_f = std::sqrt(std::max(0.0, m2 / m0));
    fm.R_total = m0;
    fm.R_at_front = interpolate(a.coord, rbar, fm.y_f);
    return fm;
}

double interfacial_length(const ScalarField& f)
{
    return integral(gradient_magnitude(f));
}

double mixing_length(const ScalarField& c, double threshold)
{
    const Profile cbar = profile_along_y(c);
    double lower = std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cbar.value.size(); ++j) {
        if (cbar.value[j] > threshold) {
            lower = std::min(lower, cbar.coord[j]);
            upper = std::max(upper, cbar.coord[j]);
        }
    }
    return upper >= lower ? upper - lower : 0.0;
}

InstabilityMetrics instability_metrics(const SimState& state, double threshold)
{
    InstabilityMetrics m;
    m.t = state.t;
    m.I_A = interfacial_length(state.a);
    m.I_B = interfacial_length(state.b);
    m.ml = mixing_length(state.c, threshold);
    return m;
}

double relative_error_series(const TimeSeries& m_h, const TimeSeries& m_ref)
{
    if (m_h.t.size() != m_h.v.size() || m_ref.t.size() != m_ref.v.size()) {
        throw ValidationError("relative_error_series: time and value arrays differ in length");
    }
    if (m_h.t.empty() || m_ref.t.empty()) {
        throw ValidationError("relative_error_series: empty series");
    }
    const bool same_times = m_h.t == m_ref.t;
    const double t_lo = m_h.t.front();
    const double t_hi = m_h.t.back();
    const double slack = 1e-12 * std::max(1.0, std::abs(t_hi));

    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t n = 0; n < m_ref.t.size(); ++n) {
        const double t = m_ref.t[n];
        if (!same_times && (t < t_lo - slack || t > t_hi + slack)) {
            continue;
        }
        ++used;
        const double ref = m_ref.v[n];
        if (std::abs(ref) < 1e-12) {
            continue;
        }
        const double val = same_times ? m_h.v[n] : interpolate(m_h.t, m_h.v, t);
        worst = std::max(worst, std::abs(val - ref) / std::abs(ref));
    }
    if (used == 0) {
        throw ValidationError("relative_error_series: series do not overlap in time");
    }
    return worst;
}

PowerLawFit power_law_fit(const std::vector<double>& ts, const std::vector<double>& vs, double t_min, double t_max)
{
    if (ts.size() != vs.size()) {
        throw ValidationError("power_law_fit: time and value arrays differ in length");
    }
    if (!(t_min < t_max)) {
        throw ValidationError("power_law_fit: window needs t_min < t_max");
    }
    std::vector<double> x, y;
    for (std::size_t n = 0; n < ts.size(); ++n) {
        if (ts[n] < t_min || ts[n] > t_max) {
            continue;
        }
        if (!(ts[n] > 0.0) || !(vs[n] > 0.0)) {
            throw ValidationError("power_law_fit: data must be positive inside the window");
        }
        x.push_back(std::log(ts[n]));
        y.push_back(std::log(vs[n]));
    }
    if (x.size() < 3) {
        throw ValidationError("power_law_fit: need at least 3 samples inside the window");
    }

    const double n = static_cast<double>(x.size());
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    if (!(sxx > 0.0)) {
        throw ValidationError("power_law_fit: window samples share a single time");
    }

    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = ym - fit.exponent * xm;
    fit.prefactor = std::exp(intercept);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + fit.exponent * x[i]);
        ss_res += r * r;
    }
    // A perfect fit of constant data has syy == 0; call that r^2 = 1.
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.t_min = t_min;
    fit.t_max = t_max;
    return fit;
}

BoundsReport bounds_report(const SimState& state, const BoundsSpec& bounds, const PhysicalParams& params,
    const BoundsTolerance& tol)
{
    BoundsReport r;
    r.finite = all_finite(state.a.values()) && all_finite(state.b.values()) && all_finite(state.c.values());
    r.a_min = min_value(state.a.values());
    r.a_max = max_value(state.a.values());
    r.b_min = min_value(state.b.values());
    r.b_max = max_value(state.b.values());
    r.c_min = min_value(state.c.values());
    r.c_max = max_value(state.c.values());

    r.c_cap = bounds.M_C + params.k * bounds.M_A * bounds.M_B * state.t;
    r.equidiffusive = params.equidiffusive();
    r.equidiffusive_cap = 0.5 * (bounds.M_A + bounds.M_B + 2.0 * bounds.M_C);

    r.nonnegative = r.a_min >= -tol.lower && r.b_min >= -tol.lower && r.c_min >= -tol.lower;
    r.a_ok = r.a_max <= bounds.M_A + tol.upper;
    r.b_ok = r.b_max <= bounds.M_B + tol.upper;
    r.c_ok = r.c_max <= r.c_cap + tol.upper;
    r.c_equidiffusive_ok = !r.equidiffusive || r.c_max <= r.equidiffusive_cap + tol.upper;

    const double vol = state.grid().cell_volume();
    const auto a = state.a.values();
    const auto b = state.b.values();
    const auto c = state.c.values();
    std::vector<double> ac(a.size()), bc(a.size()), ab2c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ac[i] = a[i] + c[i];
        bc[i] = b[i] + c[i];
        ab2c[i] = (a[i] + b[i]) + 2.0 * c[i];
    }
    r.sum_ac = sum(ac) * vol;
    r.sum_bc = sum(bc) * vol;
    r.sum_ab2c = sum(ab2c) * vol;
    return r;
}

} // namespace rdb
