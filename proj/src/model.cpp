#include "rdb/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rdb {

namespace {

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) {
        throw ValidationError(key + ": " + what);
    }
}

} // namespace

double PhysicalParams::d_max() const
{
    return std::max({d_A, d_B, d_C});
}

void validate(const PhysicalParams& p)
{
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(p.mu) && p.mu > 0.0, "params.mu", "must be > 0");
    require(finite(p.mu_e) && p.mu_e > 0.0, "params.mu_e", "must be > 0");
    require(finite(p.alpha) && p.alpha >= 0.0, "params.alpha", "must be >= 0");
    require(finite(p.R_A), "params.R_A", "must be finite");
    require(finite(p.R_B), "params.R_B", "must be finite");
    require(finite(p.R_C), "params.R_C", "must be finite");
    require(finite(p.d_A) && p.d_A > 0.0, "params.d_A", "must be > 0");
    require(finite(p.d_B) && p.d_B > 0.0, "params.d_B", "must be > 0");
    require(finite(p.d_C) && p.d_C > 0.0, "params.d_C", "must be > 0");
    require(finite(p.k) && p.k >= 0.0, "params.k", "must be >= 0");
    for (double gk : p.g) {
        require(finite(gk), "params.g", "components must be finite");
    }
}

void validate(const BoundsSpec& b)
{
    require(std::isfinite(b.M_A) && b.M_A >= 0.0, "bounds.M_A", "must be >= 0");
    require(std::isfinite(b.M_B) && b.M_B >= 0.0, "bounds.M_B", "must be >= 0");
    require(std::isfinite(b.M_C) && b.M_C >= 0.0, "bounds.M_C", "must be >= 0");
    require(std::isfinite(b.T) && b.T > 0.0, "bounds.T", "must be > 0");
}

CaseId parse_case(std::string_view id)
{
    if (id == "I") return CaseId::I;
    if (id == "II") return CaseId::II;
    if (id == "III") return CaseId::III;
    if (id == "IV") return CaseId::IV;
    if (id == "V") return CaseId::V;
    if (id == "VI") return CaseId::VI;
    throw ValidationError("params.case: unknown case '" + std::string(id) + "' (expected I..VI)");
}

std::string_view to_string(CaseId id)
{
    switch (id) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
    case CaseId::V: return "V";
    case CaseId::VI: return "VI";
    }
    return "?";
}

CaseOverrides case_preset(CaseId id)
{
    switch (id) {
    case CaseId::I: return {2.0, 0.0, 0.0, 0.0};
    case CaseId::II: return {0.0, 0.0, 0.0, 4.0};
    case CaseId::III: return {2.0, 0.0, 0.0, 2.0};
    case CaseId::IV: return {1.0, 0.0, 0.0, 4.0};
    case CaseId::V: return {0.0, 0.0, 2.0, 0.0};
    case CaseId::VI: return {0.0, 0.0, 2.0, 2.0};
    }
    throw ValidationError("params.case: invalid case id");
}

CaseOverrides case_preset(std::string_view id)
{
    return case_preset(parse_case(id));
}

void apply(const CaseOverrides& o, PhysicalParams& p)
{
    p.R_A = o.R_A;
    p.R_B = o.R_B;
    p.R_C = o.R_C;
    p.alpha = o.alpha;
}

ScalarField permeability(const ScalarField& c, double alpha)
{
    ScalarField out(c.grid());
    for (std::size_t i = 0; i < c.size(); ++i) {
        out[i] = std::exp(-alpha * c[i]);
    }
    return out;
}

ScalarField density(const ScalarField& a, const ScalarField& b, const ScalarField& c, const PhysicalParams& p)
{
    require_same_grid(a.grid(), b.grid(), "density");
    require_same_grid(a.grid(), c.grid(), "density");
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = density_at(a[i], b[i], c[i], p);
    }
    return out;
}

ScalarField reaction_rate(const ScalarField& a, const ScalarField& b, double k)
{
    require_same_grid(a.grid(), b.grid(), "reaction_rate");
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = k * (a[i] * b[i]);
    }
    return out;
}

} // namespace rdb
