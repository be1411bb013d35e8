#include "rdb/state.hpp"

#include <cstring>

namespace rdb {

namespace {

bool same_bits(const std::vector<double>& x, const std::vector<double>& y)
{
    return x.size() == y.size()
        && (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
}

} // namespace

SimState make_state(ScalarField a, ScalarField b, ScalarField c)
{
    require_same_grid(a.grid(), b.grid(), "make_state");
    require_same_grid(a.grid(), c.grid(), "make_state");
    SimState s;
    s.u = VectorField(a.grid());
    s.p = ScalarField(a.grid());
    s.a = std::move(a);
    s.b = std::move(b);
    s.c = std::move(c);
    return s;
}

bool bitwise_equal(const SimState& x, const SimState& y)
{
    if (!(x.grid() == y.grid())) {
        return false;
    }
    if (std::memcmp(&x.t, &y.t, sizeof(double)) != 0 || x.step != y.step || x.seed != y.seed) {
        return false;
    }
    for (int axis = 0; axis < x.u.dim(); ++axis) {
        if (!same_bits(x.u.comp(axis), y.u.comp(axis))) {
            return false;
        }
    }
    return same_bits(x.p.data(), y.p.data()) && same_bits(x.a.data(), y.a.data())
        && same_bits(x.b.data(), y.b.data()) && same_bits(x.c.data(), y.c.data());
}

} // namespace rdb
