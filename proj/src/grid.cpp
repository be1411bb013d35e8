#include "rdb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rdb {

namespace {

constexpr std::size_t kBlock = 1024;

std::array<int, 3> offset(int axis)
{
    std::array<int, 3> o{0, 0, 0};
    o[axis] = 1;
    return o;
}

template <typename BlockFn>
double blocked_sum(std::size_t n, BlockFn&& block)
{
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const std::size_t first = static_cast<std::size_t>(b) * kBlock;
        const std::size_t last = std::min(n, first + kBlock);
        partial[static_cast<std::size_t>(b)] = block(first, last);
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

} // namespace

Grid::Grid(const GridSpec& spec)
    : spec_(spec)
{
    if (spec_.dim == 2) {
        spec_.n[2] = 1;
        spec_.lo[2] = 0.0;
        spec_.hi[2] = 1.0;
    }
    cells_ = 1;
    for (int k = 0; k < 3; ++k) {
        h_[k] = (spec_.hi[k] - spec_.lo[k]) / spec_.n[k];
        mid_[k] = 0.5 * (spec_.lo[k] + spec_.hi[k]);
        cells_ *= static_cast<std::size_t>(spec_.n[k]);
    }
}

std::size_t Grid::face_count(int comp) const
{
    const auto e = face_extents(comp);
    return static_cast<std::size_t>(e[0]) * static_cast<std::size_t>(e[1]) * static_cast<std::size_t>(e[2]);
}

Grid build_grid(const GridSpec& spec)
{
    if (spec.dim != 2 && spec.dim != 3) {
        throw ValidationError("grid.dim: must be 2 or 3, got " + std::to_string(spec.dim));
    }
    static constexpr const char* axis_name[] = {"x", "y", "z"};
    for (int k = 0; k < spec.dim; ++k) {
        const std::string key = std::string("grid[") + axis_name[k] + "]";
        if (!std::isfinite(spec.lo[k]) || !std::isfinite(spec.hi[k]) || !(spec.hi[k] > spec.lo[k])) {
            throw ValidationError(key + ": extent must satisfy hi > lo (lo=" + std::to_string(spec.lo[k])
                + ", hi=" + std::to_string(spec.hi[k]) + ")");
        }
        if (spec.n[k] < 4) {
            throw ValidationError(key + ": need at least 4 cells per axis, got " + std::to_string(spec.n[k]));
        }
        const double h = (spec.hi[k] - spec.lo[k]) / spec.n[k];
        if (!std::isfinite(h) || !(h > 0.0)) {
            throw ValidationError(key + ": spacing is not finite and positive");
        }
    }
    return Grid(spec);
}

void ScalarField::fill(double v)
{
    std::fill(values_.begin(), values_.end(), v);
}

VectorField::VectorField(const Grid& grid)
    : grid_(grid)
{
    for (int k = 0; k < grid.dim(); ++k) {
        comps_[k].assign(grid.face_count(k), 0.0);
    }
}

void VectorField::apply_slip_walls()
{
    for (int axis = 0; axis < dim(); ++axis) {
        const auto e = grid_.face_extents(axis);
        for (int k = 0; k < e[2]; ++k) {
            for (int j = 0; j < e[1]; ++j) {
                for (int i = 0; i < e[0]; ++i) {
                    const int along = axis == 0 ? i : axis == 1 ? j : k;
                    if (along == 0 || along == e[axis] - 1) {
                        at(axis, i, j, k) = 0.0;
                    }
                }
            }
        }
    }
}

void VectorField::scale(double s)
{
    for (int axis = 0; axis < dim(); ++axis) {
        for (double& v : comps_[axis]) {
            v *= s;
        }
    }
}

void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!(a == b)) {
        throw ValidationError(std::string(what) + ": fields live on different grids");
    }
}

Profile x_average(const ScalarField& f, std::optional<int> profile_axis)
{
    const Grid& g = f.grid();
    int axis = 1;
    if (profile_axis) {
        axis = *profile_axis;
        if (axis < 0 || axis >= g.dim()) {
            throw ValidationError("x_average: profile axis out of range");
        }
    } else if (g.dim() == 3) {
        throw ValidationError("x_average: 3D field needs an explicit profile axis");
    }

    const int m = g.n(axis);
    Profile out;
    out.coord.resize(static_cast<std::size_t>(m));
    out.value.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<double> count(static_cast<std::size_t>(m), 0.0);
    for (int r = 0; r < m; ++r) {
        out.coord[static_cast<std::size_t>(r)] = g.center(axis, r);
    }
    // Accumulate in storage order; each slab sum has a fixed order.
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const int r = axis == 0 ? i : axis == 1 ? j : k;
                out.value[static_cast<std::size_t>(r)] += f.at(i, j, k);
                count[static_cast<std::size_t>(r)] += 1.0;
            }
        }
    }
    for (int r = 0; r < m; ++r) {
        out.value[static_cast<std::size_t>(r)] /= count[static_cast<std::size_t>(r)];
    }
    return out;
}

ScalarField gradient_magnitude(const ScalarField& f)
{
    const Grid& g = f.grid();
    ScalarField out(g);
    const int nz = g.n(2);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const std::array<int, 3> idx{i, j, k};
                double sq = 0.0;
                for (int axis = 0; axis < g.dim(); ++axis) {
                    const auto o = offset(axis);
                    const int p = idx[axis];
                    const int n = g.n(axis);
                    const double h = g.h(axis);
                    auto val = [&](int shift) {
                        return f.at(i + shift * o[0], j + shift * o[1], k + shift * o[2]);
                    };
                    double d;
                    if (p == 0) {
                        d = (4.0 * (val(1) - val(0)) - (val(2) - val(0))) / (2.0 * h);
                    } else if (p == n - 1) {
                        d = (4.0 * (val(0) - val(-1)) - (val(0) - val(-2))) / (2.0 * h);
                    } else {
                        d = (val(1) - val(-1)) / (2.0 * h);
                    }
                    sq += d * d;
                }
                out.at(i, j, k) = std::sqrt(sq);
            }
        }
    }
    return out;
}

ScalarField divergence(const VectorField& u)
{
    const Grid& g = u.grid();
    ScalarField out(g);
    const int nz = g.n(2);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                double d = 0.0;
                for (int axis = 0; axis < g.dim(); ++axis) {
                    const auto o = offset(axis);
                    d += (u.at(axis, i + o[0], j + o[1], k + o[2]) - u.at(axis, i, j, k)) / g.h(axis);
                }
                out.at(i, j, k) = d;
            }
        }
    }
    return out;
}

VectorField face_gradient(const ScalarField& f)
{
    const Grid& g = f.grid();
    VectorField out(g);
    for (int axis = 0; axis < g.dim(); ++axis) {
        const auto e = g.face_extents(axis);
        const auto o = offset(axis);
        const double h = g.h(axis);
#pragma omp parallel for schedule(static)
        for (int k = 0; k < e[2]; ++k) {
            for (int j = 0; j < e[1]; ++j) {
                for (int i = 0; i < e[0]; ++i) {
                    const int along = axis == 0 ? i : axis == 1 ? j : k;
                    if (along == 0 || along == e[axis] - 1) {
                        continue;
                    }
                    out.at(axis, i, j, k) = (f.at(i, j, k) - f.at(i - o[0], j - o[1], k - o[2])) / h;
                }
            }
        }
    }
    return out;
}

void neumann_laplacian(const ScalarField& f, ScalarField& out)
{
    const Grid& g = f.grid();
    const int nz = g.n(2);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const std::array<int, 3> idx{i, j, k};
                const double c = f.at(i, j, k);
                double acc = 0.0;
                for (int axis = 0; axis < g.dim(); ++axis) {
                    const auto o = offset(axis);
                    const int p = idx[axis];
                    const int n = g.n(axis);
                    const double inv_h2 = 1.0 / (g.h(axis) * g.h(axis));
                    // Written as (east + west) - 2c so mirrored cells see
                    // bitwise identical arithmetic.
                    if (p > 0 && p < n - 1) {
                        const double e = f.at(i + o[0], j + o[1], k + o[2]);
                        const double w = f.at(i - o[0], j - o[1], k - o[2]);
                        acc += ((e + w) - 2.0 * c) * inv_h2;
                    } else if (p == 0) {
                        acc += (f.at(i + o[0], j + o[1], k + o[2]) - c) * inv_h2;
                    } else {
                        acc += (f.at(i - o[0], j - o[1], k - o[2]) - c) * inv_h2;
                    }
                }
                out.at(i, j, k) = acc;
            }
        }
    }
}

double sum(std::span<const double> v)
{
    return blocked_sum(v.size(), [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            s += v[i];
        }
        return s;
    });
}

double dot(std::span<const double> x, std::span<const double> y)
{
    return blocked_sum(x.size(), [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            s += x[i] * y[i];
        }
        return s;
    });
}

double min_value(std::span<const double> v)
{
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) {
        m = std::min(m, x);
    }
    return m;
}

double max_value(std::span<const double> v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        m = std::max(m, x);
    }
    return m;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(const VectorField& u)
{
    double m = 0.0;
    for (int axis = 0; axis < u.dim(); ++axis) {
        m = std::max(m, max_abs(std::span<const double>(u.comp(axis))));
    }
    return m;
}

double integral(const ScalarField& f)
{
    return sum(f.values()) * f.grid().cell_volume();
}

} // namespace rdb
