#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdb {

/// Raised when a user-supplied value violates a documented invariant.
/// The message always starts with the offending key path when one exists.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a usable result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    int dim = 2;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};
    std::array<int, 3> n{4, 4, 1};

    bool operator==(const GridSpec&) const = default;
};

/// Uniform Cartesian cell grid in 2 or 3 dimensions.
///
/// Storage order is fixed: x varies fastest, then y, then z, i.e. the flat
/// index of cell (i, j, k) is i + nx * (j + ny * k). In 2D nz == 1.
/// The same order is used for every face-centred velocity component with
/// the extent along the component's own axis increased by one.
class Grid {
public:
    Grid() = default;
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    int n(int axis) const { return spec_.n[axis]; }
    double h(int axis) const { return h_[axis]; }
    double lo(int axis) const { return spec_.lo[axis]; }
    double hi(int axis) const { return spec_.hi[axis]; }
    double length(int axis) const { return spec_.hi[axis] - spec_.lo[axis]; }
    double cell_volume() const { return h_[0] * h_[1] * (spec_.dim == 3 ? h_[2] : 1.0); }
    std::size_t cell_count() const { return cells_; }

    std::size_t index(int i, int j, int k = 0) const
    {
        return static_cast<std::size_t>(i)
            + static_cast<std::size_t>(spec_.n[0]) * (static_cast<std::size_t>(j)
                + static_cast<std::size_t>(spec_.n[1]) * static_cast<std::size_t>(k));
    }

    /// Cell-centre coordinate. Computed relative to the domain midpoint so
    /// that mirror-image cells of a domain symmetric about 0 have exactly
    /// opposite coordinates.
    double center(int axis, int i) const
    {
        return mid_[axis] + (static_cast<double>(i) + 0.5 - 0.5 * spec_.n[axis]) * h_[axis];
    }

    /// Face coordinate along `axis` (face 0 is the low boundary).
    double face(int axis, int i) const
    {
        return mid_[axis] + (static_cast<double>(i) - 0.5 * spec_.n[axis]) * h_[axis];
    }

    /// Extents of the face array holding velocity component `comp`.
    std::array<int, 3> face_extents(int comp) const
    {
        auto e = spec_.n;
        e[comp] += 1;
        return e;
    }

    std::size_t face_count(int comp) const;

    std::size_t face_index(int comp, int i, int j, int k = 0) const
    {
        const auto e = face_extents(comp);
        return static_cast<std::size_t>(i)
            + static_cast<std::size_t>(e[0]) * (static_cast<std::size_t>(j)
                + static_cast<std::size_t>(e[1]) * static_cast<std::size_t>(k));
    }

    bool operator==(const Grid& other) const { return spec_ == other.spec_; }

private:
    GridSpec spec_;
    std::array<double, 3> h_{1.0, 1.0, 1.0};
    std::array<double, 3> mid_{0.0, 0.0, 0.0};
    std::size_t cells_ = 0;
};

/// Validates `spec` and returns the grid; throws ValidationError otherwise.
Grid build_grid(const GridSpec& spec);

/// Cell-centred scalar values on a grid.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0)
        : grid_(grid)
        , values_(grid.cell_count(), value)
    {
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t idx) { return values_[idx]; }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double& at(int i, int j, int k = 0) { return values_[grid_.index(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return values_[grid_.index(i, j, k)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    void fill(double v);

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Face-staggered (MAC) velocity: component k lives on faces normal to axis k.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& grid);

    const Grid& grid() const { return grid_; }
    int dim() const { return grid_.dim(); }

    std::vector<double>& comp(int axis) { return comps_[axis]; }
    const std::vector<double>& comp(int axis) const { return comps_[axis]; }

    double& at(int axis, int i, int j, int k = 0) { return comps_[axis][grid_.face_index(axis, i, j, k)]; }
    double at(int axis, int i, int j, int k = 0) const { return comps_[axis][grid_.face_index(axis, i, j, k)]; }

    /// Pins every boundary-normal face to exactly zero (slip wall).
    void apply_slip_walls();

    void scale(double s);

private:
    Grid grid_;
    std::array<std::vector<double>, 3> comps_;
};

struct Profile {
    std::vector<double> coord;
    std::vector<double> value;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Mean over every axis except `profile_axis`. In 2D the profile axis
/// defaults to y (average along x); 3D input needs it spelled out.
Profile x_average(const ScalarField& f, std::optional<int> profile_axis = std::nullopt);

/// |grad f| at cell centres: central differences inside, second-order
/// one-sided differences on boundary cells.
ScalarField gradient_magnitude(const ScalarField& f);

ScalarField divergence(const VectorField& u);

/// Face gradient of a cell field; boundary-normal faces are zero.
VectorField face_gradient(const ScalarField& f);

/// Discrete Laplacian with zero normal flux through the walls.
void neumann_laplacian(const ScalarField& f, ScalarField& out);

// Reductions use a fixed summation order (row partials, then rows in order)
// so results do not depend on the thread count.
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double min_value(std::span<const double> v);
double max_value(std::span<const double> v);
double max_abs(std::span<const double> v);
bool all_finite(std::span<const double> v);

double max_abs(const VectorField& u);
double integral(const ScalarField& f);

} // namespace rdb
