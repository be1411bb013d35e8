#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rdb/config.hpp"
#include "rdb/diagnostics.hpp"
#include "rdb/state.hpp"

namespace rdb {

/// Raised for unreadable, truncated or mismatched files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One time-series row. Front columns are zero when no front exists.
struct DiagnosticsRow {
    double t = 0.0;
    FrontMetrics front;
    InstabilityMetrics inst;
    BoundsReport bounds;
    double div_u_max = 0.0;
    double dt = 0.0;
};

DiagnosticsRow diagnostics_row(const SimState& state, const BoundsSpec& bounds, const PhysicalParams& params,
    double ml_threshold, double dt);

const std::vector<std::string>& csv_columns();

class CsvWriter {
public:
    /// Truncates `path` and writes the header, or appends when `append` is set.
    CsvWriter(const std::filesystem::path& path, bool append = false);
    void write(const DiagnosticsRow& row);

private:
    std::ofstream out_;
};

/// Reads a time-series CSV back, one vector per column.
std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path);

/// Legacy VTK STRUCTURED_POINTS with a, b, c, p and the cell-centred velocity.
void write_vtk(const std::filesystem::path& path, const SimState& state, bool binary);

/// Exact field dump: "RDBFIELD", version, dim, axis order tag, n, lo, hi,
/// value count, then little-endian doubles.
void write_raw_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_raw_field(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const SimState& state);
SimState read_checkpoint(const std::filesystem::path& path);
/// As read_checkpoint, but also rejects a grid that differs from `expected`.
SimState read_checkpoint(const std::filesystem::path& path, const GridSpec& expected);

} // namespace rdb
