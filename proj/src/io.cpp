#include "rdb/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iterator>
#include <sstream>

namespace rdb {

namespace {

// Byte buffer with explicit endianness, independent of the host.
class ByteWriter {
public:
    void raw(const void* p, std::size_t n)
    {
        const auto* c = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }

    template <class T>
    void le(T v)
    {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        const U bits = std::bit_cast<U>(v);
        for (std::size_t b = 0; b < sizeof(U); ++b) {
            buf_.push_back(static_cast<unsigned char>(bits >> (8 * b)));
        }
    }

    template <class T>
    void be(T v)
    {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        const U bits = std::bit_cast<U>(v);
        for (std::size_t b = sizeof(U); b-- > 0;) {
            buf_.push_back(static_cast<unsigned char>(bits >> (8 * b)));
        }
    }

    const std::vector<unsigned char>& bytes() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class ByteReader {
public:
    ByteReader(std::vector<unsigned char> buf, std::string what)
        : buf_(std::move(buf))
        , what_(std::move(what))
    {
    }

    void need(std::size_t n) const
    {
        if (pos_ + n > buf_.size()) {
            throw FormatError(what_ + ": file is truncated");
        }
    }

    std::string chars(std::size_t n)
    {
        need(n);
        std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    template <class T>
    T le()
    {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        need(sizeof(U));
        U bits = 0;
        for (std::size_t b = 0; b < sizeof(U); ++b) {
            bits |= static_cast<U>(buf_[pos_ + b]) << (8 * b);
        }
        pos_ += sizeof(U);
        return std::bit_cast<T>(bits);
    }

    std::size_t pos() const { return pos_; }
    std::size_t size() const { return buf_.size(); }
    const unsigned char* data() const { return buf_.data(); }

private:
    std::vector<unsigned char> buf_;
    std::string what_;
    std::size_t pos_ = 0;
};

std::vector<unsigned char> slurp(const std::filesystem::path& path, const std::string& what)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError(what + ": cannot open '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<unsigned char>& bytes, const std::string& what)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError(what + ": cannot write '" + path.string() + "'");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError(what + ": write failed for '" + path.string() + "'");
    }
}

std::uint64_t fnv1a(const unsigned char* p, std::size_t n)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_grid(ByteWriter& w, const GridSpec& g)
{
    w.le<std::int32_t>(g.dim);
    for (int k = 0; k < 3; ++k) w.le<std::int32_t>(g.n[k]);
    for (int k = 0; k < 3; ++k) w.le<double>(g.lo[k]);
    for (int k = 0; k < 3; ++k) w.le<double>(g.hi[k]);
}

GridSpec read_grid(ByteReader& r)
{
    GridSpec g;
    g.dim = r.le<std::int32_t>();
    for (int k = 0; k < 3; ++k) g.n[k] = r.le<std::int32_t>();
    for (int k = 0; k < 3; ++k) g.lo[k] = r.le<double>();
    for (int k = 0; k < 3; ++k) g.hi[k] = r.le<double>();
    return g;
}

void write_values(ByteWriter& w, const std::vector<double>& v)
{
    w.le<std::uint64_t>(v.size());
    for (double x : v) w.le<double>(x);
}

void read_values(ByteReader& r, std::vector<double>& v, const std::string& what)
{
    const auto n = r.le<std::uint64_t>();
    if (n != v.size()) {
        throw FormatError(what + ": value count " + std::to_string(n) + " does not match the grid ("
            + std::to_string(v.size()) + ")");
    }
    r.need(n * 8);
    for (double& x : v) x = r.le<double>();
}

constexpr char kFieldMagic[] = "RDBFIELD";
constexpr char kCheckpointMagic[] = "RDBCKPT1";
constexpr std::uint32_t kFieldVersion = 1;
constexpr std::uint32_t kAxisOrderXFastest = 0x78797a; // "xyz"

std::string format_value(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DiagnosticsRow diagnostics_row(const SimState& state, const BoundsSpec& bounds, const PhysicalParams& params,
    double ml_threshold, double dt)
{
    DiagnosticsRow row;
    row.t = state.t;
    row.dt = dt;
    try {
        row.front = front_metrics(state);
    } catch (const NoFrontError&) {
        row.front = FrontMetrics{};
        row.front.t = state.t;
    }
    if (state.grid().dim() == 2) {
        row.inst = instability_metrics(state, ml_threshold);
    } else {
        row.inst.t = state.t;
        row.inst.I_A = interfacial_length(state.a);
        row.inst.I_B = interfacial_length(state.b);
        row.inst.ml = mixing_length(state.c, ml_threshold);
    }
    row.bounds = bounds_report(state, bounds, params);
    row.div_u_max = max_abs(divergence(state.u).values());
    return row;
}

const std::vector<std::string>& csv_columns()
{
    static const std::vector<std::string> cols{"t", "y_f", "w_f", "R_total", "R_at_front", "I_A", "I_B", "ml",
        "a_min", "a_max", "b_min", "b_max", "c_min", "c_max", "sum_ac", "sum_bc", "sum_ab2c", "div_u_max", "dt"};
    return cols;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc)
{
    if (!out_) {
        throw FormatError("csv: cannot write '" + path.string() + "'");
    }
    if (!append) {
        const auto& cols = csv_columns();
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out_ << (i ? "," : "") << cols[i];
        }
        out_ << '\n';
        out_.flush();
    }
}

void CsvWriter::write(const DiagnosticsRow& r)
{
    const double vals[] = {r.t, r.front.y_f, r.front.w_f, r.front.R_total, r.front.R_at_front, r.inst.I_A,
        r.inst.I_B, r.inst.ml, r.bounds.a_min, r.bounds.a_max, r.bounds.b_min, r.bounds.b_max, r.bounds.c_min,
        r.bounds.c_max, r.bounds.sum_ac, r.bounds.sum_bc, r.bounds.sum_ab2c, r.div_u_max, r.dt};
    std::string line;
    for (std::size_t i = 0; i < std::size(vals); ++i) {
        if (!std::isfinite(vals[i])) {
            throw NumericalError("csv: non-finite value in column '" + csv_columns()[i] + "' at t = "
                + format_value(r.t));
        }
        if (i) line += ',';
        line += format_value(vals[i]);
    }
    out_ << line << '\n';
    out_.flush();
}

std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw FormatError("csv: cannot open '" + path.string() + "'");
    }
    std::string line;
    std::getline(in, line);
    std::size_t ncol = 1;
    for (char ch : line) ncol += ch == ',';
    std::vector<std::vector<double>> cols(ncol);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= ncol) {
                throw FormatError("csv: too many columns in '" + path.string() + "'");
            }
            cols[c++].push_back(std::stod(cell));
        }
        if (c != ncol) {
            throw FormatError("csv: short row in '" + path.string() + "'");
        }
    }
    return cols;
}

void write_vtk(const std::filesystem::path& path, const SimState& state, bool binary)
{
    const Grid& g = state.grid();
    const std::size_t n = g.cell_count();
    std::ostringstream head;
    head << "# vtk DataFile Version 3.0\n";
    head << "rdb t=" << format_value(state.t) << " step=" << state.step << '\n';
    head << (binary ? "BINARY\n" : "ASCII\n");
    head << "DATASET STRUCTURED_POINTS\n";
    head << "DIMENSIONS " << g.n(0) << ' ' << g.n(1) << ' ' << g.n(2) << '\n';
    head << "ORIGIN " << format_value(g.center(0, 0)) << ' ' << format_value(g.center(1, 0)) << ' '
         << format_value(g.dim() == 3 ? g.center(2, 0) : 0.0) << '\n';
    head << "SPACING " << format_value(g.h(0)) << ' ' << format_value(g.h(1)) << ' '
         << format_value(g.dim() == 3 ? g.h(2) : 1.0) << '\n';
    head << "POINT_DATA " << n << '\n';

    ByteWriter w;
    const std::string h = head.str();
    w.raw(h.data(), h.size());

    auto text = [&w](const std::string& s) { w.raw(s.data(), s.size()); };
    auto scalars = [&](const char* name, const ScalarField& f) {
        text(std::string("SCALARS ") + name + " double 1\nLOOKUP_TABLE default\n");
        for (std::size_t i = 0; i < n; ++i) {
            if (binary) {
                w.be<double>(f[i]);
            } else {
                text(format_value(f[i]) + '\n');
            }
        }
        if (binary) text("\n");
    };
    scalars("a", state.a);
    scalars("b", state.b);
    scalars("c", state.c);
    scalars("p", state.p);

    text("VECTORS u double\n");
    for (int k = 0; k < g.n(2); ++k) {
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const double ux = 0.5 * (state.u.at(0, i, j, k) + state.u.at(0, i + 1, j, k));
                const double uy = 0.5 * (state.u.at(1, i, j, k) + state.u.at(1, i, j + 1, k));
                const double uz = g.dim() == 3 ? 0.5 * (state.u.at(2, i, j, k) + state.u.at(2, i, j, k + 1)) : 0.0;
                if (binary) {
                    w.be<double>(ux);
                    w.be<double>(uy);
                    w.be<double>(uz);
                } else {
                    text(format_value(ux) + ' ' + format_value(uy) + ' ' + format_value(uz) + '\n');
                }
            }
        }
    }
    if (binary) text("\n");
    dump(path, w.bytes(), "vtk");
}

void write_raw_field(const std::filesystem::path& path, const ScalarField& f)
{
    ByteWriter w;
    w.raw(kFieldMagic, 8);
    w.le<std::uint32_t>(kFieldVersion);
    w.le<std::uint32_t>(kAxisOrderXFastest);
    write_grid(w, f.grid().spec());
    write_values(w, f.data());
    dump(path, w.bytes(), "raw field");
}

ScalarField read_raw_field(const std::filesystem::path& path)
{
    ByteReader r(slurp(path, "raw field"), "raw field '" + path.string() + "'");
    if (r.chars(8) != std::string(kFieldMagic, 8)) {
        throw FormatError("raw field '" + path.string() + "': bad magic");
    }
    const auto version = r.le<std::uint32_t>();
    if (version != kFieldVersion) {
        throw FormatError("raw field '" + path.string() + "': unsupported version " + std::to_string(version));
    }
    if (r.le<std::uint32_t>() != kAxisOrderXFastest) {
        throw FormatError("raw field '" + path.string() + "': unknown axis order");
    }
    const GridSpec spec = read_grid(r);
    Grid grid;
    try {
        grid = build_grid(spec);
    } catch (const ValidationError& e) {
        throw FormatError("raw field '" + path.string() + "': invalid grid header (" + e.what() + ")");
    }
    ScalarField f(grid);
    read_values(r, f.data(), "raw field '" + path.string() + "'");
    return f;
}

void write_checkpoint(const std::filesystem::path& path, const SimState& s)
{
    ByteWriter w;
    w.raw(kCheckpointMagic, 8);
    w.le<std::uint32_t>(kCheckpointVersion);
    write_grid(w, s.grid().spec());
    w.le<double>(s.t);
    w.le<std::uint64_t>(s.step);
    w.le<std::uint64_t>(s.seed);
    for (int axis = 0; axis < s.grid().dim(); ++axis) {
        write_values(w, s.u.comp(axis));
    }
    write_values(w, s.p.data());
    write_values(w, s.a.data());
    write_values(w, s.b.data());
    write_values(w, s.c.data());
    const auto& bytes = w.bytes();
    w.le<std::uint64_t>(fnv1a(bytes.data(), bytes.size()));

    // Write-then-rename so an interrupted write never replaces a good file.
    auto tmp = path;
    tmp += ".tmp";
    dump(tmp, w.bytes(), "checkpoint");
    std::filesystem::rename(tmp, path);
}

SimState read_checkpoint(const std::filesystem::path& path)
{
    const std::string what = "checkpoint '" + path.string() + "'";
    ByteReader r(slurp(path, "checkpoint"), what);
    if (r.size() < 8 || r.chars(8) != std::string(kCheckpointMagic, 8)) {
        throw FormatError(what + ": bad magic (not a checkpoint)");
    }
    const auto version = r.le<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw FormatError(what + ": version " + std::to_string(version) + " is not supported (expected "
            + std::to_string(kCheckpointVersion) + ")");
    }
    const GridSpec spec = read_grid(r);
    Grid grid;
    try {
        grid = build_grid(spec);
    } catch (const ValidationError& e) {
        throw FormatError(what + ": corrupt grid header (" + e.what() + ")");
    }
    SimState s = make_state(ScalarField(grid), ScalarField(grid), ScalarField(grid));
    s.t = r.le<double>();
    s.step = r.le<std::uint64_t>();
    s.seed = r.le<std::uint64_t>();
    for (int axis = 0; axis < grid.dim(); ++axis) {
        read_values(r, s.u.comp(axis), what);
    }
    read_values(r, s.p.data(), what);
    read_values(r, s.a.data(), what);
    read_values(r, s.b.data(), what);
    read_values(r, s.c.data(), what);
    const std::size_t body = r.pos();
    const auto stored = r.le<std::uint64_t>();
    if (stored != fnv1a(r.data(), body)) {
        throw FormatError(what + ": checksum mismatch (file is corrupt)");
    }
    if (r.pos() != r.size()) {
        throw FormatError(what + ": trailing bytes after checksum");
    }
    return s;
}

SimState read_checkpoint(const std::filesystem::path& path, const GridSpec& expected)
{
    SimState s = read_checkpoint(path);
    if (!(s.grid().spec() == build_grid(expected).spec())) {
        throw FormatError("checkpoint '" + path.string() + "': grid does not match the config");
    }
    return s;
}

} // namespace rdb
