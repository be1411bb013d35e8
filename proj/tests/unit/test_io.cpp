#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "rdb/io.hpp"
#include "rdb/runner.hpp"
#include "support.hpp"

using namespace rdb;
using rdb::testing::grid2;
using rdb::testing::random_field;
using rdb::testing::random_velocity;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name)
    {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

SimState random_state(const Grid& g)
{
    SimState s = make_state(random_field(g, 1), random_field(g, 2), random_field(g, 3));
    s.p = random_field(g, 4);
    s.u = random_velocity(g, 5);
    s.t = 12.375;
    s.step = 4242;
    s.seed = 77;
    return s;
}

RunConfig small_config(const std::filesystem::path& out)
{
    RunConfig c = case_config(CaseId::I);
    c.grid.lo = {-8.0, 0.0, 0.0};
    c.grid.hi = {8.0, 16.0, 1.0};
    c.grid.n = {16, 16, 1};
    c.scenario.y0 = 8.0;
    c.t_end = 10.0;
    c.output_every = 1.0;
    c.out_dir = out.string();
    return c;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("checkpoint round trip")
{
    TempDir tmp("rdb_test_ckpt");
    for (const Grid& g : {grid2(6, 5), rdb::testing::grid3(4, 5, 6)}) {
        const SimState s = random_state(g);
        write_checkpoint(tmp.path / "c.bin", s);
        const SimState back = read_checkpoint(tmp.path / "c.bin");
        CHECK(bitwise_equal(s, back));
        CHECK(back.seed == 77u);
        CHECK(back.step == 4242u);
    }
}

TEST_CASE("checkpoint corruption is detected")
{
    TempDir tmp("rdb_test_ckpt_bad");
    const Grid g = grid2(6, 5);
    write_checkpoint(tmp.path / "c.bin", random_state(g));
    const std::string bytes = slurp(tmp.path / "c.bin");

    std::ofstream(tmp.path / "trunc.bin", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_WITH_AS(read_checkpoint(tmp.path / "trunc.bin"), doctest::Contains("truncated"), FormatError);

    std::string flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x10;
    std::ofstream(tmp.path / "flip.bin", std::ios::binary) << flipped;
    CHECK_THROWS_WITH_AS(read_checkpoint(tmp.path / "flip.bin"), doctest::Contains("checksum"), FormatError);

    std::string versioned = bytes;
    versioned[8] = 9;
    std::ofstream(tmp.path / "ver.bin", std::ios::binary) << versioned;
    CHECK_THROWS_WITH_AS(read_checkpoint(tmp.path / "ver.bin"), doctest::Contains("version"), FormatError);

    GridSpec other = g.spec();
    other.n[0] = 8;
    CHECK_THROWS_WITH_AS(read_checkpoint(tmp.path / "c.bin", other), doctest::Contains("grid"), FormatError);
    CHECK_THROWS_AS(read_checkpoint(tmp.path / "nothing.bin"), FormatError);
}

TEST_CASE("raw field round trip")
{
    TempDir tmp("rdb_test_raw");
    const ScalarField f = random_field(grid2(7, 9, -1.0, 2.0, 3.0, 4.5), 12);
    write_raw_field(tmp.path / "f.rdb", f);
    const ScalarField back = read_raw_field(tmp.path / "f.rdb");
    CHECK(back.grid() == f.grid());
    CHECK(std::memcmp(back.data().data(), f.data().data(), f.size() * sizeof(double)) == 0);

    const std::string bytes = slurp(tmp.path / "f.rdb");
    CHECK(bytes.substr(0, 8) == "RDBFIELD");
    std::ofstream(tmp.path / "short.rdb", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
    CHECK_THROWS_AS(read_raw_field(tmp.path / "short.rdb"), FormatError);
}

TEST_CASE("vtk header and payload size")
{
    TempDir tmp("rdb_test_vtk");
    const Grid g = grid2(6, 4);
    const SimState s = random_state(g);
    write_vtk(tmp.path / "b.vtk", s, true);
    write_vtk(tmp.path / "a.vtk", s, false);
    const std::string bin = slurp(tmp.path / "b.vtk");
    CHECK(bin.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(bin.find("BINARY\nDATASET STRUCTURED_POINTS\nDIMENSIONS 6 4 1\n") != std::string::npos);
    CHECK(bin.find("POINT_DATA 24\n") != std::string::npos);

    // Big-endian first value of a right after its lookup-table line.
    const std::string tag = "SCALARS a double 1\nLOOKUP_TABLE default\n";
    const auto at = bin.find(tag) + tag.size();
    unsigned char be[8];
    std::memcpy(be, bin.data() + at, 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits = (bits << 8) | be[i];
    double first;
    std::memcpy(&first, &bits, 8);
    CHECK(first == s.a[0]);

    const std::string ascii = slurp(tmp.path / "a.vtk");
    CHECK(ascii.find("ASCII\n") != std::string::npos);
    CHECK(ascii.find("VECTORS u double\n") != std::string::npos);
}

TEST_CASE("run writes the time series at the output cadence")
{
    TempDir tmp("rdb_test_run");
    RunConfig c = small_config(tmp.path / "a");
    c.snapshot_every = 5.0;
    const RunOutcome r = run(c);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.rows.size() == 11u);
    const auto cols = read_csv_columns(tmp.path / "a" / "timeseries.csv");
    REQUIRE(cols.size() == csv_columns().size());
    CHECK(cols[0].size() == 11u);
    for (std::size_t n = 0; n < cols[0].size(); ++n) {
        CHECK(cols[0][n] == static_cast<double>(n));
    }
    CHECK(std::filesystem::exists(tmp.path / "a" / "summary.json"));
    CHECK(std::filesystem::exists(tmp.path / "a" / "snapshots" / "snap_00002.vtk"));

    SUBCASE("deterministic reruns give identical CSVs")
    {
        RunConfig c2 = c;
        c2.out_dir = (tmp.path / "b").string();
        run(c2);
        CHECK(slurp(tmp.path / "a" / "timeseries.csv") == slurp(tmp.path / "b" / "timeseries.csv"));
    }
}

TEST_CASE("bound violations set the exit code")
{
    TempDir tmp("rdb_test_violation");
    RunConfig c = small_config(tmp.path);
    c.t_end = 2.0;
    c.bounds = BoundsSpec{0.5, 1.0, 0.0, 2.0};
    CHECK(run(c).exit_code == kExitBoundViolation);
}

TEST_CASE("resume reproduces the uninterrupted run")
{
    TempDir tmp("rdb_test_resume");
    RunConfig c = small_config(tmp.path / "full");
    c.t_end = 4.0;
    const RunOutcome full = run(c);

    RunConfig first = c;
    first.t_end = 2.0;
    first.out_dir = (tmp.path / "part").string();
    run(first);
    RunConfig rest = c;
    rest.out_dir = first.out_dir;
    RunOptions opts;
    opts.resume = tmp.path / "part" / "checkpoint.bin";
    const RunOutcome resumed = run(rest, opts);
    CHECK(bitwise_equal(full.final_state, resumed.final_state));
    CHECK(slurp(tmp.path / "full" / "timeseries.csv") == slurp(tmp.path / "part" / "timeseries.csv"));

    SUBCASE("ten steps after a checkpoint match ten uninterrupted steps")
    {
        Simulation a(c);
        for (int n = 0; n < 5; ++n) a.step();
        write_checkpoint(tmp.path / "mid.bin", a.state());
        Simulation b(c, read_checkpoint(tmp.path / "mid.bin", c.grid));
        for (int n = 0; n < 10; ++n) {
            a.step();
            b.step();
        }
        CHECK(bitwise_equal(a.state(), b.state()));
    }
}

TEST_CASE("non-finite rows are refused")
{
    TempDir tmp("rdb_test_nan");
    CsvWriter w(tmp.path / "t.csv");
    DiagnosticsRow row;
    row.front.w_f = std::nan("");
    CHECK_THROWS_AS(w.write(row), NumericalError);
}

TEST_CASE("solver failure leaves a checkpoint and a failure record")
{
    TempDir tmp("rdb_test_fail");
    RunConfig c = small_config(tmp.path);
    c.poisson.max_iter = 1;
    c.poisson.tol = 1e-14;
    const RunOutcome r = run(c);
    CHECK(r.exit_code == kExitFailure);
    CHECK(std::filesystem::exists(tmp.path / "failure.json"));
    CHECK(std::filesystem::exists(tmp.path / "failure_checkpoint.bin"));
    CHECK_NOTHROW(read_checkpoint(tmp.path / "failure_checkpoint.bin", c.grid));
}
