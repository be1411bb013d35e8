#include "rdb/convergence.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rdb/runner.hpp"

namespace rdb {

namespace {

TimeSeries window(const TimeSeries& s, double t_min)
{
    TimeSeries out;
    for (std::size_t n = 0; n < s.t.size(); ++n) {
        if (s.t[n] >= t_min) {
            out.t.push_back(s.t[n]);
            out.v.push_back(s.v[n]);
        }
    }
    return out;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

GridSpec ladder_grid(const GridSpec& base, double h)
{
    if (!(h > 0.0)) {
        throw ValidationError("ladder.h: entries must be > 0");
    }
    GridSpec g = base;
    for (int axis = 0; axis < base.dim; ++axis) {
        const double len = base.hi[axis] - base.lo[axis];
        const double cells = len / h;
        const double rounded = std::round(cells);
        if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
            throw ValidationError("ladder.h: " + fmt(h) + " does not divide the domain length " + fmt(len));
        }
        g.n[axis] = static_cast<int>(rounded);
    }
    build_grid(g);
    return g;
}

std::vector<LadderEntry> run_ladder(const RunConfig& cfg)
{
    if (!cfg.ladder) {
        throw ValidationError("ladder: section is required for a convergence study");
    }
    validate(cfg);
    const LadderSpec& ladder = *cfg.ladder;

    std::vector<LadderEntry> entries;
    for (double h : ladder.h) {
        RunConfig c = cfg;
        c.grid = ladder_grid(cfg.grid, h);
        c.ladder.reset();
        LadderEntry e;
        e.h = h;
        e.n = c.grid.n;
        const auto start = std::chrono::steady_clock::now();
        try {
            Simulation sim(c);
            for (double t : sim.output_times()) {
                sim.advance_to(t);
                const InstabilityMetrics m = instability_metrics(sim.state(), c.ml_threshold);
                e.I_A.t.push_back(t);
                e.I_A.v.push_back(m.I_A);
                e.I_B.t.push_back(t);
                e.I_B.v.push_back(m.I_B);
                e.ml.t.push_back(t);
                e.ml.v.push_back(m.ml);
            }
        } catch (const std::exception& ex) {
            throw NumericalError("ladder: run at h = " + fmt(h) + " failed: " + ex.what());
        }
        e.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        entries.push_back(std::move(e));
    }

    const LadderEntry& ref = entries.back();
    for (auto& e : entries) {
        e.E_A = relative_error_series(window(e.I_A, ladder.t_min), window(ref.I_A, ladder.t_min));
        e.E_B = relative_error_series(window(e.I_B, ladder.t_min), window(ref.I_B, ladder.t_min));
        e.E_ml = relative_error_series(window(e.ml, ladder.t_min), window(ref.ml, ladder.t_min));
    }
    return entries;
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<LadderEntry>& entries)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ValidationError("converge: cannot write '" + path.string() + "'");
    }
    out << "h,E_A,E_B,E_ml,runtime_s\n";
    for (const auto& e : entries) {
        out << fmt(e.h) << ',' << fmt(e.E_A) << ',' << fmt(e.E_B) << ',' << fmt(e.E_ml) << ','
            << fmt(e.runtime_s) << '\n';
    }
}

} // namespace rdb
