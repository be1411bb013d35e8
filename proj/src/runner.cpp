#include "rdb/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rdb {

using nlohmann::json;

namespace {

// Times within this fraction of a step of the target are treated as equal.
double snap_slack(double t)
{
    return 1e-12 * std::max(1.0, std::abs(t));
}

json bounds_json(const BoundsReport& r)
{
    return {{"a_min", r.a_min}, {"a_max", r.a_max}, {"b_min", r.b_min}, {"b_max", r.b_max}, {"c_min", r.c_min},
        {"c_max", r.c_max}, {"c_cap", r.c_cap}, {"equidiffusive", r.equidiffusive},
        {"equidiffusive_cap", r.equidiffusive_cap}, {"nonnegative", r.nonnegative}, {"a_ok", r.a_ok},
        {"b_ok", r.b_ok}, {"c_ok", r.c_ok}, {"c_equidiffusive_ok", r.c_equidiffusive_ok}, {"finite", r.finite},
        {"sum_ac", r.sum_ac}, {"sum_bc", r.sum_bc}, {"sum_ab2c", r.sum_ab2c}};
}

double relative_drift(double now, double start)
{
    const double scale = std::abs(start) > 0.0 ? std::abs(start) : 1.0;
    return std::abs(now - start) / scale;
}

void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw FormatError("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

std::string snapshot_name(std::size_t index, SnapshotFormat fmt)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "snap_%05zu.%s", index, fmt == SnapshotFormat::raw ? "rdb" : "vtk");
    return buf;
}

void write_snapshot(const std::filesystem::path& dir, std::size_t index, const SimState& s, SnapshotFormat fmt)
{
    std::filesystem::create_directories(dir);
    if (fmt == SnapshotFormat::raw) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "snap_%05zu", index);
        for (const auto& [name, f] : {std::pair<const char*, const ScalarField*>{"a", &s.a}, {"b", &s.b},
                 {"c", &s.c}, {"p", &s.p}}) {
            write_raw_field(dir / (std::string(stem) + "_" + name + ".rdb"), *f);
        }
        return;
    }
    write_vtk(dir / snapshot_name(index, fmt), s, fmt == SnapshotFormat::vtk_binary);
}

} // namespace

BoundsSpec bounds_from_initial(const SimState& s, double T)
{
    BoundsSpec b;
    b.M_A = std::max(0.0, max_value(s.a.values()));
    b.M_B = std::max(0.0, max_value(s.b.values()));
    b.M_C = std::max(0.0, max_value(s.c.values()));
    b.T = T;
    return b;
}

Simulation::Simulation(const RunConfig& cfg)
    : Simulation(cfg, initial_state(cfg.scenario, build_grid(cfg.grid)))
{
}

Simulation::Simulation(const RunConfig& cfg, SimState state)
    : cfg_(cfg)
    , step_cfg_(step_config(cfg))
    , state_(std::move(state))
{
    validate(cfg_);
    if (!(state_.grid().spec() == build_grid(cfg_.grid).spec())) {
        throw ValidationError("grid: state grid does not match the config");
    }
    if (cfg_.bounds) {
        bounds_ = *cfg_.bounds;
    } else if (state_.t == 0.0) {
        bounds_ = bounds_from_initial(state_, cfg_.t_end);
    } else {
        // A resumed run cannot see its initial data; rebuild it.
        bounds_ = bounds_from_initial(initial_state(cfg_.scenario, state_.grid()), cfg_.t_end);
    }
}

StepReport Simulation::step(double dt_cap)
{
    return rdb::step(state_, cfg_.params, step_cfg_, dt_cap);
}

void Simulation::advance_to(double target, const std::function<void(const StepReport&)>& on_step)
{
    while (state_.t < target - snap_slack(target)) {
        const StepReport r = step(target - state_.t);
        if (std::abs(state_.t - target) <= snap_slack(target)) {
            state_.t = target;
        }
        if (on_step) {
            on_step(r);
        }
    }
}

DiagnosticsRow Simulation::diagnostics(double last_dt) const
{
    return diagnostics_row(state_, bounds_, cfg_.params, cfg_.ml_threshold, last_dt);
}

std::vector<double> Simulation::output_times() const
{
    std::vector<double> ts;
    const double every = cfg_.output_every;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * every;
        if (t > cfg_.t_end + snap_slack(cfg_.t_end)) {
            break;
        }
        ts.push_back(std::min(t, cfg_.t_end));
    }
    if (ts.back() < cfg_.t_end - snap_slack(cfg_.t_end)) {
        ts.push_back(cfg_.t_end);
    }
    return ts;
}

bool is_front_validation(const RunConfig& cfg)
{
    const auto& g = cfg.params.g;
    return cfg.scenario.kind == ScenarioKind::flat && g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0;
}

json front_scaling_summary(const std::vector<DiagnosticsRow>& rows, double y0, double t_min, double t_max)
{
    std::vector<double> ts, wf, rt, rf;
    double drift = 0.0;
    for (const auto& r : rows) {
        if (r.t < t_min || r.t > t_max || !(r.front.R_total > 0.0)) {
            continue;
        }
        ts.push_back(r.t);
        wf.push_back(r.front.w_f);
        rt.push_back(r.front.R_total);
        rf.push_back(r.front.R_at_front);
        drift = std::max(drift, std::abs(r.front.y_f - y0));
    }
    json out;
    out["window"] = {t_min, t_max};
    out["samples"] = ts.size();
    out["y_f_max_drift"] = drift;
    auto fit = [&](const char* name, const std::vector<double>& v) {
        try {
            const PowerLawFit f = power_law_fit(ts, v, t_min, t_max);
            out[name] = {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r_squared", f.r_squared}};
        } catch (const ValidationError& e) {
            out[name] = {{"error", e.what()}};
        }
    };
    fit("w_f", wf);
    fit("R_total", rt);
    fit("R_at_front", rf);
    return out;
}

RunOutcome run(const RunConfig& cfg, const RunOptions& opts)
{
    validate(cfg);
    const std::filesystem::path dir = opts.out_dir ? *opts.out_dir : std::filesystem::path(cfg.out_dir);
    const bool resuming = opts.resume.has_value();
    if (opts.write_files) {
        std::filesystem::create_directories(dir);
        if (!resuming) {
            write_json(dir / "config.json", to_json(cfg));
        }
    }

    Simulation sim = resuming ? Simulation(cfg, read_checkpoint(*opts.resume, cfg.grid)) : Simulation(cfg);

    RunOutcome out;
    std::optional<CsvWriter> csv;
    if (opts.write_files) {
        csv.emplace(dir / "timeseries.csv", resuming);
    }

    const auto times = sim.output_times();
    const double t0 = sim.state().t;
    const BoundsReport initial = bounds_report(sim.state(), sim.bounds(), cfg.params);
    double last_dt = 0.0;
    bool bounds_ok = true;

    // Snapshot clock is independent of the output clock.
    std::size_t snap_index = 0;
    double next_snap = 0.0;
    if (cfg.snapshot_every > 0.0) {
        while (next_snap < t0 - snap_slack(t0)) {
            next_snap = static_cast<double>(++snap_index) * cfg.snapshot_every;
        }
    }

    auto emit = [&]() {
        DiagnosticsRow row = sim.diagnostics(last_dt);
        bounds_ok = bounds_ok && row.bounds.all_ok();
        if (csv) {
            csv->write(row);
        }
        out.rows.push_back(row);
    };
    auto on_step = [&](const StepReport& r) {
        last_dt = r.dt;
        out.max_div = std::max(out.max_div, r.div_max);
        ++out.steps;
    };

    try {
        for (double t_out : times) {
            if (t_out < t0 - snap_slack(t0)) {
                continue;
            }
            if (resuming && t_out <= t0 + snap_slack(t0)) {
                continue; // already written before the checkpoint
            }
            while (cfg.snapshot_every > 0.0 && next_snap < t_out - snap_slack(t_out)) {
                sim.advance_to(next_snap, on_step);
                if (opts.write_files) {
                    write_snapshot(dir / "snapshots", snap_index, sim.state(), cfg.snapshot_format);
                }
                next_snap = static_cast<double>(++snap_index) * cfg.snapshot_every;
            }
            sim.advance_to(t_out, on_step);
            emit();
            if (cfg.snapshot_every > 0.0 && std::abs(next_snap - t_out) <= snap_slack(t_out)) {
                if (opts.write_files) {
                    write_snapshot(dir / "snapshots", snap_index, sim.state(), cfg.snapshot_format);
                }
                next_snap = static_cast<double>(++snap_index) * cfg.snapshot_every;
            }
            if (opts.write_files) {
                write_checkpoint(dir / "checkpoint.bin", sim.state());
            }
        }
    } catch (const NumericalError& e) {
        out.exit_code = kExitFailure;
        out.failure = e.what();
        if (opts.write_files) {
            write_checkpoint(dir / "failure_checkpoint.bin", sim.state());
            json f = {{"error", e.what()}, {"t", sim.state().t}, {"step", sim.state().step},
                {"checkpoint", (dir / "failure_checkpoint.bin").string()}};
            if (const auto* pe = dynamic_cast<const PoissonError*>(&e)) {
                f["poisson_residual"] = pe->residual();
            }
            write_json(dir / "failure.json", f);
        }
    }

    out.final_state = sim.state();
    if (out.exit_code == kExitOk && !bounds_ok) {
        out.exit_code = kExitBoundViolation;
    }

    const BoundsReport final_bounds = bounds_report(sim.state(), sim.bounds(), cfg.params);
    json s;
    s["t"] = sim.state().t;
    s["steps"] = sim.state().step;
    s["exit_code"] = out.exit_code;
    s["bounds_ok"] = bounds_ok;
    s["bounds"] = {{"M_A", sim.bounds().M_A}, {"M_B", sim.bounds().M_B}, {"M_C", sim.bounds().M_C},
        {"T", sim.bounds().T}};
    s["final"] = bounds_json(final_bounds);
    s["max_div_u"] = out.max_div;
    s["conservation_drift"] = {{"sum_ac", relative_drift(final_bounds.sum_ac, initial.sum_ac)},
        {"sum_bc", relative_drift(final_bounds.sum_bc, initial.sum_bc)},
        {"sum_ab2c", relative_drift(final_bounds.sum_ab2c, initial.sum_ab2c)}};
    if (!out.failure.empty()) {
        s["failure"] = out.failure;
    }
    if (is_front_validation(cfg) && out.exit_code != kExitFailure) {
        const auto window = cfg.fit_window ? *cfg.fit_window : std::array<double, 2>{0.25 * cfg.t_end, cfg.t_end};
        s["front_scaling"] = front_scaling_summary(out.rows, cfg.scenario.y0, window[0], window[1]);
    }
    out.summary = s;
    if (opts.write_files) {
        write_json(dir / "summary.json", s);
    }
    return out;
}

} // namespace rdb
