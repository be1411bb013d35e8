// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "rdb/config.hpp"
#include "rdb/convergence.hpp"
#include "rdb/diagnostics.hpp"
#include "rdb/flow.hpp"
#include "rdb/runner.hpp"
#include "rdb/transport.hpp"

using namespace rdb;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, ...)
{
    char buf[1024];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

// Every step of every run below feeds the incompressibility and conservation
// ledgers, so criteria 3 and 4 cover the whole suite.
struct Watch {
    double worst_div_ratio = 0.0;
    std::uint64_t steps = 0;
    double worst_drift = 0.0;
    int runs = 0;
} watch;

struct Sums {
    double ac = 0.0, bc = 0.0, ab2c = 0.0;
};

Sums sums(const SimState& s)
{
    Sums out;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        out.ac += s.a[i] + s.c[i];
        out.bc += s.b[i] + s.c[i];
        out.ab2c += s.a[i] + s.b[i] + 2.0 * s.c[i];
    }
    return out;
}

double drift(const Sums& now, const Sums& ref)
{
    auto rel = [](double x, double r) { return r == 0.0 ? std::abs(x) : std::abs(x - r) / std::abs(r); };
    return std::max({rel(now.ac, ref.ac), rel(now.bc, ref.bc), rel(now.ab2c, ref.ab2c)});
}

// Runs a simulation through its output times, calling on_output at each one
// (including t=0) and on_step after every step. Stops at the first output after
// stop_after_steps steps when that is set.
struct Driver {
    Simulation& sim;
    std::function<void(const Simulation&)> on_output;
    std::function<void(const Simulation&, const StepReport&)> on_step;
    std::uint64_t stop_after_steps = 0;

    std::uint64_t go()
    {
        const double tol = sim.config().poisson.tol;
        const Sums s0 = sums(sim.state());
        std::uint64_t steps = 0;
        ++watch.runs;
        for (double t : sim.output_times()) {
            sim.advance_to(t, [&](const StepReport& r) {
                ++steps;
                ++watch.steps;
                watch.worst_div_ratio = std::max(watch.worst_div_ratio, r.div_max / tol);
                if (on_step) on_step(sim, r);
            });
            watch.worst_drift = std::max(watch.worst_drift, drift(sums(sim.state()), s0));
            if (on_output) on_output(sim);
            if (stop_after_steps > 0 && steps >= stop_after_steps) break;
        }
        return steps;
    }
};

double mirror_error(const ScalarField& f)
{
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int j = 0; j < g.n(1); ++j) {
        for (int i = 0; i < g.n(0) / 2; ++i) {
            worst = std::max(worst, std::abs(f.at(i, j) - f.at(g.n(0) - 1 - i, j)));
        }
    }
    return worst;
}

double row_spread(const ScalarField& f)
{
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int j = 0; j < g.n(1); ++j) {
        double lo = f.at(0, j), hi = lo;
        for (int i = 1; i < g.n(0); ++i) {
            lo = std::min(lo, f.at(i, j));
            hi = std::max(hi, f.at(i, j));
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

// ---------------------------------------------------------------------------

Result front_scalings()
{
    const RunConfig cfg = validation_front_config();
    const double y0 = cfg.scenario.y0;
    const double dy = (cfg.grid.hi[1] - cfg.grid.lo[1]) / cfg.grid.n[1];
    const double t_lo = cfg.fit_window->at(0), t_hi = cfg.fit_window->at(1);

    Simulation sim(cfg);
    std::vector<double> ts, wf, rt, rf;
    double worst_drift = 0.0;
    Driver{sim, [&](const Simulation& s) {
               const double t = s.state().t;
               if (t < t_lo || t > t_hi) return;
               const FrontMetrics fm = front_metrics(s.state());
               worst_drift = std::max(worst_drift, std::abs(fm.y_f - y0));
               ts.push_back(t);
               wf.push_back(fm.w_f);
               rt.push_back(fm.R_total);
               rf.push_back(fm.R_at_front);
           }}
        .go();

    const PowerLawFit fw = power_law_fit(ts, wf, t_lo, t_hi);
    const PowerLawFit ft = power_law_fit(ts, rt, t_lo, t_hi);
    const PowerLawFit ff = power_law_fit(ts, rf, t_lo, t_hi);
    const bool a = worst_drift <= 2.0 * dy;
    const bool b = std::abs(fw.exponent - 1.0 / 6.0) <= 0.03;
    const bool c1 = std::abs(ft.exponent + 2.0 / 3.0) <= 0.05;
    const bool c2 = std::abs(ff.exponent + 2.0 / 3.0) <= 0.05;
    return {a && b && c1 && c2,
        format("(a) max|y_f-y0| = %.3g (<= %.3g) %s; (b) w_f exponent %.4f (target 1/6 +- 0.03) %s; "
               "(c) R_total exponent %.4f %s, R(y_f) exponent %.4f %s (target -2/3 +- 0.05); window [%g, %g]",
            worst_drift, 2.0 * dy, a ? "ok" : "FAIL", fw.exponent, b ? "ok" : "FAIL", ft.exponent,
            c1 ? "ok" : "FAIL", ff.exponent, c2 ? "ok" : "FAIL", t_lo, t_hi)};
}

Result maximum_principle()
{
    bool pass = true;
    std::string detail;
    for (CaseId id : {CaseId::I, CaseId::II, CaseId::III, CaseId::IV, CaseId::V, CaseId::VI}) {
        RunConfig cfg = case_config(id);
        cfg.transport.limiter = Limiter::upwind1;
        cfg.t_end = 1000.0;
        Simulation sim(cfg);
        const SimState& s0 = sim.state();
        const double MA = max_value(s0.a.values()), MB = max_value(s0.b.values()), MC = max_value(s0.c.values());
        const PhysicalParams& p = cfg.params;
        const bool equal_d = p.d_A == p.d_B && p.d_B == p.d_C;
        double worst_min = 0.0, worst_excess = -1.0;
        bool ok = true;
        const std::uint64_t steps = Driver{sim, [&](const Simulation& sm) {
            const SimState& s = sm.state();
            const double lo = std::min(
                {min_value(s.a.values()), min_value(s.b.values()), min_value(s.c.values())});
            const double a_max = max_value(s.a.values()), b_max = max_value(s.b.values());
            const double c_max = max_value(s.c.values());
            double excess = std::max({a_max - MA, b_max - MB, c_max - (MC + p.k * MA * MB * s.t)});
            if (equal_d) {
                excess = std::max(excess, c_max - (MA + MB + 2.0 * MC) / 2.0);
            }
            worst_min = std::min(worst_min, lo);
            worst_excess = std::max(worst_excess, excess);
            ok = ok && lo >= -1e-12 && excess <= 1e-10;
        },
            {}, 500}
                                        .go();
        ok = ok && steps >= 500;
        pass = pass && ok;
        detail += format("%s%s: %llu steps, min %.2e, max excess %.2e%s", detail.empty() ? "" : "; ",
            to_string(id).data(), static_cast<unsigned long long>(steps), worst_min, worst_excess,
            ok ? "" : " FAIL");
    }
    return {pass, detail};
}

Result hydrostatic()
{
    RunConfig cfg = case_config(CaseId::II);
    cfg.scenario.perturb_amp = 0.0;
    cfg.t_end = 100.0;
    Simulation sim(cfg);
    const double limit = 10.0 * cfg.poisson.tol;
    double worst_u = 0.0, worst_spread = 0.0;
    const std::uint64_t steps = Driver{sim,
        [&](const Simulation& s) {
            worst_spread = std::max({worst_spread, row_spread(s.state().a), row_spread(s.state().b),
                row_spread(s.state().c)});
        },
        [&](const Simulation& s, const StepReport&) { worst_u = std::max(worst_u, max_abs(s.state().u)); }}
                                    .go();
    const bool pass = worst_u <= limit && worst_spread <= 1e-10;
    return {pass, format("%llu steps to t=%g: max|u| = %.2e (<= %.0e), max row spread = %.2e (<= 1e-10)",
                      static_cast<unsigned long long>(steps), cfg.t_end, worst_u, limit, worst_spread)};
}

Result symmetry()
{
    RunConfig cfg = case_config(CaseId::V);
    cfg.scenario.kind = ScenarioKind::ellipse;
    cfg.scenario.center = {0.0, 60.0, 0.0};
    cfg.scenario.x0 = 24.0;
    cfg.scenario.ysemi = 12.0;
    cfg.scenario.perturb_amp = 0.0;
    cfg.t_end = 1000.0;
    Simulation sim(cfg);
    double worst = 0.0;
    const std::uint64_t steps = Driver{sim, {},
        [&](const Simulation& s, const StepReport&) {
            worst = std::max({worst, mirror_error(s.state().a), mirror_error(s.state().b),
                mirror_error(s.state().c)});
        },
        250}
                                    .go();
    const double umax = max_abs(sim.state().u);
    const bool pass = steps >= 200 && worst <= 1e-10;
    return {pass, format("%llu steps to t=%.3g, max|f(x)-f(-x)| = %.2e (<= 1e-10), final max|u| = %.3g",
                      static_cast<unsigned long long>(steps), sim.state().t, worst, umax)};
}

Result mesh_convergence()
{
    RunConfig cfg;
    cfg.grid.lo = {-16.0, 0.0, 0.0};
    cfg.grid.hi = {16.0, 32.0, 1.0};
    apply(case_preset(CaseId::II), cfg.params);
    cfg.case_id = "II";
    cfg.scenario.kind = ScenarioKind::ellipse;
    cfg.scenario.center = {0.0, 16.0, 0.0};
    cfg.scenario.x0 = 8.0;
    cfg.scenario.ysemi = 4.0;
    cfg.t_end = 20.0;
    cfg.output_every = 1.0;
    cfg.ladder = LadderSpec{{1.0, 0.5, 0.25}, 5.0};
    const auto e = run_ladder(cfg);
    bool monotone = true;
    for (std::size_t i = 1; i < e.size(); ++i) {
        monotone = monotone && e[i].E_A <= e[i - 1].E_A && e[i].E_B <= e[i - 1].E_B && e[i].E_ml <= e[i - 1].E_ml;
    }
    const LadderEntry& fin = e[e.size() - 2];
    const bool small = fin.E_A <= 0.05 && fin.E_B <= 0.05 && fin.E_ml <= 0.05;
    std::string detail;
    for (const auto& x : e) {
        detail += format("h=%g: E_A %.3e E_B %.3e E_ml %.3e; ", x.h, x.E_A, x.E_B, x.E_ml);
    }
    detail += format("non-increasing %s, finest non-reference <= 5%% %s", monotone ? "ok" : "FAIL",
        small ? "ok" : "FAIL");
    return {monotone && small, detail};
}

double l2_difference(const SimState& x, const SimState& y)
{
    const Grid& g = x.a.grid();
    double vol = 1.0;
    for (int k = 0; k < g.dim(); ++k) vol *= g.h(k);
    double s = 0.0;
    auto add = [&s](std::span<const double> u, std::span<const double> v) {
        for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
    };
    add(x.a.values(), y.a.values());
    add(x.b.values(), y.b.values());
    add(x.c.values(), y.c.values());
    for (int k = 0; k < g.dim(); ++k) add(x.u.comp(k), y.u.comp(k));
    return std::sqrt(s * vol);
}

Result continuous_dependence()
{
    const double delta = 1e-6;
    RunConfig cfg = case_config(CaseId::II);
    cfg.grid.lo = {-32.0, 0.0, 0.0};
    cfg.grid.hi = {32.0, 64.0, 1.0};
    cfg.grid.n = {64, 64, 1};
    cfg.scenario.y0 = 32.0;
    cfg.scenario.perturb_amp = 0.0;
    cfg.t_end = 10.0;
    cfg.output_every = 0.5;

    Simulation base(cfg), twin(cfg);
    SimState bumped = base.state();
    {
        const Grid& g = bumped.a.grid();
        ScalarField phi(g);
        double norm = 0.0;
        for (int j = 0; j < g.n(1); ++j) {
            for (int i = 0; i < g.n(0); ++i) {
                const double x = g.center(0, i) - 4.0, y = g.center(1, j) - 36.0;
                phi.at(i, j) = std::exp(-(x * x + y * y) / 9.0);
                norm += phi.at(i, j) * phi.at(i, j) * g.h(0) * g.h(1);
            }
        }
        for (std::size_t i = 0; i < phi.size(); ++i) bumped.a[i] += delta * phi[i] / std::sqrt(norm);
    }
    const double d0 = l2_difference(bumped, base.state());
    Simulation other(cfg, bumped);

    std::vector<double> ts, ds;
    bool identical = true;
    const auto times = base.output_times();
    const Sums s0 = sums(base.state());
    for (double t : times) {
        for (Simulation* s : {&base, &twin, &other}) {
            s->advance_to(t, [&](const StepReport& r) {
                ++watch.steps;
                watch.worst_div_ratio = std::max(watch.worst_div_ratio, r.div_max / cfg.poisson.tol);
            });
        }
        watch.worst_drift = std::max(watch.worst_drift, drift(sums(base.state()), s0));
        identical = identical && bitwise_equal(base.state(), twin.state());
        ts.push_back(t);
        ds.push_back(l2_difference(base.state(), other.state()));
    }
    watch.runs += 3;

    // Exponential envelope d(t) ~ C exp(lambda t) by least squares on log d.
    const std::size_t n = ts.size();
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = std::log(ds[i]);
        st += ts[i];
        sl += l;
        stt += ts[i] * ts[i];
        stl += ts[i] * l;
    }
    const double nn = static_cast<double>(n);
    const double lambda = (nn * stl - st * sl) / (nn * stt - st * st);
    const double logc = (sl - lambda * st) / nn;
    double ss_res = 0, ss_tot = 0, worst_ratio = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = std::log(ds[i]);
        const double fit = logc + lambda * ts[i];
        ss_res += (l - fit) * (l - fit);
        ss_tot += (l - sl / nn) * (l - sl / nn);
        worst_ratio = std::max(worst_ratio, ds[i] / std::exp(fit));
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    const bool bounded = ds.back() <= 1e3 * delta;
    const bool envelope = r2 >= 0.9 && worst_ratio <= 2.0;
    return {bounded && envelope && identical,
        format("|diff(0)| = %.3e, |diff(t=%g)| = %.3e (<= %.0e) %s; envelope exp(%.3e t), r^2 = %.4f, "
               "max sample/envelope = %.3f %s; identical ICs bitwise equal %s",
            d0, ts.back(), ds.back(), 1e3 * delta, bounded ? "ok" : "FAIL", lambda, r2, worst_ratio,
            envelope ? "ok" : "FAIL", identical ? "ok" : "FAIL")};
}

Result oracles()
{
    bool pass = true;
    std::string detail;

    PoissonConfig pc;
    pc.tol = 1e-13;
    double worst = 0.0;
    int which = 0;
    for (auto [nx, ny] : {std::pair{4, 4}, std::pair{8, 8}, std::pair{5, 7}}) {
        GridSpec gs;
        gs.lo = {0.0, 0.0, 0.0};
        gs.hi = {1.0, 1.3, 1.0};
        gs.n = {nx, ny, 1};
        const Grid g = build_grid(gs);
        ScalarField rhs(g);
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            rhs[i] = std::sin(1.7 * static_cast<double>(i) + 0.3 * ++which);
        }
        const ScalarField oracle = testing::dense_neumann_solve(rhs);
        const ScalarField got = solve_poisson(rhs, pc).solution;
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - oracle[i]));
    }
    pass = pass && worst <= 1e-10;
    detail += format("poisson vs dense max diff %.2e (<= 1e-10)", worst);

    {
        GridSpec gs;
        gs.lo = {0.0, 0.0, 0.0};
        gs.hi = {4.0, 4.0, 1.0};
        gs.n = {4, 4, 1};
        const Grid g = build_grid(gs);
        SimState s = make_state(ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g));
        PhysicalParams p;
        TransportConfig tc;
        const double dt = 0.01;
        for (int n = 0; n < 100; ++n) {
            Concentrations next = step_transport(s, dt, p, tc);
            s.a = std::move(next.a);
            s.b = std::move(next.b);
            s.c = std::move(next.c);
            s.t += dt;
        }
        const double exact = 1.0 / (1.0 + 1.0);
        const double rel = std::abs(s.a[0] - exact) / exact;
        pass = pass && rel <= 0.01;
        detail += format("; reaction a(1) = %.5f vs %.5f, rel %.2e (<= 1%%)", s.a[0], exact, rel);
    }
    {
        GridSpec gs;
        gs.lo = {0.0, 0.0, 0.0};
        // Coarse cells so viscous exchange with neighbours is negligible.
        gs.hi = {600.0, 600.0, 1.0};
        gs.n = {6, 6, 1};
        const Grid g = build_grid(gs);
        SimState s = make_state(ScalarField(g), ScalarField(g), ScalarField(g));
        s.u.at(0, 3, 2) = 1.0;
        PhysicalParams p;
        for (int n = 0; n < 100; ++n) s.u = momentum_predict(s, 0.01, p);
        const double exact = std::exp(-p.mu * 1.0);
        const double rel = std::abs(s.u.at(0, 3, 2) - exact) / exact;
        pass = pass && rel <= 0.02;
        detail += format("; drag u(1) = %.5f vs %.5f, rel %.2e (<= 2%%)", s.u.at(0, 3, 2), exact, rel);
    }
    return {pass, detail};
}

Result fingering()
{
    auto setup = [](CaseId id) {
        RunConfig cfg = case_config(id);
        cfg.grid.lo = {-96.0, 0.0, 0.0};
        cfg.grid.hi = {96.0, 192.0, 1.0};
        cfg.grid.n = {192, 192, 1};
        cfg.params.d_A = cfg.params.d_B = cfg.params.d_C = 0.01;
        cfg.scenario.y0 = 128.0;
        cfg.scenario.perturb_amp = 1e-3;
        cfg.t_end = 300.0;
        cfg.output_every = 10.0;
        return cfg;
    };
    const double t_ref = 100.0;
    struct Track {
        double ml_ref = 0.0, ml_max = 0.0, t_cross = -1.0;
    };
    auto track = [&](CaseId id) {
        const RunConfig cfg = setup(id);
        Simulation sim(cfg);
        Track tr;
        std::vector<std::pair<double, double>> series;
        Driver{sim, [&](const Simulation& s) { series.emplace_back(s.state().t, mixing_length(s.state().c, cfg.ml_threshold)); }}
            .go();
        for (auto [t, ml] : series) {
            if (t <= t_ref + 1e-9) tr.ml_ref = ml;
        }
        for (auto [t, ml] : series) {
            if (t < t_ref) continue;
            tr.ml_max = std::max(tr.ml_max, ml);
            if (tr.t_cross < 0.0 && ml > 3.0 * tr.ml_ref) tr.t_cross = t;
        }
        return tr;
    };
    const Track v = track(CaseId::V);
    const Track ii = track(CaseId::II);
    const bool v_fingers = v.ml_max > 3.0 * v.ml_ref;
    const bool ii_flat = ii.ml_max <= 3.0 * ii.ml_ref;
    return {v_fingers && ii_flat,
        format("interface thickness = ml(t=%g); V: %.3g -> max %.3g (x%.2f, crosses 3x at t=%g) %s; "
               "II: %.3g -> max %.3g (x%.2f) %s",
            t_ref, v.ml_ref, v.ml_max, v.ml_max / v.ml_ref, v.t_cross, v_fingers ? "ok" : "FAIL", ii.ml_ref,
            ii.ml_max, ii.ml_max / ii.ml_ref, ii_flat ? "ok" : "FAIL")};
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

    struct Criterion {
        int number;
        const char* name;
        std::function<Result()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "front scalings", front_scalings},
        {2, "maximum principle", maximum_principle},
        {5, "hydrostatic exactness", hydrostatic},
        {6, "symmetry preservation", symmetry},
        {7, "mesh convergence", mesh_convergence},
        {8, "continuous dependence", continuous_dependence},
        {9, "oracle equivalence", oracles},
        {10, "fingering reproduction", fingering},
    };

    int failures = 0;
    auto report = [&](int number, const char* name, const Result& r, double seconds) {
        std::printf("criterion %2d %s: %s  [%.1fs] %s\n", number, r.pass ? "PASS" : "FAIL", name, seconds,
            r.detail.c_str());
        std::fflush(stdout);
        failures += r.pass ? 0 : 1;
    };
    for (const auto& c : criteria) {
        if (!wanted(c.number)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(c.number, c.name, r, secs);
    }
    // Criteria 3 and 4 aggregate every step taken by the runs above.
    if (watch.runs > 0) {
        if (wanted(3)) {
            report(3, "conservation",
                {watch.worst_drift <= 1e-10,
                    format("max relative drift of sum(a+c), sum(b+c), sum(a+b+2c) = %.2e (<= 1e-10) over %d runs",
                        watch.worst_drift, watch.runs)},
                0.0);
        }
        if (wanted(4)) {
            report(4, "discrete incompressibility",
                {watch.worst_div_ratio <= 10.0,
                    format("max|div u| / poisson tol = %.3f (<= 10) over %llu steps", watch.worst_div_ratio,
                        static_cast<unsigned long long>(watch.steps))},
                0.0);
        }
    } else if (wanted(3) || wanted(4)) {
        std::printf("criteria 3 and 4 need at least one simulation criterion selected\n");
        ++failures;
    }
    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
