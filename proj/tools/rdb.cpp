#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rdb/config.hpp"
#include "rdb/convergence.hpp"
#include "rdb/runner.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    bool deterministic = false;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool config_required)
{
    auto* opt = sub->add_option("--config", c.config, "run-config JSON file");
    if (config_required) {
        opt->required()->check(CLI::ExistingFile);
    } else {
        opt->check(CLI::ExistingFile);
    }
    sub->add_option("--out", c.out, "output directory (overrides out_dir)");
    sub->add_flag("--deterministic", c.deterministic, "force deterministic mode (single thread)");
    sub->add_option("--threads", c.threads, "worker threads; 1 implies deterministic reductions")
        ->check(CLI::PositiveNumber);
}

void apply_common(rdb::RunConfig& cfg, const Common& c)
{
    if (!c.out.empty()) {
        cfg.out_dir = c.out;
    }
    if (c.threads > 0) {
        cfg.threads = c.threads;
    }
    if (c.deterministic) {
        cfg.deterministic = true;
    }
    if (cfg.deterministic) {
        cfg.threads = 1;
    }
#ifdef _OPENMP
    omp_set_num_threads(cfg.threads);
#endif
}

int report(const rdb::RunOutcome& r, const std::string& dir)
{
    std::printf("t = %.6g after %llu steps, max|div u| = %.3e\n", r.final_state.t,
        static_cast<unsigned long long>(r.final_state.step), r.max_div);
    if (r.summary.contains("front_scaling")) {
        const auto& fs = r.summary["front_scaling"];
        for (const char* k : {"w_f", "R_total", "R_at_front"}) {
            if (fs[k].contains("exponent")) {
                std::printf("%-10s exponent %+.4f (r^2 %.4f)\n", k, fs[k]["exponent"].get<double>(),
                    fs[k]["r_squared"].get<double>());
            }
        }
        std::printf("y_f drift  %.4g\n", fs["y_f_max_drift"].get<double>());
    }
    if (r.exit_code == rdb::kExitFailure) {
        std::fprintf(stderr, "run failed: %s (see %s/failure.json)\n", r.failure.c_str(), dir.c_str());
    } else if (r.exit_code == rdb::kExitBoundViolation) {
        std::fprintf(stderr, "bound violation beyond tolerance (see %s/summary.json)\n", dir.c_str());
    }
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reactive Darcy-Brinkman fingering simulator"};
    app.require_subcommand(1);

    Common run_opts, front_opts, conv_opts, resume_opts;
    std::string cases_out = "cases";
    std::string resume_path;

    auto* run_cmd = app.add_subcommand("run", "run a config to t_end");
    add_common(run_cmd, run_opts, true);

    auto* front_cmd = app.add_subcommand("validate-front", "reaction-diffusion front scaling study");
    add_common(front_cmd, front_opts, false);

    auto* conv_cmd = app.add_subcommand("converge", "mesh-refinement ladder (needs a ladder section)");
    add_common(conv_cmd, conv_opts, true);

    auto* cases_cmd = app.add_subcommand("cases", "write the six flat-interface case configs");
    cases_cmd->add_option("--out", cases_out, "directory for case_<id>.json");

    auto* resume_cmd = app.add_subcommand("resume", "continue a run from its checkpoint");
    add_common(resume_cmd, resume_opts, true);
    resume_cmd->add_option("--resume", resume_path, "checkpoint file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd || *resume_cmd) {
            const Common& c = *run_cmd ? run_opts : resume_opts;
            rdb::RunConfig cfg = rdb::load_config(c.config);
            apply_common(cfg, c);
            rdb::RunOptions opts;
            if (*resume_cmd) {
                opts.resume = resume_path;
            }
            return report(rdb::run(cfg, opts), cfg.out_dir);
        }
        if (*front_cmd) {
            rdb::RunConfig cfg = front_opts.config.empty() ? rdb::validation_front_config()
                                                           : rdb::load_config(front_opts.config);
            apply_common(cfg, front_opts);
            return report(rdb::run(cfg), cfg.out_dir);
        }
        if (*conv_cmd) {
            rdb::RunConfig cfg = rdb::load_config(conv_opts.config);
            apply_common(cfg, conv_opts);
            const auto entries = rdb::run_ladder(cfg);
            std::filesystem::create_directories(cfg.out_dir);
            const auto path = std::filesystem::path(cfg.out_dir) / "convergence.csv";
            rdb::write_convergence_csv(path, entries);
            for (const auto& e : entries) {
                std::printf("h = %-8g E_A = %.3e  E_B = %.3e  E_ml = %.3e  (%.2f s)\n", e.h, e.E_A, e.E_B, e.E_ml,
                    e.runtime_s);
            }
            std::printf("wrote %s\n", path.string().c_str());
            return 0;
        }
        if (*cases_cmd) {
            std::filesystem::create_directories(cases_out);
            for (auto id : {rdb::CaseId::I, rdb::CaseId::II, rdb::CaseId::III, rdb::CaseId::IV, rdb::CaseId::V,
                     rdb::CaseId::VI}) {
                const auto path
                    = std::filesystem::path(cases_out) / ("case_" + std::string(rdb::to_string(id)) + ".json");
                std::ofstream(path) << rdb::to_json(rdb::case_config(id)).dump(2) << '\n';
                std::printf("wrote %s\n", path.string().c_str());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
