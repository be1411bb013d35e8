#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <json.hpp>

#include "rdb/config.hpp"
#include "rdb/io.hpp"

namespace rdb {

/// Bounds used when the config leaves them out: the initial maxima.
BoundsSpec bounds_from_initial(const SimState& s, double T);

/// A configured run held in memory: state, parameters and the output clock.
class Simulation {
public:
    explicit Simulation(const RunConfig& cfg);
    /// Continues from `state` (e.g. a checkpoint); the grid must match the config.
    Simulation(const RunConfig& cfg, SimState state);

    const RunConfig& config() const { return cfg_; }
    const SimState& state() const { return state_; }
    SimState& state() { return state_; }
    const BoundsSpec& bounds() const { return bounds_; }

    StepReport step(double dt_cap = std::numeric_limits<double>::infinity());

    /// Steps until t == target exactly (the last step is shortened).
    void advance_to(double target, const std::function<void(const StepReport&)>& on_step = {});

    DiagnosticsRow diagnostics(double last_dt) const;

    /// Output times k * output_every up to t_end, plus t_end itself.
    std::vector<double> output_times() const;

private:
    RunConfig cfg_;
    StepConfig step_cfg_;
    SimState state_;
    BoundsSpec bounds_;
};

struct RunOptions {
    std::optional<std::filesystem::path> out_dir; ///< overrides cfg.out_dir
    std::optional<std::filesystem::path> resume;  ///< checkpoint to continue from
    bool write_files = true;
};

struct RunOutcome {
    int exit_code = 0; ///< 0 ok, 2 bound violation, 1 solver failure
    SimState final_state;
    std::vector<DiagnosticsRow> rows;
    double max_div = 0.0;
    std::uint64_t steps = 0;
    std::string failure; ///< empty unless exit_code == 1
    nlohmann::json summary;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBoundViolation = 2;

/// Runs the config from t = 0 (or the resume point) to t_end. With
/// write_files it owns out_dir: timeseries.csv, snapshots/, checkpoint.bin,
/// summary.json and, on solver failure, failure.json.
RunOutcome run(const RunConfig& cfg, const RunOptions& opts = {});

/// True for the pure reaction-diffusion setup (flat interface, no gravity).
bool is_front_validation(const RunConfig& cfg);

/// Power-law fits of w_f, R_total and R_at_front plus the largest front
/// drift |y_f - y0| inside the window.
nlohmann::json front_scaling_summary(const std::vector<DiagnosticsRow>& rows, double y0, double t_min, double t_max);

} // namespace rdb
