#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdb/flow.hpp"
#include "rdb/grid.hpp"
#include "rdb/model.hpp"
#include "rdb/scenarios.hpp"
#include "rdb/transport.hpp"

namespace rdb {

inline constexpr int kConfigVersion = 1;

enum class SnapshotFormat { vtk_binary, vtk_ascii, raw };

SnapshotFormat parse_snapshot_format(std::string_view name);
std::string_view to_string(SnapshotFormat f);

/// Mesh ladder section, only read by the `converge` subcommand.
struct LadderSpec {
    std::vector<double> h;  ///< coarse to fine; the last entry is the reference
    double t_min = 0.0;     ///< samples before t_min are left out of the error norms
};

struct RunConfig {
    GridSpec grid;
    PhysicalParams params;
    std::optional<std::string> case_id;
    ScenarioSpec scenario;
    TransportConfig transport;
    PoissonConfig poisson;
    double t_end = 1.0;
    double output_every = 1.0;
    double snapshot_every = 0.0; ///< 0 disables snapshots
    SnapshotFormat snapshot_format = SnapshotFormat::vtk_binary;
    /// Absent bounds are taken from the initial data (max of a0, b0, c0).
    std::optional<BoundsSpec> bounds;
    double ml_threshold = 0.01;
    /// Power-law window for the front-scaling summary; defaults to [t_end/4, t_end].
    std::optional<std::array<double, 2>> fit_window;
    std::optional<LadderSpec> ladder;
    bool deterministic = true;
    int threads = 1;
    std::string out_dir = "out";
};

/// Checks every nested invariant; throws ValidationError with a key path.
void validate(const RunConfig& cfg);

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

StepConfig step_config(const RunConfig& cfg);

/// Desk-scale preset for one of the six flat-interface cases.
RunConfig case_config(CaseId id);

/// The reaction-diffusion validation setup (no gravity, sharp flat front).
RunConfig validation_front_config();

} // namespace rdb
