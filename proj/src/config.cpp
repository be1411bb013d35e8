#include "rdb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rdb {

using nlohmann::json;

namespace {

// Strict view of one JSON object: every key read is recorded and finish()
// rejects whatever was not.
class Section {
public:
    Section(const json& j, std::string path)
        : j_(j)
        , path_(std::move(path))
    {
        if (!j_.is_object()) {
            fail(path_.empty() ? std::string("<root>") : path_, "must be an object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback)
    {
        const json* v = find(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_number()) {
            fail(key_path(key), "must be a number");
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) {
            fail(key_path(key), "must be finite");
        }
        return d;
    }

    long long integer(const std::string& key, long long fallback)
    {
        const json* v = find(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_number_integer()) {
            fail(key_path(key), "must be an integer");
        }
        return v->get<long long>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const json* v = find(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_boolean()) {
            fail(key_path(key), "must be true or false");
        }
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        const json* v = find(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_string()) {
            fail(key_path(key), "must be a string");
        }
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::size_t min_len, std::size_t max_len)
    {
        const json* v = find(key);
        if (v == nullptr) {
            fail(key_path(key), "is required");
        }
        if (!v->is_array() || v->size() < min_len || v->size() > max_len) {
            fail(key_path(key), "must be an array of " + std::to_string(min_len)
                    + (min_len == max_len ? "" : ".." + std::to_string(max_len)) + " numbers");
        }
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(key_path(key), "entries must be finite numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    Section child(const std::string& key)
    {
        const json* v = find(key);
        if (v == nullptr) {
            fail(key_path(key), "is required");
        }
        return Section(*v, key_path(key));
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (used_.count(it.key()) == 0) {
                fail(key_path(it.key()), "unknown key");
            }
        }
    }

    [[noreturn]] static void fail(const std::string& key, const std::string& what)
    {
        throw ValidationError(key + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

GridSpec parse_grid(Section s)
{
    GridSpec g;
    g.dim = static_cast<int>(s.integer("dim", 2));
    if (g.dim != 2 && g.dim != 3) {
        Section::fail("grid.dim", "must be 2 or 3");
    }
    const auto dims = static_cast<std::size_t>(g.dim);
    const auto lo = s.numbers("lo", dims, dims);
    const auto hi = s.numbers("hi", dims, dims);
    const auto n = s.numbers("n", dims, dims);
    for (std::size_t k = 0; k < dims; ++k) {
        g.lo[k] = lo[k];
        g.hi[k] = hi[k];
        if (n[k] != std::floor(n[k])) {
            Section::fail("grid.n", "entries must be integers");
        }
        g.n[k] = static_cast<int>(n[k]);
    }
    s.finish();
    build_grid(g);
    return g;
}

PhysicalParams parse_params(Section s, std::optional<std::string>& case_id, int dim)
{
    PhysicalParams p;
    if (dim == 3) {
        p.g = {0.0, -1.0, 0.0};
    }
    const std::string id = s.string("case", "");
    if (!id.empty()) {
        case_id = id;
        apply(case_preset(id), p);
        for (const char* key : {"R_A", "R_B", "R_C", "alpha"}) {
            if (s.has(key)) {
                Section::fail(s.key_path(key), "conflicts with params.case (the preset fixes it)");
            }
        }
    }
    p.mu = s.number("mu", p.mu);
    p.mu_e = s.number("mu_e", p.mu_e);
    p.alpha = s.number("alpha", p.alpha);
    p.R_A = s.number("R_A", p.R_A);
    p.R_B = s.number("R_B", p.R_B);
    p.R_C = s.number("R_C", p.R_C);
    const double d = s.number("d", 1.0);
    p.d_A = s.number("d_A", d);
    p.d_B = s.number("d_B", d);
    p.d_C = s.number("d_C", d);
    p.k = s.number("k", p.k);
    if (s.has("g")) {
        const auto g = s.numbers("g", static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
        p.g = {0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < g.size(); ++k) {
            p.g[k] = g[k];
        }
    }
    s.finish();
    validate(p);
    return p;
}

ScenarioSpec parse_scenario(Section s)
{
    ScenarioSpec sc;
    sc.kind = parse_scenario_kind(s.string("kind", "flat"));
    sc.alpha0 = s.number("alpha0", sc.alpha0);
    sc.beta0 = s.number("beta0", sc.beta0);
    sc.y0 = s.number("y0", sc.y0);
    sc.delta = s.number("delta", sc.delta);
    sc.x0 = s.number("x0", sc.x0);
    sc.ysemi = s.number("ysemi", sc.ysemi);
    sc.z0 = s.number("z0", sc.z0);
    if (s.has("center")) {
        const auto c = s.numbers("center", 2, 3);
        for (std::size_t k = 0; k < c.size(); ++k) {
            sc.center[k] = c[k];
        }
    }
    sc.perturb_amp = s.number("perturb_amp", sc.perturb_amp);
    const long long seed = s.integer("perturb_seed", 0);
    if (seed < 0) {
        Section::fail("scenario.perturb_seed", "must be >= 0");
    }
    sc.perturb_seed = static_cast<std::uint64_t>(seed);
    s.finish();
    validate(sc);
    return sc;
}

json array_of(const std::array<double, 3>& v, int dim)
{
    json a = json::array();
    for (int k = 0; k < dim; ++k) {
        a.push_back(v[static_cast<std::size_t>(k)]);
    }
    return a;
}

} // namespace

SnapshotFormat parse_snapshot_format(std::string_view name)
{
    if (name == "vtk-binary") return SnapshotFormat::vtk_binary;
    if (name == "vtk-ascii") return SnapshotFormat::vtk_ascii;
    if (name == "raw") return SnapshotFormat::raw;
    throw ValidationError("snapshot_format: unknown format '" + std::string(name)
        + "' (expected vtk-binary, vtk-ascii or raw)");
}

std::string_view to_string(SnapshotFormat f)
{
    switch (f) {
    case SnapshotFormat::vtk_binary: return "vtk-binary";
    case SnapshotFormat::vtk_ascii: return "vtk-ascii";
    case SnapshotFormat::raw: return "raw";
    }
    return "?";
}

void validate(const RunConfig& cfg)
{
    build_grid(cfg.grid);
    validate(cfg.params);
    validate(cfg.scenario);
    validate(cfg.transport);
    validate(cfg.poisson);
    if (!(cfg.t_end > 0.0)) {
        throw ValidationError("t_end: must be > 0");
    }
    if (!(cfg.output_every > 0.0)) {
        throw ValidationError("output_every: must be > 0");
    }
    if (!(cfg.snapshot_every >= 0.0)) {
        throw ValidationError("snapshot_every: must be >= 0 (0 disables snapshots)");
    }
    if (cfg.bounds) {
        validate(*cfg.bounds);
    }
    if (!(cfg.ml_threshold >= 0.0)) {
        throw ValidationError("ml_threshold: must be >= 0");
    }
    if (cfg.fit_window && !((*cfg.fit_window)[0] > 0.0 && (*cfg.fit_window)[0] < (*cfg.fit_window)[1])) {
        throw ValidationError("fit_window: need 0 < t_min < t_max");
    }
    if (cfg.ladder) {
        const auto& h = cfg.ladder->h;
        if (h.size() < 3) {
            throw ValidationError("ladder.h: need at least 3 resolutions");
        }
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (!(h[i] > 0.0)) {
                throw ValidationError("ladder.h: entries must be > 0");
            }
            if (i > 0 && h[i] > h[i - 1]) {
                throw ValidationError("ladder.h: must run from coarse to fine");
            }
        }
    }
    if (cfg.threads < 1) {
        throw ValidationError("threads: must be >= 1");
    }
    if (cfg.scenario.kind == ScenarioKind::ellipsoid && cfg.grid.dim != 3) {
        throw ValidationError("scenario.kind: ellipsoid needs grid.dim = 3");
    }
    if (cfg.scenario.kind == ScenarioKind::ellipse && cfg.grid.dim != 2) {
        throw ValidationError("scenario.kind: ellipse needs grid.dim = 2");
    }
}

RunConfig parse_config(const json& doc)
{
    Section root(doc, "");
    const long long version = root.integer("version", kConfigVersion);
    if (version != kConfigVersion) {
        Section::fail("version", "unsupported config version " + std::to_string(version));
    }

    RunConfig cfg;
    cfg.grid = parse_grid(root.child("grid"));
    if (root.has("params")) {
        cfg.params = parse_params(root.child("params"), cfg.case_id, cfg.grid.dim);
    } else if (cfg.grid.dim == 3) {
        cfg.params.g = {0.0, -1.0, 0.0};
    }
    if (root.has("scenario")) {
        cfg.scenario = parse_scenario(root.child("scenario"));
    }
    if (root.has("transport")) {
        Section t = root.child("transport");
        cfg.transport.limiter = parse_limiter(t.string("limiter", std::string(to_string(cfg.transport.limiter))));
        cfg.transport.cfl_safety = t.number("cfl_safety", cfg.transport.cfl_safety);
        cfg.transport.dt_max = t.number("dt_max", cfg.transport.dt_max);
        t.finish();
    }
    if (root.has("poisson")) {
        Section p = root.child("poisson");
        cfg.poisson.tol = p.number("tol", cfg.poisson.tol);
        cfg.poisson.max_iter = static_cast<int>(p.integer("max_iter", cfg.poisson.max_iter));
        p.finish();
    }
    cfg.t_end = root.number("t_end", cfg.t_end);
    cfg.output_every = root.number("output_every", cfg.output_every);
    cfg.snapshot_every = root.number("snapshot_every", cfg.snapshot_every);
    cfg.snapshot_format = parse_snapshot_format(root.string("snapshot_format", "vtk-binary"));
    if (root.has("bounds")) {
        Section b = root.child("bounds");
        BoundsSpec bs;
        bs.M_A = b.number("M_A", bs.M_A);
        bs.M_B = b.number("M_B", bs.M_B);
        bs.M_C = b.number("M_C", bs.M_C);
        bs.T = b.number("T", cfg.t_end);
        b.finish();
        cfg.bounds = bs;
    }
    cfg.ml_threshold = root.number("ml_threshold", cfg.ml_threshold);
    if (root.has("fit_window")) {
        const auto w = root.numbers("fit_window", 2, 2);
        cfg.fit_window = std::array<double, 2>{w[0], w[1]};
    }
    if (root.has("ladder")) {
        Section l = root.child("ladder");
        LadderSpec ls;
        ls.h = l.numbers("h", 1, 64);
        ls.t_min = l.number("t_min", 0.0);
        l.finish();
        cfg.ladder = ls;
    }
    cfg.deterministic = root.boolean("deterministic", cfg.deterministic);
    cfg.threads = static_cast<int>(root.integer("threads", cfg.threads));
    cfg.out_dir = root.string("out_dir", cfg.out_dir);
    root.finish();
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("config: cannot open '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config: parse error in '" + path.string() + "': " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& cfg)
{
    const int dim = cfg.grid.dim;
    json j;
    j["version"] = kConfigVersion;
    json n = json::array();
    for (int k = 0; k < dim; ++k) {
        n.push_back(cfg.grid.n[static_cast<std::size_t>(k)]);
    }
    j["grid"] = {{"dim", dim}, {"lo", array_of(cfg.grid.lo, dim)}, {"hi", array_of(cfg.grid.hi, dim)}, {"n", n}};

    const auto& p = cfg.params;
    json params = {{"mu", p.mu}, {"mu_e", p.mu_e}, {"d_A", p.d_A}, {"d_B", p.d_B}, {"d_C", p.d_C}, {"k", p.k},
        {"g", array_of(p.g, dim)}};
    if (cfg.case_id) {
        params["case"] = *cfg.case_id;
    } else {
        params["alpha"] = p.alpha;
        params["R_A"] = p.R_A;
        params["R_B"] = p.R_B;
        params["R_C"] = p.R_C;
    }
    j["params"] = params;

    const auto& s = cfg.scenario;
    j["scenario"] = {{"kind", std::string(to_string(s.kind))}, {"alpha0", s.alpha0}, {"beta0", s.beta0},
        {"y0", s.y0}, {"delta", s.delta}, {"x0", s.x0}, {"ysemi", s.ysemi}, {"z0", s.z0},
        {"center", array_of(s.center, 3)}, {"perturb_amp", s.perturb_amp}, {"perturb_seed", s.perturb_seed}};
    j["transport"] = {{"limiter", std::string(to_string(cfg.transport.limiter))},
        {"cfl_safety", cfg.transport.cfl_safety}, {"dt_max", cfg.transport.dt_max}};
    j["poisson"] = {{"tol", cfg.poisson.tol}, {"max_iter", cfg.poisson.max_iter}};
    j["t_end"] = cfg.t_end;
    j["output_every"] = cfg.output_every;
    j["snapshot_every"] = cfg.snapshot_every;
    j["snapshot_format"] = std::string(to_string(cfg.snapshot_format));
    if (cfg.bounds) {
        j["bounds"] = {{"M_A", cfg.bounds->M_A}, {"M_B", cfg.bounds->M_B}, {"M_C", cfg.bounds->M_C},
            {"T", cfg.bounds->T}};
    }
    j["ml_threshold"] = cfg.ml_threshold;
    if (cfg.fit_window) {
        j["fit_window"] = {(*cfg.fit_window)[0], (*cfg.fit_window)[1]};
    }
    if (cfg.ladder) {
        j["ladder"] = {{"h", cfg.ladder->h}, {"t_min", cfg.ladder->t_min}};
    }
    j["deterministic"] = cfg.deterministic;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    return j;
}

StepConfig step_config(const RunConfig& cfg)
{
    return StepConfig{cfg.transport, cfg.poisson};
}

RunConfig case_config(CaseId id)
{
    RunConfig cfg;
    cfg.grid.dim = 2;
    cfg.grid.lo = {-48.0, 0.0, 0.0};
    cfg.grid.hi = {48.0, 96.0, 1.0};
    cfg.grid.n = {96, 96, 1};
    cfg.case_id = std::string(to_string(id));
    apply(case_preset(id), cfg.params);
    cfg.scenario.kind = ScenarioKind::flat;
    cfg.scenario.y0 = 48.0;
    cfg.scenario.delta = 1e-5;
    cfg.scenario.perturb_amp = 1e-2;
    cfg.scenario.perturb_seed = 1;
    cfg.t_end = 100.0;
    cfg.output_every = 1.0;
    cfg.out_dir = "case_" + std::string(to_string(id));
    return cfg;
}

RunConfig validation_front_config()
{
    RunConfig cfg;
    cfg.grid.dim = 2;
    cfg.grid.lo = {-64.0, 0.0, 0.0};
    cfg.grid.hi = {64.0, 128.0, 1.0};
    cfg.grid.n = {128, 256, 1};
    cfg.params.g = {0.0, 0.0, 0.0};
    cfg.params.k = 1.0;
    cfg.scenario.kind = ScenarioKind::flat;
    cfg.scenario.y0 = 64.0;
    cfg.scenario.delta = 1e-5;
    cfg.transport.cfl_safety = 0.9;
    cfg.t_end = 300.0;
    cfg.output_every = 5.0;
    cfg.fit_window = std::array<double, 2>{50.0, 300.0};
    cfg.out_dir = "validate_front";
    return cfg;
}

} // namespace rdb
