#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "coadjoint/config.hpp"
#include "coadjoint/csv.hpp"
#include "coadjoint/diagnostics.hpp"
#include "coadjoint/integrators.hpp"
#include "coadjoint/models/heavy_top.hpp"
#include "coadjoint/models/sine_euler.hpp"
#include "coadjoint/selftest.hpp"
#include "coadjoint/version.hpp"

namespace coadjoint {

struct RunConfig {
    std::string model;  // heavy_top | sine_euler
    Method method = Method::Tmk;
    double dt = 0.0;
    double t_final = 0.0;
    std::uint64_t seed = 0;
    std::int64_t record_every = 1;
    std::string output_dir = "out";
    std::string replay_path;  // empty: draw increments from the seed
    StepperConfig stepper;
    HeavyTopParams top;
    SineEulerParams sine;
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string replay;
};

namespace detail {

inline int require_small_int(const std::string& what, double v) {
    const double r = std::nearbyint(v);
    if (v != r || std::abs(v) > 1e6)
        throw ConfigError(what + ": expected integer, got " + format_double(v));
    return int(r);
}

}  // namespace detail

inline RunConfig resolve_run_config(const Config& cfg, const CliOverrides& ov = {}) {
    cfg.check_known({{"run", "model"},
                     {"run", "method"},
                     {"run", "dt"},
                     {"run", "t_final"},
                     {"run", "seed"},
                     {"run", "record_every"},
                     {"run", "output_dir"},
                     {"run", "replay"},
                     {"run", "chord_tol"},
                     {"run", "chord_max_iter"},
                     {"run", "dexpinv_order"},
                     {"heavy_top", "inertia"},
                     {"heavy_top", "chi"},
                     {"heavy_top", "alpha"},
                     {"heavy_top", "pi0"},
                     {"heavy_top", "gamma0"},
                     {"sine_euler", "n_trunc"},
                     {"sine_euler", "noise_mode"},
                     {"sine_euler", "init_seed"},
                     {"sine_euler", "init_mode"}});

    RunConfig rc;
    rc.model = cfg.get_string("run", "model");
    if (rc.model != "heavy_top" && rc.model != "sine_euler")
        throw ConfigError("config key [run] model: expected heavy_top or sine_euler, got '" +
                          rc.model + "'");
    try {
        rc.method = parse_method(cfg.get_string("run", "method", "tmk"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    rc.dt = cfg.get_double("run", "dt");
    rc.t_final = cfg.get_double("run", "t_final");
    if (!(rc.dt > 0.0) || !std::isfinite(rc.dt)) throw ConfigError("[run] dt must be positive");
    if (!(rc.t_final > 0.0) || !std::isfinite(rc.t_final))
        throw ConfigError("[run] t_final must be positive");
    rc.seed = cfg.get_u64("run", "seed", 0);
    rc.record_every = cfg.get_i64("run", "record_every", 1);
    if (rc.record_every < 1) throw ConfigError("[run] record_every must be >= 1");
    rc.output_dir = cfg.get_string("run", "output_dir", "out");
    rc.replay_path = cfg.get_string("run", "replay", "");
    rc.stepper.method = rc.method;
    rc.stepper.chord_tol = cfg.get_double("run", "chord_tol", rc.stepper.chord_tol);
    rc.stepper.chord_max_iter = int(cfg.get_i64("run", "chord_max_iter", rc.stepper.chord_max_iter));
    rc.stepper.dexpinv_order = int(cfg.get_i64("run", "dexpinv_order", rc.stepper.dexpinv_order));
    try {
        rc.stepper.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (rc.model == "heavy_top") {
        auto vec3 = [&](const char* key, const Vec& fallback) {
            Vec v = cfg.get_vec("heavy_top", key, fallback);
            if (v.size() != 3)
                throw ConfigError(std::string("[heavy_top] ") + key + ": expected 3 numbers");
            return v;
        };
        rc.top.inertia = vec3("inertia", rc.top.inertia);
        rc.top.chi = vec3("chi", rc.top.chi);
        rc.top.alpha = vec3("alpha", rc.top.alpha);
        rc.top.pi0 = vec3("pi0", rc.top.pi0);
        rc.top.gamma0 = vec3("gamma0", rc.top.gamma0);
    } else {
        rc.sine.n_trunc = int(cfg.get_i64("sine_euler", "n_trunc", rc.sine.n_trunc));
        const auto noise_lines = cfg.get_all("sine_euler", "noise_mode");
        if (!noise_lines.empty()) {
            rc.sine.noise_modes.clear();
            if (!(noise_lines.size() == 1 && noise_lines[0] == "none"))
                for (const auto& line : noise_lines) {
                    const Vec v = cfg.split_doubles("sine_euler", "noise_mode", line);
                    if (v.size() != 3)
                        throw ConfigError("[sine_euler] noise_mode: expected 'm1 m2 amplitude'");
                    rc.sine.noise_modes.push_back(
                        {detail::require_small_int("[sine_euler] noise_mode m1", v[0]),
                         detail::require_small_int("[sine_euler] noise_mode m2", v[1]), v[2]});
                }
        }
        rc.sine.init.clear();
        if (cfg.has("sine_euler", "init_seed"))
            rc.sine.init = uniform_mode_init(cfg.get_u64("sine_euler", "init_seed", 0), rc.sine.n_trunc);
        for (const auto& line : cfg.get_all("sine_euler", "init_mode")) {
            const Vec v = cfg.split_doubles("sine_euler", "init_mode", line);
            if (v.size() != 3)
                throw ConfigError("[sine_euler] init_mode: expected 'm1 m2 value'");
            const int m1 = detail::require_small_int("[sine_euler] init_mode m1", v[0]);
            const int m2 = detail::require_small_int("[sine_euler] init_mode m2", v[1]);
            const int r1 = detail::lattice_rep(m1, rc.sine.n_trunc);
            const int r2 = detail::lattice_rep(m2, rc.sine.n_trunc);
            const auto key = detail::mode_positive(r1, r2) ? std::pair<int, int>{r1, r2}
                                                           : std::pair<int, int>{-r1, -r2};
            rc.sine.init[key] = v[2];
        }
    }

    if (ov.seed) rc.seed = *ov.seed;
    if (!ov.out.empty()) rc.output_dir = ov.out;
    if (!ov.replay.empty()) rc.replay_path = ov.replay;
    return rc;
}

inline RunConfig load_run_config(const std::string& path, const CliOverrides& ov = {}) {
    return resolve_run_config(Config::parse_file(path), ov);
}

inline LiePoissonSystem build_system(const RunConfig& rc) {
    try {
        if (rc.model == "heavy_top") return build_heavy_top(rc.top);
        return build_sine_euler(rc.sine);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline TimeGrid make_grid(const RunConfig& rc) {
    const double ratio = rc.t_final / rc.dt;
    const auto steps = std::int64_t(std::llround(ratio));
    if (steps < 1 || std::abs(double(steps) * rc.dt - rc.t_final) > 1e-6 * std::max(1.0, rc.t_final))
        throw ConfigError("t_final must be a whole number of dt steps");
    return TimeGrid{0.0, rc.dt, steps};
}

// Resolved-config echo, reloadable as a config file; the version string and
// invocation ride along as comments.
inline void write_manifest(const std::filesystem::path& path, const RunConfig& rc,
                           const std::string& command, const std::vector<std::string>& extras) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "# coadjoint " << version_string << "\n";
    out << "# command: " << command << "\n";
    for (const auto& e : extras) out << "# " << e << "\n";
    out << "[run]\n";
    out << "model = " << rc.model << "\n";
    out << "method = " << to_string(rc.method) << "\n";
    out << "dt = " << format_double(rc.dt) << "\n";
    out << "t_final = " << format_double(rc.t_final) << "\n";
    out << "seed = " << rc.seed << "\n";
    out << "record_every = " << rc.record_every << "\n";
    out << "output_dir = " << rc.output_dir << "\n";
    if (!rc.replay_path.empty()) out << "replay = " << rc.replay_path << "\n";
    out << "chord_tol = " << format_double(rc.stepper.chord_tol) << "\n";
    out << "chord_max_iter = " << rc.stepper.chord_max_iter << "\n";
    out << "dexpinv_order = " << rc.stepper.dexpinv_order << "\n";
    if (rc.model == "heavy_top") {
        auto line = [&](const char* key, const Vec& v) {
            out << key << " = " << format_double(v[0]) << ' ' << format_double(v[1]) << ' '
                << format_double(v[2]) << "\n";
        };
        out << "[heavy_top]\n";
        line("inertia", rc.top.inertia);
        line("chi", rc.top.chi);
        line("alpha", rc.top.alpha);
        line("pi0", rc.top.pi0);
        line("gamma0", rc.top.gamma0);
    } else {
        out << "[sine_euler]\n";
        out << "n_trunc = " << rc.sine.n_trunc << "\n";
        if (rc.sine.noise_modes.empty()) out << "noise_mode = none\n";
        for (const auto& nm : rc.sine.noise_modes)
            out << "noise_mode = " << nm.m1 << ' ' << nm.m2 << ' ' << format_double(nm.amp) << "\n";
        for (const auto& [mode, val] : rc.sine.init)
            out << "init_mode = " << mode.first << ' ' << mode.second << ' ' << format_double(val)
                << "\n";
    }
}

namespace detail {

inline WienerPath make_path(const RunConfig& rc, int m, const TimeGrid& grid) {
    if (rc.replay_path.empty()) return generate(rc.seed, m, grid);
    return read_wiener_csv(rc.replay_path, m, grid);
}

inline double max_drift(const Trajectory& traj) {
    double worst = 0.0;
    for (const auto& [name, series] : drift_series(traj))
        for (double v : series) worst = std::max(worst, v);
    return worst;
}

}  // namespace detail

inline int cmd_run(const RunConfig& rc, std::ostream& log) {
    const LiePoissonSystem sys = build_system(rc);
    const TimeGrid grid = make_grid(rc);
    const int m = sys.hamiltonian.num_drivers();
    const WienerPath path = detail::make_path(rc, m, grid);
    const Trajectory traj =
        integrate(sys.algebra, sys.hamiltonian, sys.mu0, grid, path, rc.stepper, &sys.casimirs);
    const std::filesystem::path dir(rc.output_dir);
    std::filesystem::create_directories(dir);
    write_trajectory_csv(dir / "trajectory.csv", traj, sys.algebra.coord_names(), rc.record_every);
    write_meta_csv(dir / "meta.csv", traj);
    write_drift_csv(dir / "drift.csv", traj);
    if (m > 0) write_wiener_csv(dir / "wiener.csv", path);
    write_manifest(dir / "manifest.cfg", rc, "run", {});
    log << "run: " << grid.steps << " steps of " << to_string(rc.method) << " on " << rc.model
        << ", max casimir drift " << format_double(detail::max_drift(traj)) << ", wrote "
        << dir.string() << "\n";
    return 0;
}

inline int cmd_compare(const RunConfig& rc, const std::vector<Method>& methods, std::ostream& log) {
    if (methods.empty()) throw ConfigError("compare: provide at least one method");
    const LiePoissonSystem sys = build_system(rc);
    const TimeGrid grid = make_grid(rc);
    const int m = sys.hamiltonian.num_drivers();
    for (Method mth : methods)
        if (mth == Method::DeterministicRkmk && m > 0)
            throw ConfigError("compare: rkmk is deterministic, drop the noise terms first");
    const WienerPath path = detail::make_path(rc, m, grid);

    std::vector<std::string> names;
    std::vector<Vec> columns;
    Vec times;
    std::vector<std::string> method_list;
    for (Method mth : methods) {
        StepperConfig cfg = rc.stepper;
        cfg.method = mth;
        const Trajectory traj =
            integrate(sys.algebra, sys.hamiltonian, sys.mu0, grid, path, cfg, &sys.casimirs);
        if (times.empty()) times = traj.times;
        for (auto& [cname, series] : drift_series(traj)) {
            names.push_back(std::string(to_string(mth)) + "_" + cname);
            columns.push_back(std::move(series));
        }
        method_list.push_back(to_string(mth));
        log << "compare: " << to_string(mth) << " max casimir drift "
            << format_double(detail::max_drift(traj)) << "\n";
    }
    const std::filesystem::path dir(rc.output_dir);
    std::filesystem::create_directories(dir);
    write_compare_csv(dir / "compare.csv", times, names, columns);
    if (m > 0) write_wiener_csv(dir / "wiener.csv", path);
    std::string joined;
    for (const auto& s : method_list) joined += (joined.empty() ? "" : ",") + s;
    write_manifest(dir / "manifest.cfg", rc, "compare", {"methods: " + joined});
    log << "compare: wrote " << (dir / "compare.csv").string() << "\n";
    return 0;
}

inline int cmd_converge(const RunConfig& rc, int levels, int n_seeds, std::ostream& log,
                        std::ostream& warn) {
    if (levels < 2) throw ConfigError("converge: need at least 2 levels");
    if (n_seeds < 1) throw ConfigError("converge: need at least 1 seed");
    if (n_seeds < 2 || levels < 3)
        warn << "converge: degenerate fit (" << n_seeds << " seeds, " << levels << " levels)\n";
    if (!rc.replay_path.empty())
        throw ConfigError("converge: refinement draws fresh bridge noise, --replay is not supported");
    const LiePoissonSystem sys = build_system(rc);
    const TimeGrid base_grid = make_grid(rc);
    Vec dt_levels;
    for (int k = 0; k < levels; ++k) dt_levels.push_back(std::ldexp(rc.dt, -k));
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < n_seeds; ++s) seeds.push_back(rc.seed + std::uint64_t(s));
    const OrderFit fit = strong_order(sys.algebra, sys.hamiltonian, sys.mu0, base_grid, seeds,
                                      dt_levels, rc.stepper);
    for (const auto& w : fit.warnings) warn << "converge: " << w << "\n";
    const std::filesystem::path dir(rc.output_dir);
    std::filesystem::create_directories(dir);
    write_order_fit_csv(dir / "order_fit.csv", fit);
    write_manifest(dir / "manifest.cfg", rc, "converge",
                   {"levels: " + std::to_string(levels), "seeds: " + std::to_string(n_seeds)});
    log << "converge: fitted slope " << format_double(fit.slope) << " from " << fit.n_samples
        << " samples, wrote " << (dir / "order_fit.csv").string() << "\n";
    return 0;
}

inline int cmd_probe(const RunConfig& rc, const Vec& dts, std::ostream& log) {
    if (dts.empty()) throw ConfigError("probe: provide --dts");
    const LiePoissonSystem sys = build_system(rc);
    const StabilityReport report =
        stability_probe(sys.algebra, sys.hamiltonian, sys.mu0, dts, rc.t_final, rc.seed, rc.stepper);
    for (const auto& [dt, verdict] : report.verdicts)
        log << "probe: dt " << format_double(dt) << " -> " << to_string(verdict) << "\n";
    if (report.largest_stable_dt > 0.0)
        log << "probe: largest stable dt " << format_double(report.largest_stable_dt) << "\n";
    else
        log << "probe: no stable dt in the list\n";
    const std::filesystem::path dir(rc.output_dir);
    std::filesystem::create_directories(dir);
    write_stability_csv(dir / "stability.csv", report);
    std::string joined;
    for (double dt : dts) joined += (joined.empty() ? "" : ",") + format_double(dt);
    write_manifest(dir / "manifest.cfg", rc, "probe", {"dts: " + joined});
    return 0;
}

inline int cmd_selftest(std::ostream& log) {
    bool all = true;
    for (const SelfCheck& c : run_selftests()) {
        log << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
        all = all && c.pass;
    }
    log << (all ? "selftest: all checks passed\n" : "selftest: FAILURES above\n");
    return all ? 0 : 1;
}

}  // namespace coadjoint
