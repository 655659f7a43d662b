#pragma once
// Figure presets, parameter sweeps, oracle verification, and plot emission.
// Every output file is written atomically (temp + rename) so concurrent
// sweep runs never interleave partial files.

#include <future>
#include <random>

#include "config.hpp"
#include "mode_oracle.hpp"
#include "svg.hpp"

namespace pbg {

namespace detail {

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp." + std::to_string(
        std::hash<std::string>{}(path.string() + content.substr(0, 64)));
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
    }
    fs::rename(tmp, path);
}

inline std::string num_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

// Mean of the final 10% window of a series (sweep plateau statistic).
inline double plateau_mean(const std::vector<double>& t, const std::vector<double>& v) {
    if (t.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double t0 = t.back() - 0.1 * (t.back() - t.front());
    double acc = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t0) {
            acc += v[i];
            ++n;
        }
    return acc / static_cast<double>(n);
}

struct RunOutputs {
    std::vector<std::filesystem::path> files;
};

inline AmplitudeTrajectory run_solve_pipeline(const RunConfig& cfg) {
    return derive_rates(solve_amplitude(cfg.reservoir, cfg.emitter, cfg.solver));
}

// `solve` subcommand: trajectory CSV plus the resolved config.
inline RunOutputs run_solve(const RunConfig& cfg, const std::string& tag = "solve") {
    namespace fs = std::filesystem;
    const AmplitudeTrajectory traj = run_solve_pipeline(cfg);
    std::ostringstream os;
    write_trajectory_csv(traj, os);
    RunOutputs out;
    const fs::path dir(cfg.output_dir);
    detail::atomic_write(dir / (tag + ".csv"), os.str());
    detail::atomic_write(dir / (tag + ".resolved.ini"), resolve_config(cfg));
    out.files = {dir / (tag + ".csv"), dir / (tag + ".resolved.ini")};
    return out;
}

inline RunOutputs run_correlations(const RunConfig& cfg, const std::string& tag = "correlations") {
    namespace fs = std::filesystem;
    const AmplitudeTrajectory traj = run_solve_pipeline(cfg);
    const auto recs =
        correlation_timeseries(traj, cfg.weights(), cfg.partitions, cfg.stride, cfg.discord_opt);
    std::ostringstream os;
    write_correlations_csv(recs, cfg.partitions, os);
    RunOutputs out;
    const fs::path dir(cfg.output_dir);
    detail::atomic_write(dir / (tag + ".csv"), os.str());
    detail::atomic_write(dir / (tag + ".resolved.ini"), resolve_config(cfg));
    out.files = {dir / (tag + ".csv"), dir / (tag + ".resolved.ini")};
    return out;
}

inline RunOutputs run_bound_state(const RunConfig& cfg, const std::string& tag = "bound_state") {
    namespace fs = std::filesystem;
    const BoundStateResult r = find_bound_state(cfg.reservoir, cfg.emitter);
    std::ostringstream os;
    os << "exists,E1,Z,y_at_edge,root_energy,root_weight\n"
       << (r.exists ? "true" : "false") << ','
       << (r.E1 ? detail::num_str(*r.E1) : std::string()) << ','
       << (r.Z ? detail::num_str(*r.Z) : std::string()) << ','
       << detail::num_str(r.y_at_edge) << ',' << detail::num_str(r.root_energy) << ','
       << detail::num_str(r.root_weight) << '\n';
    RunOutputs out;
    const fs::path dir(cfg.output_dir);
    detail::atomic_write(dir / (tag + ".csv"), os.str());
    out.files = {dir / (tag + ".csv")};
    return out;
}

// `verify` subcommand: continuum solver against the discretized-bath exact
// evolution; comparisons stay below half the bath recurrence time.
struct VerifyReport {
    double max_abs_diff = 0.0;
    double compared_up_to = 0.0;
    double recurrence = 0.0;
    bool oracle_bound_state = false;
    double oracle_overlap_sq = 0.0;
};

inline VerifyReport run_verify(const RunConfig& cfg, size_t n_modes) {
    const DiscretizedBath bath = discretize_bath(cfg.reservoir, n_modes);
    const AmplitudeTrajectory traj = solve_amplitude(cfg.reservoir, cfg.emitter, cfg.solver);
    const OracleTrajectory ot = evolve_exact(bath, cfg.emitter, traj.t);
    VerifyReport rep;
    rep.recurrence = ot.recurrence;
    const double t_lim = 0.5 * ot.recurrence;
    for (size_t i = 0; i < traj.t.size(); ++i) {
        if (traj.t[i] > t_lim) break;
        rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(traj.b[i] - ot.b[i]));
        rep.compared_up_to = traj.t[i];
    }
    const OverlapResult ov = bound_state_overlap(bath, cfg.emitter);
    rep.oracle_bound_state = ov.present;
    rep.oracle_overlap_sq = ov.overlap_sq;
    return rep;
}

// ---------------------------------------------------------------------------
// Scenario presets. All use eta = 0.2; time windows stay configurable.

inline RunConfig preset_base() {
    RunConfig cfg;
    cfg.reservoir.eta = 0.2;
    cfg.solver.dt = 0.01;
    cfg.solver.t_max = 50.0;
    return cfg;
}

inline const std::vector<double>& preset_alphas() {
    static const std::vector<double> a = {1.0 / std::sqrt(2.0), 0.2, 0.3};
    return a;
}

inline RunOutputs run_preset(const std::string& name, const std::string& out_dir,
                             size_t stride = 10) {
    namespace fs = std::filesystem;
    RunOutputs out;
    const fs::path dir(out_dir);

    if (name == "fig2") {
        // six panels: N1N2 correlations, alpha x omega_0
        for (double w0 : {0.1, 10.0}) {
            RunConfig cfg = preset_base();
            cfg.emitter.omega_0 = w0;
            cfg.output_dir = out_dir;
            cfg.stride = stride;
            const AmplitudeTrajectory traj = run_solve_pipeline(cfg);
            for (size_t ai = 0; ai < preset_alphas().size(); ++ai) {
                cfg.alpha = preset_alphas()[ai];
                const auto recs = correlation_timeseries(traj, cfg.weights(), {Partition::N1N2},
                                                         stride, cfg.discord_opt);
                std::ostringstream os;
                write_correlations_csv(recs, {Partition::N1N2}, os);
                const fs::path p =
                    dir / ("fig2_alpha" + std::to_string(ai + 1) + "_omega0_" +
                           detail::num_str(w0) + ".csv");
                detail::atomic_write(p, os.str());
                out.files.push_back(p);
            }
        }
        return out;
    }
    if (name == "fig3") {
        const std::vector<Partition> parts = {Partition::N1N2, Partition::R1R2, Partition::N1R1,
                                              Partition::N1R2};
        for (double w0 : {0.1, 10.0}) {
            RunConfig cfg = preset_base();
            cfg.emitter.omega_0 = w0;
            cfg.output_dir = out_dir;
            const AmplitudeTrajectory traj = run_solve_pipeline(cfg);
            for (size_t ai = 0; ai < 2; ++ai) { // alpha in {1/sqrt2, 0.2}
                cfg.alpha = preset_alphas()[ai];
                const auto recs =
                    correlation_timeseries(traj, cfg.weights(), parts, stride, cfg.discord_opt);
                std::ostringstream os;
                write_correlations_csv(recs, parts, os);
                const fs::path p = dir / ("fig3_alpha" + std::to_string(ai + 1) + "_omega0_" +
                                          detail::num_str(w0) + ".csv");
                detail::atomic_write(p, os.str());
                out.files.push_back(p);
            }
        }
        return out;
    }
    if (name == "fig4") {
        // excited-state populations for omega_0 in {0.1, 1, 2, 5, 10}
        std::ostringstream os;
        os << "t";
        std::vector<AmplitudeTrajectory> trajs;
        for (double w0 : {0.1, 1.0, 2.0, 5.0, 10.0}) {
            RunConfig cfg = preset_base();
            cfg.emitter.omega_0 = w0;
            trajs.push_back(solve_amplitude(cfg.reservoir, cfg.emitter, cfg.solver));
            os << ",pop_omega0_" << detail::num_str(w0);
        }
        os << "\n";
        for (size_t i = 0; i < trajs[0].t.size(); i += stride) {
            os << detail::num_str(trajs[0].t[i]);
            for (const auto& tr : trajs) os << ',' << detail::num_str(std::norm(tr.b[i]));
            os << "\n";
        }
        const fs::path p = dir / "fig4_populations.csv";
        detail::atomic_write(p, os.str());
        out.files.push_back(p);
        return out;
    }
    if (name == "fig4a") {
        RunConfig cfg = preset_base();
        std::vector<double> energies;
        for (int i = 0; i <= 400; ++i)
            energies.push_back(-2.0 + (static_cast<double>(i) / 400.0) *
                                          (cfg.reservoir.omega_c - 1e-3 + 2.0));
        std::ostringstream os;
        write_y_curves_csv(cfg.reservoir, {0.1, 1.0, 2.0, 5.0, 10.0}, energies, os);
        const fs::path p = dir / "fig4a_y_curves.csv";
        detail::atomic_write(p, os.str());
        out.files.push_back(p);
        return out;
    }
    throw config_error("unknown preset: " + name);
}

// ---------------------------------------------------------------------------
// Parameter sweeps: one run per value, executed concurrently; per-run
// failures are recorded in the summary and do not affect other runs.

struct SweepEntry {
    double value = 0.0;
    bool ok = false;
    std::string error;
    double plateau_pop = 0.0; // mean |b|^2 over the final 10% window
    double plateau_qd = 0.0;  // first requested partition
    double plateau_eof = 0.0;
};

inline SweepEntry sweep_one(RunConfig cfg, const std::string& axis, double value) {
    SweepEntry e;
    e.value = value;
    try {
        if (axis == "omega0") cfg.emitter.omega_0 = value;
        else if (axis == "eta") cfg.reservoir.eta = value;
        else if (axis == "alpha") cfg.alpha = value, cfg.beta.reset();
        else throw config_error("unknown sweep axis: " + axis);
        cfg.validate();
        const AmplitudeTrajectory traj = run_solve_pipeline(cfg);
        std::vector<double> pop(traj.b.size());
        for (size_t i = 0; i < traj.b.size(); ++i) pop[i] = std::norm(traj.b[i]);
        e.plateau_pop = plateau_mean(traj.t, pop);
        const auto recs = correlation_timeseries(traj, cfg.weights(), {cfg.partitions.front()},
                                                 std::max<size_t>(cfg.stride, 10), cfg.discord_opt);
        std::vector<double> ts, qd, ef;
        for (const auto& r : recs) {
            ts.push_back(r.t);
            qd.push_back(r.qd[0]);
            ef.push_back(r.eof[0]);
        }
        e.plateau_qd = plateau_mean(ts, qd);
        e.plateau_eof = plateau_mean(ts, ef);
        e.ok = true;
    } catch (const std::exception& ex) {
        e.error = ex.what();
    }
    return e;
}

inline RunOutputs run_sweep(const RunConfig& cfg, const std::string& axis,
                            const std::vector<double>& values) {
    namespace fs = std::filesystem;
    if (axis != "omega0" && axis != "eta" && axis != "alpha")
        throw config_error("unknown sweep axis: " + axis);
    std::vector<std::future<SweepEntry>> futs;
    futs.reserve(values.size());
    for (double v : values)
        futs.push_back(std::async(std::launch::async, sweep_one, cfg, axis, v));
    std::ostringstream os;
    os << axis << ",status,plateau_pop,plateau_qd_" << partition_name(cfg.partitions.front())
       << ",plateau_eof_" << partition_name(cfg.partitions.front()) << ",error\n";
    for (auto& f : futs) {
        const SweepEntry e = f.get();
        os << detail::num_str(e.value) << ',' << (e.ok ? "ok" : "failed") << ','
           << detail::num_str(e.plateau_pop) << ',' << detail::num_str(e.plateau_qd) << ','
           << detail::num_str(e.plateau_eof) << ",\"" << e.error << "\"\n";
    }
    RunOutputs out;
    const fs::path p = fs::path(cfg.output_dir) / ("sweep_" + axis + ".csv");
    detail::atomic_write(p, os.str());
    detail::atomic_write(fs::path(cfg.output_dir) / ("sweep_" + axis + ".resolved.ini"),
                         resolve_config(cfg));
    out.files = {p};
    return out;
}

// ---------------------------------------------------------------------------
// Plot emission: CSV -> SVG. The first column is the x axis; every other
// column becomes a labeled curve. Empty cells are skipped.

inline void emit_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path,
                      const std::string& title = "") {
    std::ifstream f(csv_path);
    if (!f) throw config_error("cannot open CSV: " + csv_path.string());
    std::string line;
    std::vector<std::string> header;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(detail::trim(cell));
        break;
    }
    if (header.size() < 2) throw config_error("CSV has no plottable columns: " + csv_path.string());
    std::vector<svg::Series> series(header.size() - 1);
    for (size_t i = 1; i < header.size(); ++i) series[i - 1].label = header[i];
    size_t rows = 0;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.empty()) continue;
        if (cells.size() > header.size())
            throw config_error("CSV row has more columns than the header: " + csv_path.string());
        const double x = std::stod(cells[0]);
        for (size_t i = 1; i < cells.size(); ++i)
            if (!detail::trim(cells[i]).empty())
                series[i - 1].points.emplace_back(x, std::stod(cells[i]));
        ++rows;
    }
    if (rows == 0) throw config_error("CSV has no data rows: " + csv_path.string());
    std::ostringstream os;
    svg::write_line_plot(os, title.empty() ? csv_path.stem().string() : title, header[0], "value",
                         series);
    detail::atomic_write(svg_path, os.str());
}

} // namespace pbg
