// pbgsim: band-gap emitter dynamics and quantum-correlation simulator CLI.

#include <iostream>

#include <CLI11.hpp>

#include "pbg/scenario.hpp"

namespace {

pbg::RunConfig make_config(const std::string& config_path, const std::string& out_dir,
                           size_t stride) {
    pbg::RunConfig cfg;
    if (!config_path.empty()) cfg = pbg::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (stride > 0) cfg.stride = stride;
    return cfg;
}

void write_diagnostic(const std::string& out_dir, const std::string& what) {
    try {
        pbg::detail::atomic_write(std::filesystem::path(out_dir) / "diagnostic.txt",
                                  "numerical failure\n" + what + "\n");
    } catch (...) {
        // diagnostics are best effort
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-emitter photonic-band-gap reservoir simulator"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path, out_dir, preset_name, sweep_axis, plot_in, plot_out, plot_title;
    size_t stride = 0;
    size_t oracle_modes = 4000;
    std::vector<double> sweep_values;

    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--stride", stride, "time-series decimation stride");
    app.add_option("--oracle-modes", oracle_modes, "discretized-bath mode count for verify");

    auto* solve = app.add_subcommand("solve", "solve the amplitude equation, write trajectory CSV");
    auto* corr = app.add_subcommand("correlations", "amplitude + correlation time series");
    auto* bs = app.add_subcommand("bound-state", "bound-state existence, energy and residue");
    auto* preset = app.add_subcommand("preset", "run a figure preset");
    preset->add_option("name", preset_name, "one of fig2|fig3|fig4|fig4a")->required();
    auto* sweep = app.add_subcommand("sweep", "parameter sweep with plateau summary");
    sweep->add_option("--axis", sweep_axis, "omega0|eta|alpha")->required();
    sweep->add_option("--values", sweep_values, "sweep values")->required()->expected(-1);
    auto* verify = app.add_subcommand("verify", "compare the solver against the mode oracle");
    auto* plot = app.add_subcommand("plot", "render a CSV as an SVG line plot");
    plot->add_option("--in", plot_in, "input CSV")->required();
    plot->add_option("--svg", plot_out, "output SVG")->required();
    plot->add_option("--title", plot_title, "plot title");

    CLI11_PARSE(app, argc, argv);

    try {
        const pbg::RunConfig cfg = make_config(config_path, out_dir, stride);
        try {
            if (solve->parsed()) {
                for (const auto& f : pbg::run_solve(cfg).files) std::cout << f.string() << "\n";
            } else if (corr->parsed()) {
                for (const auto& f : pbg::run_correlations(cfg).files)
                    std::cout << f.string() << "\n";
            } else if (bs->parsed()) {
                const pbg::BoundStateResult r = pbg::find_bound_state(cfg.reservoir, cfg.emitter);
                std::cout << "exists=" << (r.exists ? "true" : "false");
                if (r.exists) std::cout << " E1=" << *r.E1 << " Z=" << *r.Z;
                std::cout << " y_at_edge=" << r.y_at_edge << "\n";
                pbg::run_bound_state(cfg);
            } else if (preset->parsed()) {
                for (const auto& f :
                     pbg::run_preset(preset_name, cfg.output_dir, std::max<size_t>(cfg.stride, 10)).files)
                    std::cout << f.string() << "\n";
            } else if (sweep->parsed()) {
                for (const auto& f : pbg::run_sweep(cfg, sweep_axis, sweep_values).files)
                    std::cout << f.string() << "\n";
            } else if (verify->parsed()) {
                const pbg::VerifyReport rep = pbg::run_verify(cfg, oracle_modes);
                std::cout << "max_abs_diff=" << rep.max_abs_diff
                          << " compared_up_to=" << rep.compared_up_to
                          << " recurrence_time=" << rep.recurrence
                          << " oracle_bound_state=" << (rep.oracle_bound_state ? "true" : "false")
                          << " oracle_overlap_sq=" << rep.oracle_overlap_sq << "\n";
            } else if (plot->parsed()) {
                pbg::emit_plot(plot_in, plot_out, plot_title);
                std::cout << plot_out << "\n";
            }
        } catch (const pbg::config_error&) {
            throw;
        } catch (const std::exception& ex) {
            std::cerr << "numerical failure: " << ex.what() << "\n";
            write_diagnostic(cfg.output_dir, ex.what());
            return 2;
        }
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
