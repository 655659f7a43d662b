#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pbg/scenario.hpp"

using namespace pbg;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("pbgsim_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

RunConfig quick_config(const fs::path& dir) {
    RunConfig cfg;
    cfg.solver.dt = 0.02;
    cfg.solver.t_max = 2.0;
    cfg.emitter.omega_0 = 0.1;
    cfg.stride = 10;
    cfg.output_dir = dir.string();
    return cfg;
}

}  // namespace

TEST_CASE("config parses a complete file and rejects garbage") {
    std::istringstream is(R"(
# run settings
[emitter]
omega0 = 0.5

[reservoir]
eta = 0.15
k_max = 8 ; trailing comment

[solver]
dt = 0.02
t_max = 3
kernel_mode = band-edge
convergence_check = false

[initial]
alpha = 0.3

[correlations]
partitions = n1n2, r1r2
discord_grid = 32
measured_side = A
stride = 4

[output]
directory = /tmp/x
)");
    const RunConfig cfg = parse_config(is, "test.ini");
    CHECK(cfg.emitter.omega_0 == 0.5);
    CHECK(cfg.reservoir.eta == 0.15);
    CHECK(cfg.reservoir.k_max == 8.0);
    CHECK(cfg.solver.kernel_mode == KernelMode::band_edge);
    CHECK_FALSE(cfg.solver.convergence_check);
    CHECK(cfg.alpha == complexd(0.3, 0.0));
    REQUIRE(cfg.partitions.size() == 2);
    CHECK(cfg.partitions[1] == Partition::R1R2);
    CHECK(cfg.discord_opt.grid == 32);
    CHECK(cfg.discord_opt.side == MeasuredSide::A);
    CHECK(cfg.stride == 4);
    CHECK(cfg.output_dir == "/tmp/x");

    auto reject = [](const std::string& text) {
        std::istringstream bad(text);
        CHECK_THROWS_AS(parse_config(bad), config_error);
    };
    reject("[emitter]\nomega_zero = 1\n");        // unknown key
    reject("[thermostat]\n");                      // unknown section
    reject("[emitter]\nomega0 = fast\n");          // non-numeric value
    reject("[solver]\nkernel_mode = exact\n");     // unknown enum value
    reject("[emitter]\nomega0\n");                 // missing '='
    reject("[correlations]\npartitions = n1n3\n"); // bad partition
}

TEST_CASE("resolved config round-trips exactly") {
    RunConfig cfg;
    cfg.emitter.omega_0 = 0.7;
    cfg.reservoir.eta = 0.05;
    cfg.solver.dt = 0.013;
    cfg.alpha = complexd(0.4, 0.1);
    cfg.partitions = {Partition::N1R2, Partition::R1R2};
    cfg.stride = 7;
    const std::string text = resolve_config(cfg);
    std::istringstream is(text);
    const RunConfig back = parse_config(is);
    CHECK(resolve_config(back) == text);
    CHECK(back.emitter.omega_0 == cfg.emitter.omega_0);
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.partitions == cfg.partitions);
    CHECK(back.stride == cfg.stride);
}

TEST_CASE("plateau mean averages the final tenth") {
    std::vector<double> t, v;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(i);
        v.push_back(i < 90 ? 0.0 : 1.0);
    }
    CHECK(plateau_mean(t, v) == Approx(1.0).margin(1e-12));
    CHECK(std::isnan(plateau_mean({}, {})));
}

TEST_CASE("run_solve writes trajectory and resolved config") {
    TempDir td;
    const auto out = run_solve(quick_config(td.path), "traj");
    REQUIRE(out.files.size() == 2);
    CHECK(fs::exists(td.path / "traj.csv"));
    CHECK(fs::exists(td.path / "traj.resolved.ini"));
    const std::string csv = slurp(td.path / "traj.csv");
    CHECK(csv.rfind("t,re_b,im_b,pop,omega_shift,gamma_rate", 0) == 0);
    // re-running produces byte-identical output
    run_solve(quick_config(td.path), "traj");
    CHECK(slurp(td.path / "traj.csv") == csv);
}

TEST_CASE("run_correlations and run_bound_state write their CSVs") {
    TempDir td;
    auto cfg = quick_config(td.path);
    cfg.partitions = {Partition::N1N2};
    run_correlations(cfg, "corr");
    const std::string corr = slurp(td.path / "corr.csv");
    CHECK(corr.rfind("t,qd_n1n2,eof_n1n2,mi_n1n2", 0) == 0);

    run_bound_state(cfg, "bs");
    const std::string bs = slurp(td.path / "bs.csv");
    CHECK(bs.rfind("exists,E1,Z,y_at_edge,root_energy,root_weight", 0) == 0);
    CHECK(bs.find("true") != std::string::npos);
}

TEST_CASE("verify agrees with the oracle inside the recurrence window") {
    auto cfg = quick_config("unused");
    cfg.solver.dt = 0.01;
    cfg.solver.t_max = 10.0;
    const VerifyReport rep = run_verify(cfg, 1500);
    CHECK(rep.recurrence > 20.0);
    CHECK(rep.compared_up_to == Approx(10.0).margin(0.011));
    CHECK(rep.max_abs_diff < 5e-3);
    CHECK(rep.oracle_bound_state);
}

TEST_CASE("sweep records per-value results and isolates failures") {
    TempDir td;
    auto cfg = quick_config(td.path);
    const auto out = run_sweep(cfg, "alpha", {0.2, 0.7, 1.5}); // 1.5 is invalid
    const std::string csv = slurp(out.files[0]);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "alpha,status,plateau_pop,plateau_qd_n1n2,plateau_eof_n1n2,error");
    size_t ok = 0, failed = 0;
    while (std::getline(is, line)) {
        if (line.find(",ok,") != std::string::npos) ++ok;
        if (line.find(",failed,") != std::string::npos) ++failed;
    }
    CHECK(ok == 2);
    CHECK(failed == 1);

    CHECK_THROWS_AS(run_sweep(cfg, "bogus_axis", {1.0}).files.empty(), config_error);
}

TEST_CASE("preset fig4a emits the y-curve file, unknown preset throws") {
    TempDir td;
    const auto out = run_preset("fig4a", td.path.string());
    REQUIRE(out.files.size() == 1);
    const std::string csv = slurp(out.files[0]);
    CHECK(csv.rfind("E,y_minus_E_omega0_0.1", 0) == 0);
    CHECK_THROWS_AS(run_preset("fig9", td.path.string()), config_error);
}

TEST_CASE("emit_plot turns a CSV into an SVG and rejects empty input") {
    TempDir td;
    const fs::path csv = td.path / "data.csv";
    detail::atomic_write(csv, "x,a,b\n0,1,\n1,2,0.5\n2,3,1\n");
    const fs::path svg = td.path / "data.svg";
    emit_plot(csv, svg, "demo");
    const std::string body = slurp(svg);
    CHECK(body.rfind("<svg", 0) == 0);
    CHECK(body.find("demo") != std::string::npos);
    CHECK(body.find("polyline") != std::string::npos);
    // deterministic output
    emit_plot(csv, td.path / "data2.svg", "demo");
    CHECK(slurp(td.path / "data2.svg") == body);

    detail::atomic_write(td.path / "empty.csv", "x,a\n");
    CHECK_THROWS_AS(emit_plot(td.path / "empty.csv", td.path / "empty.svg"), config_error);
}
