#pragma once
// Run configuration: an INI-style file with [section] headers, key = value
// pairs, and '#'/';' comments. Unknown sections or keys are hard errors.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "correlations.hpp"

namespace pbg {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    EmitterParams emitter{};
    ReservoirParams reservoir{};
    SolverConfig solver{};
    complexd alpha = complexd(1.0 / std::sqrt(2.0), 0.0);
    std::optional<complexd> beta; // derived from alpha when absent
    std::vector<Partition> partitions = {Partition::N1N2};
    DiscordOptions discord_opt{};
    size_t stride = 1;
    std::string output_dir = "out";
    std::string preset;

    InitialWeights weights() const {
        if (beta) {
            InitialWeights w{alpha, *beta};
            w.validate();
            return w;
        }
        return InitialWeights::from_alpha(alpha);
    }
    void validate() const {
        emitter.validate();
        reservoir.validate();
        solver.validate();
        weights();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw config_error("invalid numeric value for '" + key + "': " + v);
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("invalid boolean value for '" + key + "': " + v);
}

} // namespace detail

inline RunConfig parse_config(std::istream& is, const std::string& origin = "<stream>") {
    RunConfig cfg;
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto err = [&](const std::string& msg) {
            throw config_error(origin + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (line.front() == '[') {
            if (line.back() != ']') err("malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "emitter" && section != "reservoir" && section != "solver" &&
                section != "initial" && section != "correlations" && section != "output")
                err("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) err("expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        const std::string qual = section + "." + key;
        using detail::parse_number;

        if (qual == "emitter.omega0") cfg.emitter.omega_0 = parse_number(key, val);
        else if (qual == "reservoir.omega_c") cfg.reservoir.omega_c = parse_number(key, val);
        else if (qual == "reservoir.curvature") cfg.reservoir.curvature = parse_number(key, val);
        else if (qual == "reservoir.k0") cfg.reservoir.k0 = parse_number(key, val);
        else if (qual == "reservoir.eta") cfg.reservoir.eta = parse_number(key, val);
        else if (qual == "reservoir.k_max") cfg.reservoir.k_max = parse_number(key, val);
        else if (qual == "reservoir.n_quad")
            cfg.reservoir.n_quad = static_cast<int>(parse_number(key, val));
        else if (qual == "solver.dt") cfg.solver.dt = parse_number(key, val);
        else if (qual == "solver.t_max") cfg.solver.t_max = parse_number(key, val);
        else if (qual == "solver.kernel_mode") {
            if (val == "full-integral") cfg.solver.kernel_mode = KernelMode::full_integral;
            else if (val == "band-edge") cfg.solver.kernel_mode = KernelMode::band_edge;
            else if (val == "markovian") cfg.solver.kernel_mode = KernelMode::markovian;
            else err("unknown kernel_mode: " + val);
        } else if (qual == "solver.convergence_check")
            cfg.solver.convergence_check = detail::parse_bool(key, val);
        else if (qual == "initial.alpha") cfg.alpha = parse_number(key, val);
        else if (qual == "initial.alpha_im") cfg.alpha.imag(parse_number(key, val));
        else if (qual == "initial.beta") cfg.beta = complexd(parse_number(key, val), 0.0);
        else if (qual == "correlations.partitions") {
            cfg.partitions.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = detail::trim(item);
                if (item.empty()) continue;
                try {
                    cfg.partitions.push_back(partition_from_name(item));
                } catch (const std::invalid_argument& e) {
                    err(e.what());
                }
            }
            if (cfg.partitions.empty()) err("empty partition list");
        } else if (qual == "correlations.discord_grid")
            cfg.discord_opt.grid = static_cast<int>(parse_number(key, val));
        else if (qual == "correlations.measured_side") {
            if (val == "A" || val == "a") cfg.discord_opt.side = MeasuredSide::A;
            else if (val == "B" || val == "b") cfg.discord_opt.side = MeasuredSide::B;
            else err("measured_side must be A or B");
        } else if (qual == "correlations.stride")
            cfg.stride = static_cast<size_t>(parse_number(key, val));
        else if (qual == "output.directory") cfg.output_dir = val;
        else err("unknown key '" + key + "' in section [" + section + "]");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(origin + ": " + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file: " + path.string());
    return parse_config(f, path.string());
}

// Canonical serialization; re-running from this file reproduces the outputs
// byte-identically.
inline std::string resolve_config(const RunConfig& cfg) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "[emitter]\nomega0 = " << num(cfg.emitter.omega_0) << "\n\n";
    os << "[reservoir]\nomega_c = " << num(cfg.reservoir.omega_c)
       << "\ncurvature = " << num(cfg.reservoir.curvature) << "\nk0 = " << num(cfg.reservoir.k0)
       << "\neta = " << num(cfg.reservoir.eta) << "\nk_max = " << num(cfg.reservoir.k_max)
       << "\nn_quad = " << cfg.reservoir.n_quad << "\n\n";
    os << "[solver]\ndt = " << num(cfg.solver.dt) << "\nt_max = " << num(cfg.solver.t_max)
       << "\nkernel_mode = "
       << (cfg.solver.kernel_mode == KernelMode::full_integral ? "full-integral"
           : cfg.solver.kernel_mode == KernelMode::band_edge   ? "band-edge"
                                                               : "markovian")
       << "\nconvergence_check = " << (cfg.solver.convergence_check ? "true" : "false") << "\n\n";
    os << "[initial]\nalpha = " << num(cfg.alpha.real());
    if (cfg.alpha.imag() != 0.0) os << "\nalpha_im = " << num(cfg.alpha.imag());
    if (cfg.beta) os << "\nbeta = " << num(cfg.beta->real());
    os << "\n\n[correlations]\npartitions = ";
    for (size_t i = 0; i < cfg.partitions.size(); ++i)
        os << (i ? "," : "") << partition_name(cfg.partitions[i]);
    os << "\ndiscord_grid = " << cfg.discord_opt.grid << "\nmeasured_side = "
       << (cfg.discord_opt.side == MeasuredSide::A ? "A" : "B") << "\nstride = " << cfg.stride
       << "\n\n[output]\ndirectory = " << cfg.output_dir << "\n";
    return os.str();
}

} // namespace pbg
