#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydosc/atomfield.hpp"
#include "rydosc/fock.hpp"
#include "rydosc/lindblad.hpp"
#include "rydosc/observables.hpp"
#include "rydosc/propagator.hpp"
#include "rydosc/sweep.hpp"

#include "render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rydosc;

namespace {

constexpr const char* code_version = "rydosc 0.1.0";

/// Anything wrong with the configuration file (exit code 2), as opposed
/// to numerical failures during the run (exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

template <typename T>
T require(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing config key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

template <typename T>
T value_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

PhysicalParams parse_physical(const json& j) {
    PhysicalParams p{};
    p.charge = require<double>(j, "Q_C");
    p.z_osc = require<double>(j, "z_osc_m");
    p.mu0 = require<double>(j, "mu0_C_m");
    p.mu0_prime = value_or(j, "mu0_prime_C_m", p.mu0);
    p.delta = require<double>(j, "Delta_rad_per_s");
    p.omega_osc = require<double>(j, "omega_osc_rad_per_s");
    p.speed = require<double>(j, "v_m_per_s");
    p.closest_approach = require<double>(j, "Z0_m");
    p.rate = require<double>(j, "r_per_s");
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

/// Everything needed to run one simulation.
struct RunConfig {
    ResonanceMode mode = ResonanceMode::two_phonon;
    int fock_dim = 40;
    SweepEngine engine = SweepEngine::exact_channel;
    AtomState atom;
    double coupling = 0.0;
    std::optional<PhysicalParams> physical;
    double rate = 1.0; // atoms per second
    std::optional<ThermalBath> bath;
    int k_atoms = 30;
    InitialStateKind initial_state = InitialStateKind::vacuum;
    double initial_nbar = 0.0;
};

RunConfig parse_run_config(const json& j, int fock_dim_override) {
    RunConfig cfg;
    const std::string mode = value_or<std::string>(j, "mode", "two_phonon");
    if (mode == "single_phonon") cfg.mode = ResonanceMode::single_phonon;
    else if (mode == "two_phonon") cfg.mode = ResonanceMode::two_phonon;
    else throw ConfigError("mode must be 'single_phonon' or 'two_phonon'");

    cfg.fock_dim = value_or(j, "fock_dim", 40);
    if (fock_dim_override > 0) cfg.fock_dim = fock_dim_override;
    if (cfg.fock_dim < 2) throw ConfigError("fock_dim must be >= 2");

    const std::string engine = value_or<std::string>(j, "engine", "exact_channel");
    if (engine == "exact_channel") cfg.engine = SweepEngine::exact_channel;
    else if (engine == "master_equation") cfg.engine = SweepEngine::master_equation;
    else throw ConfigError("engine must be 'exact_channel' or 'master_equation'");

    const json atom = value_or(j, "atom", json::object());
    try {
        cfg.atom = AtomState::from_population(value_or(atom, "beta_sq", 0.0),
                                              value_or(atom, "theta_rad", 0.0));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    const bool has_g = j.contains("coupling") && j.at("coupling").contains("G");
    const bool has_phys = j.contains("physical");
    if (has_g == has_phys)
        throw ConfigError("exactly one of coupling.G and physical must be given");
    if (has_g) {
        cfg.coupling = require<double>(j.at("coupling"), "G");
    } else {
        cfg.physical = parse_physical(j.at("physical"));
        cfg.rate = cfg.physical->rate;
        const Trajectory traj{cfg.physical->speed, cfg.physical->closest_approach};
        cfg.coupling = integrated_coupling(
            *cfg.physical, traj,
            cfg.mode == ResonanceMode::single_phonon ? CouplingKind::single
                                                     : CouplingKind::two_phonon);
    }
    cfg.rate = value_or(j, "r_per_s", cfg.rate);
    if (cfg.rate <= 0.0) throw ConfigError("r_per_s must be > 0");

    if (j.contains("bath")) {
        const json& b = j.at("bath");
        ThermalBath bath;
        if (b.contains("Gamma_m_over_r"))
            bath.gamma_m = require<double>(b, "Gamma_m_over_r") * cfg.rate;
        else
            bath.gamma_m = require<double>(b, "Gamma_m_rad_per_s");
        bath.nbar_th = value_or(b, "nbar_th", 0.0);
        try {
            bath.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        cfg.bath = bath;
    }

    cfg.k_atoms = value_or(j, "k_atoms", 30);
    if (cfg.k_atoms < 0) throw ConfigError("k_atoms must be >= 0");

    const json init = value_or(j, "initial_state", json::object());
    const std::string kind = value_or<std::string>(init, "kind", "vacuum");
    if (kind == "thermal") {
        cfg.initial_state = InitialStateKind::thermal;
        cfg.initial_nbar = require<double>(init, "nbar");
    } else if (kind != "vacuum") {
        throw ConfigError("initial_state.kind must be 'vacuum' or 'thermal'");
    }
    return cfg;
}

/// Config echo that parse_run_config maps back onto the same RunConfig.
json provenance_block(const RunConfig& cfg) {
    json out;
    out["mode"] = cfg.mode == ResonanceMode::single_phonon ? "single_phonon"
                                                           : "two_phonon";
    out["fock_dim"] = cfg.fock_dim;
    out["engine"] = cfg.engine == SweepEngine::exact_channel ? "exact_channel"
                                                             : "master_equation";
    out["atom"] = {{"beta_sq", cfg.atom.beta_magnitude_sq},
                   {"theta_rad", cfg.atom.theta}};
    out["coupling"] = {{"G", cfg.coupling}};
    out["r_per_s"] = cfg.rate;
    if (cfg.bath)
        out["bath"] = {{"Gamma_m_rad_per_s", cfg.bath->gamma_m},
                       {"nbar_th", cfg.bath->nbar_th}};
    out["k_atoms"] = cfg.k_atoms;
    if (cfg.initial_state == InitialStateKind::thermal)
        out["initial_state"] = {{"kind", "thermal"}, {"nbar", cfg.initial_nbar}};
    else
        out["initial_state"] = {{"kind", "vacuum"}};
    out["code_version"] = code_version;
    return out;
}

DensityMatrix run_simulation(const RunConfig& cfg) {
    const FockSpace space(cfg.fock_dim);
    DensityMatrix state = (cfg.initial_state == InitialStateKind::thermal)
                              ? thermal_state(space, cfg.initial_nbar)
                              : vacuum(space);
    if (cfg.engine == SweepEngine::exact_channel) {
        if (cfg.k_atoms == 0) return state;
        PassageChannel channel{cfg.mode, cfg.coupling, cfg.atom};
        PassageHook between;
        if (cfg.bath && cfg.bath->gamma_m > 0.0) {
            MasterEquation bath_only;
            bath_only.mode = cfg.mode;
            bath_only.include_atomic = false;
            bath_only.rate = cfg.rate;
            bath_only.bath = cfg.bath;
            between = [bath_only](int, const DensityMatrix& rho) {
                return evolve(bath_only, rho, 1.0).state;
            };
        }
        return iterate_passages(channel, state, cfg.k_atoms, between).states.back();
    }
    MasterEquation me;
    me.mode = cfg.mode;
    me.coupling = cfg.coupling;
    me.atom = cfg.atom;
    me.rate = cfg.rate;
    me.bath = cfg.bath;
    return evolve(me, state, static_cast<double>(cfg.k_atoms)).state;
}

void write_rho_csv(const DensityMatrix& rho, const fs::path& file) {
    std::ofstream out(file);
    out << "n,m,re,im\n";
    out.precision(17);
    for (int n = 0; n < rho.space.dim; ++n)
        for (int m = 0; m < rho.space.dim; ++m)
            out << n << "," << m << "," << rho.rho(n, m).real() << ","
                << rho.rho(n, m).imag() << "\n";
}

void write_wigner_csv(const WignerGrid& grid, const fs::path& file) {
    std::ofstream out(file);
    out << "x,p,W\n";
    out.precision(12);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.np; ++j)
            out << grid.x(i) << "," << grid.p(j) << "," << grid.values(i, j) << "\n";
}

std::string timestamp_utc() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

WignerGridSpec parse_grid_spec(const json& j) {
    WignerGridSpec spec;
    const json g = value_or(j, "wigner", json::object());
    if (g.contains("half_width")) spec.half_width = require<double>(g, "half_width");
    spec.nx = value_or(g, "nx", 201);
    spec.np = value_or(g, "np", 201);
    if (spec.nx < 2 || spec.np < 2) throw ConfigError("wigner grid needs nx, np >= 2");
    return spec;
}

json state_summary(const DensityMatrix& state, const WignerGridSpec& grid_spec) {
    const QuadratureReport quad = minimize_variance(state);
    const WignerGrid grid = wigner(state, grid_spec);
    json out;
    out["mean_n"] = mean_phonons(state);
    out["purity"] = purity(state);
    out["top_population"] = top_population(state);
    out["min_variance"] = quad.variance_min;
    out["phi_min"] = quad.phi_min;
    out["variance_degenerate"] = quad.degenerate;
    out["v_neg"] = negative_volume(grid);
    out["wigner_normalization"] = wigner_normalization(grid);
    return out;
}

int cmd_simulate(const json& cfg_json, const RunConfig& cfg, const fs::path& out_dir,
                 bool render) {
    const DensityMatrix state = run_simulation(cfg);
    fs::create_directories(out_dir);
    write_rho_csv(state, out_dir / "rho.csv");

    const WignerGridSpec grid_spec = parse_grid_spec(cfg_json);
    json summary;
    summary["observables"] = state_summary(state, grid_spec);
    summary["config"] = provenance_block(cfg);
    summary["timestamp"] = timestamp_utc();
    std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';

    if (render) render::diverging_ppm(wigner(state, grid_spec).values,
                                      out_dir / "wigner.ppm");
    return 0;
}

int cmd_wigner(const json& cfg_json, const RunConfig& cfg, const fs::path& out_dir,
               bool render) {
    const DensityMatrix state = run_simulation(cfg);
    const WignerGrid grid = wigner(state, parse_grid_spec(cfg_json));
    fs::create_directories(out_dir);
    write_wigner_csv(grid, out_dir / "wigner.csv");
    json summary;
    summary["v_neg"] = negative_volume(grid);
    summary["normalization"] = wigner_normalization(grid);
    summary["config"] = provenance_block(cfg);
    summary["timestamp"] = timestamp_utc();
    std::ofstream(out_dir / "wigner_summary.json") << summary.dump(2) << '\n';
    if (render) render::diverging_ppm(grid.values, out_dir / "wigner.ppm");
    return 0;
}

SweepAxis parse_axis(const json& j) {
    SweepAxis axis;
    axis.name = require<std::string>(j, "name");
    axis.min = require<double>(j, "min");
    axis.max = require<double>(j, "max");
    axis.n_points = require<int>(j, "n_points");
    const std::string scale = value_or<std::string>(j, "scale", "linear");
    if (scale == "log") axis.scale = AxisScale::log;
    else if (scale != "linear") throw ConfigError("axis scale must be linear or log");
    try {
        axis.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return axis;
}

int cmd_sweep(const json& cfg_json, const RunConfig& cfg, const fs::path& out_dir,
              bool render) {
    if (!cfg_json.contains("sweep")) throw ConfigError("missing 'sweep' block");
    const json& s = cfg_json.at("sweep");
    SweepSpec spec;
    spec.axis1 = parse_axis(require<json>(s, "axis1"));
    spec.axis2 = parse_axis(require<json>(s, "axis2"));
    spec.engine = cfg.engine;
    spec.mode = cfg.mode;
    spec.fock_dim = cfg.fock_dim;
    spec.k_atoms = cfg.k_atoms;
    spec.coupling = cfg.coupling;
    spec.beta_sq = cfg.atom.beta_magnitude_sq;
    spec.theta = cfg.atom.theta;
    if (cfg.bath) {
        spec.gamma_m_over_r = cfg.bath->gamma_m / cfg.rate;
        spec.nbar_th = cfg.bath->nbar_th;
    }
    spec.initial_state = cfg.initial_state;
    if (cfg.initial_state == InitialStateKind::thermal) spec.nbar_th = cfg.initial_nbar;
    if (s.contains("observables"))
        spec.observables = require<std::vector<std::string>>(s, "observables");
    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    const SweepResult result = run_sweep(spec);
    fs::create_directories(out_dir);
    const fs::path run_dir = write_sweep_result(result, out_dir);
    std::printf("%s\n", run_dir.string().c_str());

    if (render) {
        for (const std::string& obs : spec.observables) {
            Eigen::MatrixXd map =
                Eigen::MatrixXd::Zero(spec.axis1.n_points, spec.axis2.n_points);
            for (const SweepCell& cell : result.cells) {
                const auto it = cell.values.find(obs);
                if (it != cell.values.end()) map(cell.i, cell.j) = it->second;
            }
            render::grayscale_pgm(map, run_dir / (obs + ".pgm"));
        }
    }
    return 0;
}

int cmd_coupling(const json& cfg_json, const fs::path& out_dir) {
    if (!cfg_json.contains("physical"))
        throw ConfigError("coupling requires a 'physical' block");
    const PhysicalParams p = parse_physical(cfg_json.at("physical"));
    const Trajectory traj{p.speed, p.closest_approach};
    const int samples = value_or(cfg_json, "samples", 801);
    const double a_max = value_or(cfg_json, "A_max", 8.0);
    if (samples < 2 || a_max <= 0.0)
        throw ConfigError("coupling: samples >= 2 and A_max > 0 required");

    fs::create_directories(out_dir);
    std::ofstream csv(out_dir / "coupling.csv");
    csv << "t_s,A,gamma_x,gamma_y,gamma_z,gamma_single,gamma_2,gamma_2quad\n";
    csv.precision(12);
    for (int i = 0; i < samples; ++i) {
        const double a = -a_max + 2.0 * a_max * i / (samples - 1);
        const double t = a * p.closest_approach / p.speed;
        const Eigen::Vector3d pos = traj.position(t);
        const CouplingProfile profile = coupling_profile(p, pos);
        csv << t << "," << a << "," << profile.x << "," << profile.y << ","
            << profile.z << "," << gamma_single(p, pos) << ","
            << gamma_two_phonon(p, pos) << "," << gamma_quadrupole(p, pos) << "\n";
    }

    json integrated;
    integrated["G"] = integrated_coupling(p, traj, CouplingKind::single);
    integrated["G2"] = integrated_coupling(p, traj, CouplingKind::two_phonon);
    integrated["G2_quad"] = integrated_coupling(p, traj, CouplingKind::quadrupole);
    integrated["timestamp"] = timestamp_utc();
    integrated["code_version"] = code_version;
    std::ofstream(out_dir / "coupling_integrated.json") << integrated.dump(2) << '\n';
    return 0;
}

int cmd_feasibility(const json& cfg_json, const fs::path& out_dir) {
    if (!cfg_json.contains("physical"))
        throw ConfigError("feasibility requires a 'physical' block");
    const PhysicalParams p = parse_physical(cfg_json.at("physical"));
    const double temperature = value_or(cfg_json, "temperature_K", 10e-3);
    const double lifetime = value_or(cfg_json, "rydberg_lifetime_s", 100e-6);
    if (temperature <= 0.0) throw ConfigError("temperature_K must be > 0");

    const FeasibilityReport report = feasibility_report(p, temperature, lifetime);
    json out;
    out["G"] = report.g_single;
    out["G2"] = report.g_two_phonon;
    out["G2_quad"] = report.g_quadrupole;
    out["nbar_th"] = report.nbar_th;
    out["atom_spacing_m"] = report.atom_spacing_m;
    out["interaction_length_m"] = report.interaction_length_m;
    out["interaction_time_s"] = report.interaction_time_s;
    out["single_atom_ok"] = report.single_atom_ok;
    out["lifetime_ok"] = report.lifetime_ok;
    out["temperature_K"] = temperature;
    out["rydberg_lifetime_s"] = lifetime;
    out["timestamp"] = timestamp_utc();
    out["code_version"] = code_version;
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "feasibility.json") << out.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Charged-oscillator state engineering via Rydberg-atom passages"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool render = false;
    int fock_dim = 0;
    unsigned long long seed = 0; // reserved: no stochastic components yet
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--render", render, "Also write image renderings");
    app.add_option("--fock-dim", fock_dim, "Override the Fock-space dimension");
    app.add_option("--seed", seed, "Reserved for future stochastic components");

    auto* simulate = app.add_subcommand("simulate", "Run one simulation");
    auto* sweep = app.add_subcommand("sweep", "Run a 2-D parameter sweep");
    auto* coupling = app.add_subcommand("coupling", "Coupling profile along a flyby");
    auto* wig = app.add_subcommand("wigner", "Wigner grid of a simulated state");
    auto* feas = app.add_subcommand("feasibility", "Physical feasibility report");
    for (CLI::App* sub : {simulate, sweep, coupling, wig, feas})
        sub->fallthrough(); // global flags may follow the subcommand

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is a configuration error
    }

    try {
        const json cfg_json = load_json(config_path);
        if (coupling->parsed()) return cmd_coupling(cfg_json, out_dir);
        if (feas->parsed()) return cmd_feasibility(cfg_json, out_dir);

        const RunConfig cfg = parse_run_config(cfg_json, fock_dim);
        if (simulate->parsed()) return cmd_simulate(cfg_json, cfg, out_dir, render);
        if (sweep->parsed()) return cmd_sweep(cfg_json, cfg, out_dir, render);
        if (wig->parsed()) return cmd_wigner(cfg_json, cfg, out_dir, render);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    }
    return 0;
}
