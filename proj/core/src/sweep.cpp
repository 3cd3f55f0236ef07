#include "rydosc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rydosc {

namespace {

constexpr const char* code_version = "rydosc 0.1.0";

bool known_axis(const std::string& name) {
    return name == "G" || name == "G2" || name == "beta_sq" || name == "theta" ||
           name == "gamma_m_over_r" || name == "nbar_th";
}

/// Fully resolved single-cell parameters.
struct CellParams {
    double coupling, beta_sq, theta, gamma_m_over_r, nbar_th;
};

void assign(CellParams& c, const std::string& name, double value) {
    if (name == "G" || name == "G2") c.coupling = value;
    else if (name == "beta_sq") c.beta_sq = value;
    else if (name == "theta") c.theta = value;
    else if (name == "gamma_m_over_r") c.gamma_m_over_r = value;
    else if (name == "nbar_th") c.nbar_th = value;
}

struct CellOutcome {
    std::map<std::string, double> values;
    CellDiagnostics diagnostics;
};

bool wants(const SweepSpec& spec, const char* name) {
    return std::find(spec.observables.begin(), spec.observables.end(), name) !=
           spec.observables.end();
}

CellOutcome evaluate_cell(const SweepSpec& spec, const CellParams& params) {
    CellOutcome out;
    const FockSpace space(spec.fock_dim);
    const AtomState atom = AtomState::from_population(params.beta_sq, params.theta);

    DensityMatrix state = (spec.initial_state == InitialStateKind::thermal)
                              ? thermal_state(space, params.nbar_th)
                              : vacuum(space);
    if (spec.engine == SweepEngine::exact_channel) {
        PassageChannel channel{spec.mode, params.coupling, atom};
        PassageHook between;
        if (params.gamma_m_over_r > 0.0) {
            // Interleave one inter-atom interval of bath-only damping.
            MasterEquation bath_only;
            bath_only.mode = spec.mode;
            bath_only.coupling = 0.0;
            bath_only.include_atomic = false;
            bath_only.rate = 1.0;
            bath_only.bath = ThermalBath{params.gamma_m_over_r, params.nbar_th};
            between = [bath_only](int, const DensityMatrix& rho) {
                return evolve(bath_only, rho, 1.0).state;
            };
        }
        state = iterate_passages(channel, state, spec.k_atoms, between)
                    .states.back();
    } else {
        MasterEquation me;
        me.mode = spec.mode;
        me.coupling = params.coupling;
        me.atom = atom;
        me.rate = 1.0;
        if (params.gamma_m_over_r > 0.0)
            me.bath = ThermalBath{params.gamma_m_over_r, params.nbar_th};
        state = evolve(me, state, static_cast<double>(spec.k_atoms)).state;
        out.diagnostics.steady = rhs(me, state).norm() < 1e-9;
    }

    out.diagnostics.top_population = top_population(state);
    out.diagnostics.truncation_ok =
        out.diagnostics.top_population <= space.tail_tolerance;

    if (wants(spec, "mean_n")) out.values["mean_n"] = mean_phonons(state);
    if (wants(spec, "min_variance") || wants(spec, "phi_min")) {
        const QuadratureReport report = minimize_variance(state);
        if (wants(spec, "min_variance")) out.values["min_variance"] = report.variance_min;
        if (wants(spec, "phi_min")) out.values["phi_min"] = report.phi_min;
    }
    if (wants(spec, "v_neg"))
        out.values["v_neg"] = negative_volume(wigner(state));
    return out;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
    if (workers == 1 || n < 4) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < n) body(i);
        });
    for (auto& t : pool) t.join();
}

nlohmann::json spec_to_json(const SweepSpec& spec) {
    auto axis = [](const SweepAxis& a) {
        return nlohmann::json{{"name", a.name},
                              {"min", a.min},
                              {"max", a.max},
                              {"n_points", a.n_points},
                              {"scale", a.scale == AxisScale::log ? "log" : "linear"}};
    };
    return nlohmann::json{
        {"axis1", axis(spec.axis1)},
        {"axis2", axis(spec.axis2)},
        {"engine", spec.engine == SweepEngine::exact_channel ? "exact_channel"
                                                             : "master_equation"},
        {"mode", spec.mode == ResonanceMode::single_phonon ? "single_phonon"
                                                           : "two_phonon"},
        {"fock_dim", spec.fock_dim},
        {"k_atoms", spec.k_atoms},
        {"coupling", spec.coupling},
        {"beta_sq", spec.beta_sq},
        {"theta", spec.theta},
        {"gamma_m_over_r", spec.gamma_m_over_r},
        {"nbar_th", spec.nbar_th},
        {"initial_state",
         spec.initial_state == InitialStateKind::thermal ? "thermal" : "vacuum"},
        {"observables", spec.observables}};
}

} // namespace

std::vector<double> SweepAxis::values() const {
    validate();
    std::vector<double> out(n_points);
    if (n_points == 1) {
        out[0] = min;
        return out;
    }
    if (scale == AxisScale::log) {
        const double lmin = std::log10(min), lmax = std::log10(max);
        for (int i = 0; i < n_points; ++i)
            out[i] = std::pow(10.0, lmin + (lmax - lmin) * i / (n_points - 1));
    } else {
        for (int i = 0; i < n_points; ++i)
            out[i] = min + (max - min) * i / (n_points - 1);
    }
    return out;
}

void SweepAxis::validate() const {
    if (!known_axis(name)) throw DomainError("SweepAxis: unknown parameter '" + name + "'");
    if (n_points < 1) throw DomainError("SweepAxis: n_points must be >= 1");
    if (n_points > 1 && !(max > min)) throw DomainError("SweepAxis: max must exceed min");
    if (scale == AxisScale::log && min <= 0.0)
        throw DomainError("SweepAxis: log scale requires min > 0");
}

void SweepSpec::validate() const {
    axis1.validate();
    axis2.validate();
    if (axis1.name == axis2.name)
        throw DomainError("SweepSpec: axes must sweep different parameters");
    if (fock_dim < 2) throw DomainError("SweepSpec: fock_dim must be >= 2");
    if (k_atoms < 0) throw DomainError("SweepSpec: k_atoms must be >= 0");
    for (const std::string& obs : observables)
        if (obs != "v_neg" && obs != "min_variance" && obs != "phi_min" &&
            obs != "mean_n")
            throw DomainError("SweepSpec: unknown observable '" + obs + "'");
}

const SweepCell& SweepResult::cell(int i, int j) const {
    const int n2 = spec.axis2.n_points;
    if (i < 0 || i >= spec.axis1.n_points || j < 0 || j >= n2)
        throw DomainError("SweepResult::cell: index out of range");
    return cells[static_cast<std::size_t>(i) * n2 + j];
}

const SweepCell& SweepResult::nearest(double axis1_value, double axis2_value) const {
    const auto closest = [](const std::vector<double>& vals, double target) {
        int best = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (std::abs(vals[i] - target) < std::abs(vals[best] - target))
                best = static_cast<int>(i);
        return best;
    };
    return cell(closest(axis1_values, axis1_value), closest(axis2_values, axis2_value));
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    result.axis1_values = spec.axis1.values();
    result.axis2_values = spec.axis2.values();
    const EvolveOptions defaults;
    result.provenance = SweepProvenance{
        spec.engine == SweepEngine::exact_channel ? "exact_channel" : "master_equation",
        spec.fock_dim, defaults.abs_tol, defaults.rel_tol,
        FockSpace(spec.fock_dim).tail_tolerance, code_version};

    const int n1 = spec.axis1.n_points, n2 = spec.axis2.n_points;
    result.cells.resize(static_cast<std::size_t>(n1) * n2);
    parallel_for(n1 * n2, [&](int idx) {
        const int i = idx / n2, j = idx % n2;
        CellParams params{spec.coupling, spec.beta_sq, spec.theta,
                          spec.gamma_m_over_r, spec.nbar_th};
        assign(params, spec.axis1.name, result.axis1_values[i]);
        assign(params, spec.axis2.name, result.axis2_values[j]);
        SweepCell& cell = result.cells[idx];
        cell.i = i;
        cell.j = j;
        try {
            CellOutcome outcome = evaluate_cell(spec, params);
            cell.values = std::move(outcome.values);
            cell.diagnostics = std::move(outcome.diagnostics);
        } catch (const std::exception& e) {
            cell.diagnostics.error = e.what();
            cell.diagnostics.truncation_ok = false;
        }
    });
    return result;
}

std::vector<WignerSnapshot> snapshot_wigner(
    const SweepSpec& base, const std::vector<std::pair<double, double>>& points) {
    std::vector<WignerSnapshot> snapshots;
    snapshots.reserve(points.size());
    for (const auto& [coupling, beta_sq] : points) {
        const FockSpace space(base.fock_dim);
        const AtomState atom = AtomState::from_population(beta_sq, base.theta);
        DensityMatrix state = (base.initial_state == InitialStateKind::thermal)
                                  ? thermal_state(space, base.nbar_th)
                                  : vacuum(space);
        if (base.k_atoms > 0 && coupling > 0.0) {
            PassageChannel channel{base.mode, coupling, atom};
            state = iterate_passages(channel, state, base.k_atoms).states.back();
        }
        WignerSnapshot snap;
        snap.coupling = coupling;
        snap.beta_sq = beta_sq;
        snap.grid = wigner(state);
        snap.v_neg = negative_volume(snap.grid);
        const QuadratureReport report = minimize_variance(state);
        snap.min_variance = report.variance_min;
        snap.phi_min = report.phi_min;
        snapshots.push_back(std::move(snap));
    }
    return snapshots;
}

FeasibilityReport feasibility_report(const PhysicalParams& params,
                                     double temperature_k,
                                     double rydberg_lifetime_s) {
    params.validate();
    const Trajectory traj{params.speed, params.closest_approach};
    FeasibilityReport report;
    report.g_single = integrated_coupling(params, traj, CouplingKind::single);
    report.g_two_phonon = integrated_coupling(params, traj, CouplingKind::two_phonon);
    report.g_quadrupole = integrated_coupling(params, traj, CouplingKind::quadrupole);
    report.nbar_th = nbar_from_temperature(params.omega_osc, temperature_k);
    report.atom_spacing_m = params.speed / params.rate;
    report.interaction_length_m = params.closest_approach;
    report.interaction_time_s = params.closest_approach / params.speed;
    report.single_atom_ok =
        report.atom_spacing_m >= 10.0 * report.interaction_length_m;
    report.lifetime_ok = report.interaction_time_s <= 0.1 * rydberg_lifetime_s;
    return report;
}

std::filesystem::path write_sweep_result(const SweepResult& result,
                                         const std::filesystem::path& out_dir) {
    nlohmann::json doc;
    doc["spec"] = spec_to_json(result.spec);
    doc["provenance"] = {{"engine", result.provenance.engine},
                         {"fock_dim", result.provenance.fock_dim},
                         {"abs_tol", result.provenance.abs_tol},
                         {"rel_tol", result.provenance.rel_tol},
                         {"tail_tolerance", result.provenance.tail_tolerance},
                         {"code_version", result.provenance.code_version}};
    doc["axes"] = {{"axis1", result.axis1_values}, {"axis2", result.axis2_values}};
    doc["cells"] = nlohmann::json::array();
    for (const SweepCell& cell : result.cells) {
        nlohmann::json c{{"i", cell.i},
                         {"j", cell.j},
                         {"values", cell.values},
                         {"diagnostics",
                          {{"top_population", cell.diagnostics.top_population},
                           {"truncation_ok", cell.diagnostics.truncation_ok},
                           {"steady", cell.diagnostics.steady},
                           {"error", cell.diagnostics.error}}}};
        doc["cells"].push_back(std::move(c));
    }

    // Run directory named by UTC timestamp plus a short spec hash.
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%S", &tm);
    std::ostringstream hash;
    hash << std::hex << (std::hash<std::string>{}(doc["spec"].dump()) & 0xffffffffu);
    const std::filesystem::path run_dir =
        out_dir / (std::string(stamp) + "-" + hash.str());
    std::filesystem::create_directories(run_dir);

    std::ofstream json_out(run_dir / "result.json");
    json_out << doc.dump(2) << '\n';

    std::ofstream csv(run_dir / "result.csv");
    csv << result.spec.axis1.name << "," << result.spec.axis2.name;
    for (const std::string& obs : result.spec.observables) csv << "," << obs;
    csv << "\n";
    csv.precision(12);
    for (const SweepCell& cell : result.cells) {
        csv << result.axis1_values[cell.i] << "," << result.axis2_values[cell.j];
        for (const std::string& obs : result.spec.observables) {
            csv << ",";
            const auto it = cell.values.find(obs);
            if (it != cell.values.end()) csv << it->second;
        }
        csv << "\n";
    }
    return run_dir;
}

} // namespace rydosc
