#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rydosc/atomfield.hpp"
#include "rydosc/lindblad.hpp"
#include "rydosc/observables.hpp"
#include "rydosc/propagator.hpp"

namespace rydosc {

enum class AxisScale { linear, log };

/// One sweep axis over a named model parameter. Recognised names:
/// "G" / "G2" (integrated coupling), "beta_sq", "theta",
/// "gamma_m_over_r", "nbar_th".
struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int n_points = 2;
    AxisScale scale = AxisScale::linear;

    std::vector<double> values() const;
    void validate() const;
};

enum class SweepEngine { exact_channel, master_equation };
enum class InitialStateKind { vacuum, thermal };

/// Complete description of a 2-D parameter sweep. Axis parameters
/// override the fixed values below per cell.
struct SweepSpec {
    SweepAxis axis1;
    SweepAxis axis2;
    SweepEngine engine = SweepEngine::exact_channel;
    ResonanceMode mode = ResonanceMode::two_phonon;
    int fock_dim = 40;
    int k_atoms = 30; // master_equation evolves for tau = k_atoms

    // Fixed parameters, used where an axis does not override them.
    double coupling = 0.0;
    double beta_sq = 0.0;
    double theta = 0.0;
    double gamma_m_over_r = 0.0;
    double nbar_th = 0.0;
    InitialStateKind initial_state = InitialStateKind::vacuum; // thermal uses nbar_th

    std::vector<std::string> observables{"v_neg", "min_variance", "phi_min", "mean_n"};

    void validate() const;
};

struct CellDiagnostics {
    double top_population = 0.0;
    bool truncation_ok = true;
    bool steady = false;     // residual check passed (master engine only)
    std::string error;       // non-empty when the cell failed
};

struct SweepCell {
    int i = 0, j = 0; // axis1 / axis2 indices
    std::map<std::string, double> values;
    CellDiagnostics diagnostics;
};

struct SweepProvenance {
    std::string engine;
    int fock_dim = 0;
    double abs_tol = 0.0, rel_tol = 0.0, tail_tolerance = 0.0;
    std::string code_version;
};

struct SweepResult {
    SweepSpec spec;
    SweepProvenance provenance;
    std::vector<double> axis1_values, axis2_values;
    std::vector<SweepCell> cells; // row-major, cell (i,j) at i*n2+j

    const SweepCell& cell(int i, int j) const;
    /// Cell whose axis values are closest (Euclidean in axis units).
    const SweepCell& nearest(double axis1_value, double axis2_value) const;
};

/// Evaluate every grid cell independently on a worker pool. Per-cell
/// failures are recorded in diagnostics; the sweep itself never throws
/// for a cell-level error.
SweepResult run_sweep(const SweepSpec& spec);

/// Full simulation plus Wigner grid at selected (coupling, beta_sq)
/// points of a sweep configuration.
struct WignerSnapshot {
    double coupling = 0.0, beta_sq = 0.0;
    WignerGrid grid;
    double v_neg = 0.0;
    double min_variance = 0.0;
    double phi_min = 0.0;
};
std::vector<WignerSnapshot> snapshot_wigner(
    const SweepSpec& base, const std::vector<std::pair<double, double>>& points);

/// Derived experimental numbers for a physical parameter set.
struct FeasibilityReport {
    double g_single = 0.0;        // integrated single-phonon coupling
    double g_two_phonon = 0.0;    // G2
    double g_quadrupole = 0.0;    // G2,quad
    double nbar_th = 0.0;         // at the given temperature
    double atom_spacing_m = 0.0;  // v / r
    double interaction_length_m = 0.0; // ~ Z0
    double interaction_time_s = 0.0;   // ~ Z0 / v
    bool single_atom_ok = false;  // spacing >= 10 x interaction length
    bool lifetime_ok = false;     // interaction time <= lifetime / 10
};
FeasibilityReport feasibility_report(const PhysicalParams& params,
                                     double temperature_k,
                                     double rydberg_lifetime_s = 100e-6);

/// Persist a sweep into out_dir/<timestamp>-<spec hash>/: result.json
/// ({spec, provenance, axes, cells}) plus result.csv (axis1, axis2, one
/// column per observable). Returns the run directory.
std::filesystem::path write_sweep_result(const SweepResult& result,
                                         const std::filesystem::path& out_dir);

} // namespace rydosc
