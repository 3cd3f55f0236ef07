#pragma once

#include <optional>
#include <vector>

#include "rydosc/fock.hpp"
#include "rydosc/propagator.hpp"

namespace rydosc {

/// Mechanical damping and mean bath occupation.
struct ThermalBath {
    double gamma_m = 0.0; // rad/s
    double nbar_th = 0.0;

    void validate() const {
        if (gamma_m < 0.0) throw DomainError("ThermalBath: Gamma_m must be >= 0");
        if (nbar_th < 0.0) throw DomainError("ThermalBath: nbar_th must be >= 0");
    }
};

/// Effective open-system description of the atom stream plus, optionally,
/// the thermal environment. All evolution runs in dimensionless time
/// tau = r t, so the bath enters only through Gamma_m / r.
struct MasterEquation {
    ResonanceMode mode = ResonanceMode::two_phonon;
    double coupling = 0.0; // G or G2
    AtomState atom;
    double rate = 1.0; // atoms per second, r > 0
    std::optional<ThermalBath> bath;
    bool include_atomic = true;

    void validate() const {
        if (rate <= 0.0) throw DomainError("MasterEquation: rate must be > 0");
        if (bath) bath->validate();
    }
};

/// d rho / d tau. Traceless and Hermitian by construction of the
/// Lindblad form.
Matrix rhs(const MasterEquation& me, const DensityMatrix& rho);

struct EvolveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    double step_floor = 1e-6;  // in tau
    double initial_step = 1e-2;
    int n_samples = 0;         // intermediate samples of the trajectory
};

struct EvolveResult {
    DensityMatrix state;
    std::vector<double> sample_times;       // tau
    std::vector<DensityMatrix> samples;
    long steps_taken = 0;
};

/// Adaptive embedded Runge-Kutta (Cash-Karp 4/5) with per-step
/// hermitization. duration is in tau = r t.
EvolveResult evolve(const MasterEquation& me, const DensityMatrix& rho0,
                    double duration, const EvolveOptions& opts = {});

struct SteadyStateResult {
    DensityMatrix state;
    double tau_reached = 0.0;
    bool converged = false; // ||d rho/d tau||_F below threshold
};

/// Integrate until ||d rho/d tau||_F < 1e-9 or tau = 1e3, whichever first.
SteadyStateResult evolve_to_steady(const MasterEquation& me, const DensityMatrix& rho0,
                                   const EvolveOptions& opts = {});

/// Analytic steady state of the single-phonon master equation (no bath):
/// a displaced thermal state with nbar = |beta|^2/(|alpha|^2 - |beta|^2)
/// and amplitude -2i alpha^* beta / (G (|alpha|^2 - |beta|^2)). Requires
/// |beta|^2 < 1/2; larger populations have no steady state (gain beats loss).
struct SinglePhononSteadyState {
    double nbar;
    Complex amplitude;
};
SinglePhononSteadyState single_phonon_steady_state(const AtomState& atom, double coupling);

/// Result of integrating the single-phonon master equation in a frame
/// co-moving with the coherent drift: rho(tau) = D(lambda) sigma D^dag(lambda).
/// The frame amplitude follows lambda(tau) = A (1 - e^{-kappa tau / 2})
/// exactly, so sigma stays near the origin and small truncation
/// dimensions suffice even when |A| is large.
struct DisplacedFrameResult {
    DensityMatrix sigma;   // state in the co-moving frame
    Complex lambda;        // frame displacement at the final time
    long steps_taken = 0;
};

/// Evolve the no-bath single-phonon master equation from D(lambda0) sigma0,
/// with sigma0 given in the frame (default use: sigma0 = vacuum, lambda0 = 0).
DisplacedFrameResult evolve_single_phonon_frame(const AtomState& atom, double coupling,
                                                const DensityMatrix& sigma0,
                                                double duration,
                                                const EvolveOptions& opts = {});

/// Per-step fidelity between the exact repeated-interaction channel and
/// the master-equation description over k passages (tau = k at the end).
std::vector<double> channel_vs_master_agreement(const PassageChannel& channel,
                                                const MasterEquation& me,
                                                const DensityMatrix& rho0, int k);

} // namespace rydosc
