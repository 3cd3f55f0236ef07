#pragma once

#include <array>
#include <complex>
#include <Eigen/Dense>

#include "rydosc/constants.hpp"
#include "rydosc/errors.hpp"
#include "rydosc/fock.hpp"

namespace rydosc {

/// Physical parameters of the oscillator/atom setup (SI units).
struct PhysicalParams {
    double charge;        // Q, Coulombs
    double z_osc;         // oscillator length, m
    double mu0;           // S-P dipole moment, C m
    double mu0_prime;     // P-S' dipole moment, C m
    double delta;         // two-photon detuning, rad/s
    double omega_osc;     // oscillator angular frequency, rad/s
    double speed;         // atom speed v, m/s
    double closest_approach; // Z0, m
    double rate;          // atoms per second

    void validate() const;

    /// The Cs parameter set quoted in the feasibility discussion:
    /// Q = 200 e, z_osc = 1e-13 m, mu0 = mu0' = 1e4 e a0,
    /// Delta = 2 pi x 300 MHz, omega_osc = 2 pi x 3 GHz, v = 10 m/s,
    /// Z0 = 5 um, r = 1e5 / s.
    static PhysicalParams cs_reference();
};

/// Linear flyby R(t) = (v t, 0, Z0).
struct Trajectory {
    double speed;
    double closest_approach;

    Eigen::Vector3d position(double t) const {
        return {speed * t, 0.0, closest_approach};
    }
};

/// Wigner 3j symbol, Racah sum formula. Angular momenta are half-integers
/// passed as doubles; selection-rule violations give 0.
double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);

/// Wigner 6j symbol, Racah sum formula.
double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);

/// <L'_{J'} m'| chi_q |L_J m> via the 3j/6j product at electron spin 1/2.
/// The radial integral is absorbed into the dipole magnitude mu0.
double dipole_matrix_element(double lp, double jp, double mjp, int q,
                             double l, double j, double mj);

/// Transition matrices M_x, M_y, M_z on a fixed |L_J, m_J> basis.
struct TransitionMatrices {
    Matrix mx, my, mz;
};

/// 4-level basis {|S1/2,-1/2>, |P1/2,-1/2>, |S1/2,1/2>, |P1/2,1/2>}
/// used at single-phonon resonance.
TransitionMatrices single_phonon_transition_matrices();

/// 7-level basis {|s>, |s'>, |P1/2,-1/2>, |P1/2,1/2>, |P3/2,-1/2>,
/// |P3/2,1/2>, |P3/2,3/2>}. Unprimed matrices couple |s> to the P
/// manifold, primed couple |s'>.
struct TwoPhononTransitionMatrices {
    TransitionMatrices m;        // S - P
    TransitionMatrices m_prime;  // P - S'
};
TwoPhononTransitionMatrices two_phonon_transition_matrices();

/// Single-phonon coupling gamma = (Q mu0 z_osc / 4 pi eps0 hbar R^5) (3Z^2-R^2)/3.
double gamma_single(const PhysicalParams& p, const Eigen::Vector3d& pos);

/// Ladder-basis coupling strengths entering the 7-level Hamiltonian:
/// gamma_pm = C Z (X +- i Y)/R^5, gamma_z = C (3Z^2-R^2)/(3 R^5) with
/// C = Q mu0 z_osc / (4 pi eps0 hbar); primed values use mu0'.
struct GammaComponents {
    Complex plus, minus;
    double z;
    Complex plus_prime, minus_prime;
    double z_prime;
};
GammaComponents gamma_components(const PhysicalParams& p, const Eigen::Vector3d& pos);

/// Cartesian coupling profile for the flyby plots: gamma_x = C Z X / R^5,
/// gamma_y = C Z Y / R^5 and gamma_z = C (3Z^2 - R^2) / R^5, so that
/// gamma_z/gamma_x = (2 - A^2)/A along R = (A Z0, 0, Z0).
struct CouplingProfile {
    double x, y, z;
};
CouplingProfile coupling_profile(const PhysicalParams& p, const Eigen::Vector3d& pos);

/// Effective two-phonon rate
/// gamma_2 = (Q z_osc / 4 pi hbar eps0 R^5)^2 (mu0 mu0'/Delta) R^2(R^2+3Z^2)/3,
/// identically (3/2Delta)(gamma'_- gamma_+ + gamma_- gamma'_+ + 2 gamma_z gamma'_z).
double gamma_two_phonon(const PhysicalParams& p, const Eigen::Vector3d& pos);

/// Dipole-quadrupole two-phonon rate
/// gamma_2quad = (Q mu0 z_osc^2 / 4 pi eps0 hbar R^7) Z (5Z^2 - 3R^2)/2.
double gamma_quadrupole(const PhysicalParams& p, const Eigen::Vector3d& pos);

enum class CouplingKind { single, two_phonon, quadrupole };

/// Integrated coupling G = int dt gamma(t) over the linear flyby, by
/// adaptive Gauss-Kronrod on the tan-substituted finite interval.
/// Relative tolerance 1e-8; throws QuadratureError when not met.
double integrated_coupling(const PhysicalParams& p, const Trajectory& traj,
                           CouplingKind kind);

/// Result of the second-order block-diagonalisation of the 7-level
/// interaction Hamiltonian. Signs follow the convention of the effective
/// two-phonon interaction written as +hbar gamma_2 |s><s'| (a^dag)^2 + h.c.
struct EffectiveTwoLevelBlock {
    double two_phonon_coupling;    // off-diagonal rate, rad/s
    double shift_s;                // dispersive a^dag a coefficient on |s>, rad/s
    double shift_s_prime;          // same on |s'>
    bool adiabatic_ok;             // |Delta| >> all single-phonon rates
};

/// Adiabatic elimination of the P manifold: builds the 7-level coupling
/// matrix at the given position and reduces it to the {|s>,|s'>} block at
/// second order in 1/Delta.
EffectiveTwoLevelBlock eliminate_p_manifold(const PhysicalParams& p,
                                            const Eigen::Vector3d& pos);

/// Bose occupation 1/(e^{hbar omega / kB T} - 1).
double nbar_from_temperature(double omega_osc, double temperature);

} // namespace rydosc
