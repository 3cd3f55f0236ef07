#pragma once

#include <complex>
#include <Eigen/Dense>

#include "rydosc/errors.hpp"

namespace rydosc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Truncated Fock space |0>..|N-1> with a tail tolerance used to flag
/// states whose population has leaked to the top levels.
struct FockSpace {
    int dim = 40;
    double tail_tolerance = 1e-6;

    FockSpace() = default;
    FockSpace(int n, double eps = 1e-6) : dim(n), tail_tolerance(eps) {
        if (n < 2) throw DomainError("FockSpace: dimension must be >= 2");
        if (eps < 0.0) throw DomainError("FockSpace: tail tolerance must be >= 0");
    }

    bool operator==(const FockSpace&) const = default;
};

/// Initial state of each passing atom, alpha|s> + beta|upper> with
/// beta = sqrt(1-|alpha|^2) e^{i theta}. The "upper" level is |p> at
/// single-phonon resonance and |s'> at two-phonon resonance.
struct AtomState {
    Complex alpha{1.0, 0.0};
    double beta_magnitude_sq = 0.0;
    double theta = 0.0;

    /// Real alpha fixed by normalisation; the physical relative phase is theta.
    static AtomState from_population(double beta_sq, double theta = 0.0) {
        if (beta_sq < 0.0 || beta_sq > 1.0)
            throw DomainError("AtomState: |beta|^2 must lie in [0,1]");
        AtomState a;
        a.alpha = std::sqrt(1.0 - beta_sq);
        a.beta_magnitude_sq = beta_sq;
        a.theta = theta;
        return a;
    }

    Complex beta() const {
        return std::sqrt(beta_magnitude_sq) * std::exp(Complex(0.0, theta));
    }
};

/// Oscillator density matrix on a truncated Fock space.
struct DensityMatrix {
    FockSpace space;
    Matrix rho;

    DensityMatrix() = default;
    DensityMatrix(FockSpace s, Matrix m) : space(s), rho(std::move(m)) {}
};

/// <n-1| a |n> = sqrt(n).
Matrix annihilation(const FockSpace& space);
Matrix creation(const FockSpace& space);

DensityMatrix vacuum(const FockSpace& space);
DensityMatrix fock_projector(const FockSpace& space, int n);

/// Diagonal geometric distribution renormalised on the truncated space.
/// Throws TruncationError if the discarded tail exceeds the tolerance.
DensityMatrix thermal_state(const FockSpace& space, double nbar);

/// Displacement operator exp(A a^dag - A* a), built by eigendecomposition
/// of the Hermitian generator i(A a^dag - A* a).
Matrix displacement(const FockSpace& space, Complex amplitude);

/// D(A) rho_th D^dag(A).
DensityMatrix displaced_thermal(const FockSpace& space, Complex amplitude, double nbar);

/// (rho + rho^dag)/2, applied after every evolution step to kill
/// round-off drift.
void hermitize(Matrix& rho);

double purity(const DensityMatrix& rho);
double mean_phonons(const DensityMatrix& rho);
Complex expectation(const Matrix& op, const DensityMatrix& rho);

/// Total population in the top `levels` Fock levels.
double top_population(const DensityMatrix& rho, int levels = 2);

/// Throws TruncationError when top_population exceeds the space tolerance.
void require_within_truncation(const DensityMatrix& rho, const char* where);

/// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Diagnostics for the DensityMatrix invariants (Hermiticity, trace,
/// positivity). Used by tests and by the evolution engines.
struct StateDiagnostics {
    double hermiticity_defect;  // max |rho - rho^dag|
    double trace_defect;        // |Tr rho - 1|
    double min_eigenvalue;
    double top_population;
};
StateDiagnostics diagnose(const DensityMatrix& rho);

} // namespace rydosc
