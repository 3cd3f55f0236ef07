#include "rydosc/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace rydosc {

Matrix annihilation(const FockSpace& space) {
    Matrix a = Matrix::Zero(space.dim, space.dim);
    for (int n = 1; n < space.dim; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Matrix creation(const FockSpace& space) {
    return annihilation(space).adjoint();
}

DensityMatrix vacuum(const FockSpace& space) {
    return fock_projector(space, 0);
}

DensityMatrix fock_projector(const FockSpace& space, int n) {
    if (n < 0 || n >= space.dim)
        throw DomainError("fock_projector: level outside the truncated space");
    Matrix rho = Matrix::Zero(space.dim, space.dim);
    rho(n, n) = 1.0;
    return {space, std::move(rho)};
}

DensityMatrix thermal_state(const FockSpace& space, double nbar) {
    if (nbar < 0.0) throw DomainError("thermal_state: nbar must be >= 0");
    Matrix rho = Matrix::Zero(space.dim, space.dim);
    if (nbar == 0.0) {
        rho(0, 0) = 1.0;
        return {space, std::move(rho)};
    }
    const double q = nbar / (1.0 + nbar);
    // Discarded tail of the geometric distribution is q^N.
    const double tail = std::pow(q, space.dim);
    if (tail > space.tail_tolerance) {
        std::ostringstream msg;
        msg << "thermal_state: tail mass " << tail << " exceeds tolerance "
            << space.tail_tolerance << " (nbar=" << nbar << ", N=" << space.dim << ")";
        throw TruncationError(msg.str());
    }
    double norm = 0.0;
    for (int n = 0; n < space.dim; ++n) norm += std::pow(q, n);
    for (int n = 0; n < space.dim; ++n) rho(n, n) = std::pow(q, n) / norm;
    return {space, std::move(rho)};
}

Matrix displacement(const FockSpace& space, Complex amplitude) {
    // K = A a^dag - A* a is anti-Hermitian; H = iK is Hermitian, so
    // D = exp(K) = exp(-iH) via the self-adjoint eigendecomposition.
    const Matrix a = annihilation(space);
    const Matrix k = amplitude * a.adjoint() - std::conj(amplitude) * a;
    const Matrix h = Complex(0.0, 1.0) * k;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& evals = es.eigenvalues();
    Vector phases(space.dim);
    for (int i = 0; i < space.dim; ++i)
        phases(i) = std::exp(Complex(0.0, -evals(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DensityMatrix displaced_thermal(const FockSpace& space, Complex amplitude, double nbar) {
    DensityMatrix th = thermal_state(space, nbar);
    if (amplitude == Complex(0.0, 0.0)) return th;
    const Matrix d = displacement(space, amplitude);
    Matrix rho = d * th.rho * d.adjoint();
    hermitize(rho);
    DensityMatrix out{space, std::move(rho)};
    require_within_truncation(out, "displaced_thermal");
    return out;
}

void hermitize(Matrix& rho) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
}

double purity(const DensityMatrix& rho) {
    return (rho.rho * rho.rho).trace().real();
}

double mean_phonons(const DensityMatrix& rho) {
    double n = 0.0;
    for (int k = 0; k < rho.space.dim; ++k) n += k * rho.rho(k, k).real();
    return n;
}

Complex expectation(const Matrix& op, const DensityMatrix& rho) {
    return (op * rho.rho).trace();
}

double top_population(const DensityMatrix& rho, int levels) {
    double p = 0.0;
    for (int k = std::max(0, rho.space.dim - levels); k < rho.space.dim; ++k)
        p += rho.rho(k, k).real();
    return p;
}

void require_within_truncation(const DensityMatrix& rho, const char* where) {
    // Two levels, not one: two-phonon dynamics preserves parity, so an
    // even-parity state can pile up at level N-2 while leaving N-1 empty.
    const double p = top_population(rho, 2);
    if (p > rho.space.tail_tolerance) {
        std::ostringstream msg;
        msg << where << ": population " << p << " in the top Fock levels exceeds "
            << rho.space.tail_tolerance;
        throw TruncationError(msg.str());
    }
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.space.dim != b.space.dim)
        throw DomainError("fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a.rho);
    Vector sq = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    const Matrix sqrt_a = ea.eigenvectors() * sq.asDiagonal() * ea.eigenvectors().adjoint();
    const Matrix m = sqrt_a * b.rho * sqrt_a;
    Eigen::SelfAdjointEigenSolver<Matrix> em(m);
    double f = 0.0;
    for (int i = 0; i < em.eigenvalues().size(); ++i)
        f += std::sqrt(std::max(0.0, em.eigenvalues()(i)));
    return f * f;
}

StateDiagnostics diagnose(const DensityMatrix& rho) {
    StateDiagnostics d{};
    d.hermiticity_defect = (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
    d.trace_defect = std::abs(rho.rho.trace().real() - 1.0);
    Matrix h = rho.rho;
    hermitize(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    d.top_population = top_population(rho, 2);
    return d;
}

} // namespace rydosc
