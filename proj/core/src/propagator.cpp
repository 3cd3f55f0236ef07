#include "rydosc/propagator.hpp"

#include <cmath>

namespace rydosc {

Matrix propagator_matrix(const PassageChannel& channel, const FockSpace& space) {
    const int n = space.dim;
    Matrix u = Matrix::Identity(2 * n, 2 * n);
    const Complex mi(0.0, -1.0);
    if (channel.mode == ResonanceMode::single_phonon) {
        // Blocks {|p,m>, |s,m+1>}; |p> occupies the first atom slot.
        for (int m = 0; m + 1 < n; ++m) {
            const double theta = std::sqrt(m + 1.0) * channel.coupling;
            const int i = m;           // |p, m>
            const int j = n + m + 1;   // |s, m+1>
            u(i, i) = std::cos(theta);
            u(j, j) = std::cos(theta);
            u(i, j) = mi * std::sin(theta);
            u(j, i) = mi * std::sin(theta);
        }
    } else {
        // Blocks {|s',m>, |s,m+2>}; blocks that would cross the truncation
        // boundary stay identity.
        for (int m = 0; m + 2 < n; ++m) {
            const double theta = std::sqrt((m + 1.0) * (m + 2.0)) * channel.coupling;
            const int i = m;           // |s', m>
            const int j = n + m + 2;   // |s, m+2>
            u(i, i) = std::cos(theta);
            u(j, j) = std::cos(theta);
            u(i, j) = mi * std::sin(theta);
            u(j, i) = mi * std::sin(theta);
        }
    }
    return u;
}

Passage::Passage(const PassageChannel& channel, const FockSpace& space)
    : channel_(channel), space_(space), unitary_(propagator_matrix(channel, space)) {
    const int n = space.dim;
    const Complex upper = channel.atom.beta(); // amplitude on |p> / |s'>
    const Complex lower = channel.atom.alpha;
    // Kraus operators K_c = sum_a U_{c,a} psi_a over the atom index.
    kraus_upper_ = upper * unitary_.block(0, 0, n, n) +
                     lower * unitary_.block(0, n, n, n);
    kraus_lower_ = upper * unitary_.block(n, 0, n, n) +
                     lower * unitary_.block(n, n, n, n);
}

DensityMatrix Passage::apply(const DensityMatrix& rho) const {
    Matrix out = kraus_upper_ * rho.rho * kraus_upper_.adjoint() +
                 kraus_lower_ * rho.rho * kraus_lower_.adjoint();
    hermitize(out);
    DensityMatrix result{rho.space, std::move(out)};
    require_within_truncation(result, "apply_passage");
    return result;
}

DensityMatrix apply_passage(const PassageChannel& channel, const DensityMatrix& rho) {
    return Passage(channel, rho.space).apply(rho);
}

PassageTrajectory iterate_passages(const PassageChannel& channel,
                                   const DensityMatrix& rho0, int k,
                                   const PassageHook& between) {
    if (k < 1) throw DomainError("iterate_passages: k must be >= 1");
    Passage passage(channel, rho0.space);
    PassageTrajectory traj;
    traj.states.reserve(k + 1);
    traj.states.push_back(rho0);
    for (int i = 1; i <= k; ++i) {
        DensityMatrix next = passage.apply(traj.states.back());
        if (between) next = between(i, next);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

Matrix choi_matrix(const PassageChannel& channel, const FockSpace& space) {
    const int n = space.dim;
    Passage passage(channel, space);
    const Matrix u = passage.unitary();
    const Complex upper = channel.atom.beta();
    const Complex lower = channel.atom.alpha;
    const Matrix k0 = upper * u.block(0, 0, n, n) + lower * u.block(0, n, n, n);
    const Matrix k1 = upper * u.block(n, 0, n, n) + lower * u.block(n, n, n, n);
    Matrix choi = Matrix::Zero(n * n, n * n);
    for (const Matrix& k : {k0, k1}) {
        Vector w(n * n);
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i) w(m * n + i) = k(m, i);
        choi += w * w.adjoint();
    }
    return choi;
}

} // namespace rydosc
