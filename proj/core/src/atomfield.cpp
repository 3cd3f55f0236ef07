#include "rydosc/atomfield.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <vector>

namespace rydosc {

namespace {

constexpr int kMaxFactorial = 170;

long double factorial(int n) {
    static const auto table = [] {
        std::array<long double, kMaxFactorial + 1> t{};
        t[0] = 1.0L;
        for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table[n];
}

bool is_half_integer(double x) {
    return std::abs(2.0 * x - std::llround(2.0 * x)) < 1e-9;
}

int as_int(double x) { return static_cast<int>(std::llround(x)); }

bool triangle_ok(double a, double b, double c) {
    return c >= std::abs(a - b) - 1e-9 && c <= a + b + 1e-9 &&
           is_half_integer(a + b + c) &&
           std::abs(a + b + c - std::llround(a + b + c)) < 1e-9;
}

long double triangle_coeff(double a, double b, double c) {
    return factorial(as_int(a + b - c)) * factorial(as_int(a - b + c)) *
           factorial(as_int(-a + b + c)) / factorial(as_int(a + b + c + 1));
}

} // namespace

double wigner_3j(double j1, double j2, double j3,
                 double m1, double m2, double m3) {
    for (double x : {j1, j2, j3, m1, m2, m3})
        if (!is_half_integer(x))
            throw DomainError("wigner_3j: arguments must be half-integers");
    if (j1 < 0 || j2 < 0 || j3 < 0)
        throw DomainError("wigner_3j: angular momenta must be non-negative");
    if (std::abs(m1 + m2 + m3) > 1e-9) return 0.0;
    if (std::abs(m1) > j1 + 1e-9 || std::abs(m2) > j2 + 1e-9 ||
        std::abs(m3) > j3 + 1e-9)
        return 0.0;
    if (!triangle_ok(j1, j2, j3)) return 0.0;
    // j + m must be integral for each column.
    for (auto [j, m] : {std::pair{j1, m1}, {j2, m2}, {j3, m3}})
        if (std::abs(j + m - std::llround(j + m)) > 1e-9) return 0.0;

    const int t_min = std::max({0, as_int(j2 - j3 - m1), as_int(j1 - j3 + m2)});
    const int t_max = std::min({as_int(j1 + j2 - j3), as_int(j1 - m1), as_int(j2 + m2)});
    long double sum = 0.0L;
    for (int t = t_min; t <= t_max; ++t) {
        const long double denom =
            factorial(t) * factorial(as_int(j3 - j2 + m1) + t) *
            factorial(as_int(j3 - j1 - m2) + t) * factorial(as_int(j1 + j2 - j3) - t) *
            factorial(as_int(j1 - m1) - t) * factorial(as_int(j2 + m2) - t);
        sum += ((t % 2 == 0) ? 1.0L : -1.0L) / denom;
    }
    const long double pref =
        std::sqrt(triangle_coeff(j1, j2, j3) *
                  factorial(as_int(j1 + m1)) * factorial(as_int(j1 - m1)) *
                  factorial(as_int(j2 + m2)) * factorial(as_int(j2 - m2)) *
                  factorial(as_int(j3 + m3)) * factorial(as_int(j3 - m3)));
    const int phase = as_int(j1 - j2 - m3);
    return static_cast<double>(((phase % 2 + 2) % 2 == 0 ? 1.0L : -1.0L) * pref * sum);
}

double wigner_6j(double j1, double j2, double j3,
                 double j4, double j5, double j6) {
    for (double x : {j1, j2, j3, j4, j5, j6})
        if (!is_half_integer(x))
            throw DomainError("wigner_6j: arguments must be half-integers");
    if (!triangle_ok(j1, j2, j3) || !triangle_ok(j1, j5, j6) ||
        !triangle_ok(j4, j2, j6) || !triangle_ok(j4, j5, j3))
        return 0.0;

    const double a1 = j1 + j2 + j3, a2 = j1 + j5 + j6;
    const double a3 = j4 + j2 + j6, a4 = j4 + j5 + j3;
    const double b1 = j1 + j2 + j4 + j5, b2 = j2 + j3 + j5 + j6;
    const double b3 = j3 + j1 + j6 + j4;
    const int t_min = as_int(std::max({a1, a2, a3, a4}));
    const int t_max = as_int(std::min({b1, b2, b3}));
    long double sum = 0.0L;
    for (int t = t_min; t <= t_max; ++t) {
        const long double denom =
            factorial(t - as_int(a1)) * factorial(t - as_int(a2)) *
            factorial(t - as_int(a3)) * factorial(t - as_int(a4)) *
            factorial(as_int(b1) - t) * factorial(as_int(b2) - t) *
            factorial(as_int(b3) - t);
        sum += ((t % 2 == 0) ? 1.0L : -1.0L) * factorial(t + 1) / denom;
    }
    const long double pref = std::sqrt(
        triangle_coeff(j1, j2, j3) * triangle_coeff(j1, j5, j6) *
        triangle_coeff(j4, j2, j6) * triangle_coeff(j4, j5, j3));
    return static_cast<double>(pref * sum);
}

double dipole_matrix_element(double lp, double jp, double mjp, int q,
                             double l, double j, double mj) {
    if (q < -1 || q > 1)
        throw DomainError("dipole_matrix_element: q must be -1, 0 or 1");
    // Electron spin 1/2 for the alkali levels considered here; note that
    // J' - L' is *not* a valid substitute (it is -1/2 for P_{1/2} bras and
    // would zero the P_{1/2} -> S elements through the 6j triangle rule).
    const double sp = 0.5;
    if (std::abs(std::abs(jp - lp) - 0.5) > 1e-9 || std::abs(std::abs(j - l) - 0.5) > 1e-9)
        throw DomainError("dipole_matrix_element: |J - L| must be 1/2");
    const double threej_m = wigner_3j(jp, 1.0, j, -mjp, q, mj);
    const double sixj = wigner_6j(lp, 1.0, l, j, sp, jp);
    const double threej_l = wigner_3j(lp, 1.0, l, 0.0, 0.0, 0.0);
    const int phase = as_int((jp - mjp) + (j + sp + 1.0));
    const double sign = ((phase % 2 + 2) % 2 == 0) ? 1.0 : -1.0;
    return sign * threej_m * sixj * threej_l *
           std::sqrt((2.0 * jp + 1.0) * (2.0 * j + 1.0)) *
           std::sqrt((2.0 * lp + 1.0) * (2.0 * l + 1.0));
}

namespace {

struct Level {
    double l, j, mj;
};

// chi_x = (chi_{-1} - chi_{+1})/sqrt(2), chi_y = i(chi_{+1} + chi_{-1})/sqrt(2).
Complex chi_cartesian(const Level& bra, const Level& ket, int axis) {
    auto elem = [&](int q) {
        return dipole_matrix_element(bra.l, bra.j, bra.mj, q, ket.l, ket.j, ket.mj);
    };
    switch (axis) {
        case 0: return Complex((elem(-1) - elem(+1)) / std::sqrt(2.0), 0.0);
        case 1: return Complex(0.0, (elem(+1) + elem(-1)) / std::sqrt(2.0));
        default: return Complex(elem(0), 0.0);
    }
}

TransitionMatrices matrices_on_basis(const std::vector<Level>& basis) {
    const int n = static_cast<int>(basis.size());
    TransitionMatrices t{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
    Matrix* out[3] = {&t.mx, &t.my, &t.mz};
    for (int axis = 0; axis < 3; ++axis)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                (*out[axis])(r, c) = chi_cartesian(basis[r], basis[c], axis);
    return t;
}

} // namespace

TransitionMatrices single_phonon_transition_matrices() {
    const std::vector<Level> basis = {
        {0.0, 0.5, -0.5}, {1.0, 0.5, -0.5}, {0.0, 0.5, 0.5}, {1.0, 0.5, 0.5}};
    return matrices_on_basis(basis);
}

TwoPhononTransitionMatrices two_phonon_transition_matrices() {
    // Basis: |s>, |s'>, |P1/2,-1/2>, |P1/2,1/2>, |P3/2,-1/2>, |P3/2,1/2>, |P3/2,3/2>.
    const std::vector<Level> basis = {
        {0.0, 0.5, 0.5}, {0.0, 0.5, 0.5},
        {1.0, 0.5, -0.5}, {1.0, 0.5, 0.5},
        {1.0, 1.5, -0.5}, {1.0, 1.5, 0.5}, {1.0, 1.5, 1.5}};
    TransitionMatrices full = matrices_on_basis(basis);
    TwoPhononTransitionMatrices out;
    const int n = 7;
    auto mask = [&](const Matrix& m, int s_row) {
        Matrix r = Matrix::Zero(n, n);
        for (int p = 2; p < n; ++p) {
            r(s_row, p) = m(s_row, p);
            r(p, s_row) = m(p, s_row);
        }
        return r;
    };
    out.m = {mask(full.mx, 0), mask(full.my, 0), mask(full.mz, 0)};
    out.m_prime = {mask(full.mx, 1), mask(full.my, 1), mask(full.mz, 1)};
    return out;
}

void PhysicalParams::validate() const {
    if (charge <= 0 || z_osc <= 0 || mu0 <= 0 || mu0_prime <= 0 ||
        omega_osc <= 0 || speed <= 0 || closest_approach <= 0 || rate <= 0)
        throw DomainError("PhysicalParams: magnitudes must be strictly positive");
    if (delta == 0.0)
        throw DomainError("PhysicalParams: Delta must be non-zero for two-phonon paths");
}

PhysicalParams PhysicalParams::cs_reference() {
    using namespace constants;
    PhysicalParams p{};
    p.charge = 200.0 * elementary_charge;
    p.z_osc = 1e-13;
    p.mu0 = 1e4 * elementary_charge * bohr_radius;
    p.mu0_prime = p.mu0;
    p.delta = 2.0 * pi * 300e6;
    p.omega_osc = 2.0 * pi * 3e9;
    p.speed = 10.0;
    p.closest_approach = 5e-6;
    p.rate = 1e5;
    return p;
}

namespace {

/// Q mu z_osc / (4 pi eps0 hbar), the common dipole-coupling prefactor.
double coupling_prefactor(const PhysicalParams& p, double mu) {
    return p.charge * mu * p.z_osc / (constants::four_pi_eps0 * constants::hbar);
}

} // namespace

double gamma_single(const PhysicalParams& p, const Eigen::Vector3d& pos) {
    const double r2 = pos.squaredNorm();
    const double r = std::sqrt(r2);
    const double z = pos.z();
    return coupling_prefactor(p, p.mu0) * (3.0 * z * z - r2) / (3.0 * std::pow(r, 5));
}

GammaComponents gamma_components(const PhysicalParams& p, const Eigen::Vector3d& pos) {
    const double r2 = pos.squaredNorm();
    const double r5 = std::pow(std::sqrt(r2), 5);
    const double x = pos.x(), y = pos.y(), z = pos.z();
    const double c = coupling_prefactor(p, p.mu0) / r5;
    const double cp = coupling_prefactor(p, p.mu0_prime) / r5;
    GammaComponents g;
    g.plus = c * z * Complex(x, y);
    g.minus = c * z * Complex(x, -y);
    g.z = c * (3.0 * z * z - r2) / 3.0;
    g.plus_prime = cp * z * Complex(x, y);
    g.minus_prime = cp * z * Complex(x, -y);
    g.z_prime = cp * (3.0 * z * z - r2) / 3.0;
    return g;
}

CouplingProfile coupling_profile(const PhysicalParams& p, const Eigen::Vector3d& pos) {
    const double r2 = pos.squaredNorm();
    const double r5 = std::pow(std::sqrt(r2), 5);
    const double c = coupling_prefactor(p, p.mu0) / r5;
    return {c * pos.z() * pos.x(), c * pos.z() * pos.y(),
            c * (3.0 * pos.z() * pos.z() - r2)};
}

double gamma_two_phonon(const PhysicalParams& p, const Eigen::Vector3d& pos) {
    const double r2 = pos.squaredNorm();
    const double z2 = pos.z() * pos.z();
    const double r5 = std::pow(std::sqrt(r2), 5);
    const double c = p.charge * p.z_osc / (constants::four_pi_eps0 * constants::hbar * r5);
    return c * c * (p.mu0 * p.mu0_prime / p.delta) * r2 * (r2 + 3.0 * z2) / 3.0;
}

double gamma_quadrupole(const PhysicalParams& p, const Eigen::Vector3d& pos) {
    const double r2 = pos.squaredNorm();
    const double r7 = std::pow(std::sqrt(r2), 7);
    const double z = pos.z();
    const double c = p.charge * p.mu0 * p.z_osc * p.z_osc /
                     (constants::four_pi_eps0 * constants::hbar);
    return c * z * (5.0 * z * z - 3.0 * r2) / (2.0 * r7);
}

double integrated_coupling(const PhysicalParams& p, const Trajectory& traj,
                           CouplingKind kind) {
    auto rate_at = [&](double t) {
        const Eigen::Vector3d pos = traj.position(t);
        switch (kind) {
            case CouplingKind::single: return gamma_single(p, pos);
            case CouplingKind::two_phonon: return gamma_two_phonon(p, pos);
            default: return gamma_quadrupole(p, pos);
        }
    };
    // t = (Z0/v) tan(theta) maps the flyby onto a finite interval; the
    // integrand then decays smoothly to 0 at the endpoints.
    const double scale = traj.closest_approach / traj.speed;
    auto integrand = [&](double theta) {
        const double c = std::cos(theta);
        return rate_at(scale * std::tan(theta)) * scale / (c * c);
    };
    double error = 0.0;
    const double result = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, -constants::pi / 2.0, constants::pi / 2.0, 15, 1e-10, &error);
    if (std::abs(result) > 0.0 && error / std::abs(result) > 1e-8) {
        std::ostringstream msg;
        msg << "integrated_coupling: relative error estimate " << error / std::abs(result)
            << " above 1e-8";
        throw QuadratureError(msg.str());
    }
    return result;
}

EffectiveTwoLevelBlock eliminate_p_manifold(const PhysicalParams& p,
                                            const Eigen::Vector3d& pos) {
    if (p.delta == 0.0)
        throw DomainError("eliminate_p_manifold: Delta must be non-zero");

    const auto tm = two_phonon_transition_matrices();
    const double r2 = pos.squaredNorm();
    const double r5 = std::pow(std::sqrt(r2), 5);
    const double x = pos.x(), y = pos.y(), z = pos.z();

    // Coupling coefficient matrix W such that the interaction reads
    // hbar W_{ab} |a><b| (a + a^dag) before the rotating wave approximation:
    // W = -(C/R^5)[M_z (3Z^2-R^2) + 3Z (M_x X + M_y Y)], per dipole species.
    auto coupling = [&](const TransitionMatrices& m, double mu) {
        const double c = coupling_prefactor(p, mu) / r5;
        return (-c * ((3.0 * z * z - r2) * m.mz + 3.0 * z * (x * m.mx + y * m.my))).eval();
    };
    const Matrix w = coupling(tm.m, p.mu0) + coupling(tm.m_prime, p.mu0_prime);

    double max_rate = 0.0;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) max_rate = std::max(max_rate, std::abs(w(i, j)));

    // Joint (7-level atom) x (small Fock register) representation of the
    // rotating-frame interaction: |s> rows carry a^dag, |s'> rows carry a.
    const int nf = 8;
    const FockSpace reg(nf, 1.0);
    const Matrix a = annihilation(reg);
    const Matrix ad = a.adjoint();
    const Matrix id = Matrix::Identity(nf, nf);
    const int dim = 7 * nf;
    auto block = [&](Matrix& m, int i, int j) {
        return m.block(i * nf, j * nf, nf, nf);
    };

    Matrix vx = Matrix::Zero(dim, dim);
    for (int pl = 2; pl < 7; ++pl) {
        block(vx, 0, pl) = w(0, pl) * ad;
        block(vx, pl, 0) = w(pl, 0) * a;
        block(vx, 1, pl) = w(1, pl) * a;
        block(vx, pl, 1) = w(pl, 1) * ad;
    }

    // Second-order block reduction: the projected block is
    // -(1/Delta) P V Q V P, with the whole P manifold at energy Delta.
    Matrix h2 = Matrix::Zero(dim, dim);
    {
        Matrix vpq = Matrix::Zero(dim, dim);
        for (int pl = 2; pl < 7; ++pl) {
            block(vpq, 0, pl) = block(vx, 0, pl);
            block(vpq, 1, pl) = block(vx, 1, pl);
        }
        h2 = -(vpq * (vx - vpq)) / p.delta;
    }

    EffectiveTwoLevelBlock out{};
    // <s, n+2 | H2 | s', n> = c sqrt((n+1)(n+2)); reported with the sign
    // convention of +gamma_2 |s><s'| (a^dag)^2.
    const Complex c2 = h2(0 * nf + 2, 1 * nf + 0) / std::sqrt(2.0);
    out.two_phonon_coupling = -c2.real();
    const int n_probe = 1;
    out.shift_s = -h2(0 * nf + n_probe, 0 * nf + n_probe).real() / n_probe;
    out.shift_s_prime = -h2(1 * nf + n_probe, 1 * nf + n_probe).real() / (n_probe + 1);
    out.adiabatic_ok = std::abs(p.delta) > 100.0 * max_rate;
    return out;
}

double nbar_from_temperature(double omega_osc, double temperature) {
    if (temperature <= 0.0)
        throw DomainError("nbar_from_temperature: temperature must be positive");
    const double x = constants::hbar * omega_osc / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

} // namespace rydosc
