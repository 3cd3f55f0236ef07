#include <doctest.h>

#include "rydosc/fock.hpp"

using namespace rydosc;

TEST_CASE("ladder operators have the canonical matrix elements") {
    const FockSpace space(6);
    const Matrix a = annihilation(space);
    const Matrix adag = creation(space);
    for (int n = 1; n < space.dim; ++n) {
        CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(double(n))));
        CHECK(adag(n, n - 1).real() == doctest::Approx(std::sqrt(double(n))));
    }
    // [a, a^dag] = 1 everywhere except the truncation corner.
    const Matrix comm = a * adag - adag * a;
    for (int n = 0; n < space.dim - 1; ++n)
        CHECK(comm(n, n).real() == doctest::Approx(1.0));
}

TEST_CASE("thermal state statistics") {
    const FockSpace space(40);
    const double nbar = 0.5;
    const DensityMatrix rho = thermal_state(space, nbar);
    CHECK(rho.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_phonons(rho) == doctest::Approx(nbar).epsilon(1e-8));
    CHECK(purity(rho) == doctest::Approx(1.0 / (2.0 * nbar + 1.0)).epsilon(1e-8));

    // Hot state on a tiny space must trip the tail guard.
    CHECK_THROWS_AS(thermal_state(FockSpace(4), 5.0), TruncationError);
}

TEST_CASE("displacement is unitary and produces a coherent state") {
    const FockSpace space(40);
    const Complex amp(0.7, -0.4);
    const Matrix d = displacement(space, amp);
    CHECK((d * d.adjoint() - Matrix::Identity(space.dim, space.dim)).cwiseAbs().maxCoeff()
          < 1e-10);

    const DensityMatrix coherent = displaced_thermal(space, amp, 0.0);
    CHECK(mean_phonons(coherent) == doctest::Approx(std::norm(amp)).epsilon(1e-8));
    CHECK(purity(coherent) == doctest::Approx(1.0).epsilon(1e-10));
    const Complex mean_a = expectation(annihilation(space), coherent);
    CHECK(std::abs(mean_a - amp) < 1e-8);
}

TEST_CASE("fidelity endpoints") {
    const FockSpace space(20);
    const DensityMatrix vac = vacuum(space);
    const DensityMatrix one = fock_projector(space, 1);
    CHECK(fidelity(vac, vac) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fidelity(vac, one) == doctest::Approx(0.0).epsilon(1e-10));
    // Coherent-state overlap: F = e^{-|A|^2} for vacuum vs D(A)|0>.
    const Complex amp(0.5, 0.2);
    const DensityMatrix coh = displaced_thermal(space, amp, 0.0);
    CHECK(fidelity(vac, coh) == doctest::Approx(std::exp(-std::norm(amp))).epsilon(1e-8));
    // Uhlmann fidelity is symmetric up to eigensolver round-off.
    CHECK(fidelity(vac, coh) == doctest::Approx(fidelity(coh, vac)).epsilon(1e-6));
}

TEST_CASE("truncation guard") {
    const FockSpace space(10);
    const DensityMatrix top = fock_projector(space, 9);
    CHECK(top_population(top) == doctest::Approx(1.0));
    CHECK_THROWS_AS(require_within_truncation(top, "test"), TruncationError);
    CHECK_NOTHROW(require_within_truncation(vacuum(space), "test"));
}

TEST_CASE("diagnostics on a valid state") {
    const DensityMatrix rho = thermal_state(FockSpace(30), 0.8);
    const StateDiagnostics d = diagnose(rho);
    CHECK(d.hermiticity_defect < 1e-14);
    CHECK(d.trace_defect < 1e-12);
    CHECK(d.min_eigenvalue > -1e-14);
}

TEST_CASE("atom state validation and phase") {
    CHECK_THROWS_AS(AtomState::from_population(-0.1), DomainError);
    CHECK_THROWS_AS(AtomState::from_population(1.1), DomainError);
    const AtomState a = AtomState::from_population(0.2, 0.3);
    CHECK(std::norm(a.alpha) + a.beta_magnitude_sq == doctest::Approx(1.0));
    CHECK(std::arg(a.beta()) == doctest::Approx(0.3));
}
