#include "rydosc/lindblad.hpp"

#include <algorithm>
#include <cmath>

namespace rydosc {

namespace {

/// Precomputed Lindblad generator: L rho = -i[H,rho] + sum_j D[J_j] rho.
struct Generator {
    Matrix ham;
    bool has_ham = false;
    std::vector<Matrix> jumps;
    std::vector<Matrix> jtj_half; // 0.5 J^dag J

    void add_jump(Matrix j) {
        jtj_half.push_back(0.5 * (j.adjoint() * j));
        jumps.push_back(std::move(j));
    }

    Matrix apply(const Matrix& rho) const {
        Matrix out = Matrix::Zero(rho.rows(), rho.cols());
        if (has_ham) out = Complex(0.0, -1.0) * (ham * rho - rho * ham);
        for (std::size_t j = 0; j < jumps.size(); ++j)
            out += jumps[j] * rho * jumps[j].adjoint() -
                   (jtj_half[j] * rho + rho * jtj_half[j]);
        return out;
    }
};

Generator build_generator(const MasterEquation& me, const FockSpace& space) {
    me.validate();
    Generator gen;
    const Matrix a = annihilation(space);
    if (me.include_atomic) {
        const Matrix op = (me.mode == ResonanceMode::single_phonon)
                              ? a
                              : Matrix(a * a);
        const Complex alpha = me.atom.alpha;
        const Complex beta = me.atom.beta();
        const double g = me.coupling;
        gen.ham = g * (alpha * std::conj(beta) * op +
                       beta * std::conj(alpha) * op.adjoint());
        gen.has_ham = gen.ham.cwiseAbs().maxCoeff() > 0.0;
        gen.add_jump(g * alpha * op);
        gen.add_jump(g * beta * op.adjoint());
    }
    if (me.bath) {
        const double gm = me.bath->gamma_m / me.rate; // tau = r t
        const double nb = me.bath->nbar_th;
        if (gm * (nb + 1.0) > 0.0) gen.add_jump(std::sqrt(gm * (nb + 1.0)) * a);
        if (gm * nb > 0.0) gen.add_jump(std::sqrt(gm * nb) * a.adjoint());
    }
    return gen;
}

// Cash-Karp embedded 4(5) tableau (autonomous generator, so the node
// times are not needed).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 3.0 / 10, a42 = -9.0 / 10, a43 = 6.0 / 5;
constexpr double a51 = -11.0 / 54, a52 = 5.0 / 2, a53 = -70.0 / 27, a54 = 35.0 / 27;
constexpr double a61 = 1631.0 / 55296, a62 = 175.0 / 512, a63 = 575.0 / 13824,
                 a64 = 44275.0 / 110592, a65 = 253.0 / 4096;
constexpr double b1 = 37.0 / 378, b3 = 250.0 / 621, b4 = 125.0 / 594,
                 b6 = 512.0 / 1771;
constexpr double d1 = b1 - 2825.0 / 27648, d3 = b3 - 18575.0 / 48384,
                 d4 = b4 - 13525.0 / 55296, d5 = -277.0 / 14336,
                 d6 = b6 - 1.0 / 4;

/// Integrate y' = gen(y) over [0, duration]; invokes sample(tau, y) at
/// each accepted step boundary requested through `targets` (sorted,
/// strictly increasing, last element == duration).
long integrate(const Generator& gen, Matrix& y, double duration,
               const EvolveOptions& opts,
               const std::vector<double>& targets,
               const std::function<void(double, const Matrix&)>& sample) {
    long steps = 0;
    double tau = 0.0;
    double h = std::min(opts.initial_step, duration);
    std::size_t next_target = 0;
    Matrix k1, k2, k3, k4, k5, k6, y5;
    while (tau < duration - 1e-14 * duration) {
        double limit = duration;
        if (next_target < targets.size()) limit = targets[next_target];
        const double dt = std::min(h, limit - tau);

        k1 = gen.apply(y);
        k2 = gen.apply(y + dt * a21 * k1);
        k3 = gen.apply(y + dt * (a31 * k1 + a32 * k2));
        k4 = gen.apply(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = gen.apply(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = gen.apply(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y5 = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
        const Matrix err = dt * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);

        // RMS over entries of the tolerance-scaled local error.
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double scale =
                opts.abs_tol +
                opts.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
            const double e = std::abs(err(i)) / scale;
            acc += e * e;
        }
        const double err_norm = std::sqrt(acc / static_cast<double>(err.size()));
        if (!std::isfinite(err_norm))
            throw StiffnessError("lindblad: non-finite state during integration");

        if (err_norm <= 1.0) {
            tau += dt;
            y = y5;
            hermitize(y);
            ++steps;
            if (next_target < targets.size() &&
                tau >= targets[next_target] - 1e-12 * duration) {
                if (sample) sample(targets[next_target], y);
                ++next_target;
            }
        }
        const double factor =
            (err_norm > 0.0)
                ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0)
                : 5.0;
        h = dt * factor;
        if (h < opts.step_floor)
            throw StiffnessError("lindblad: step size fell below the floor");
    }
    return steps;
}

} // namespace

Matrix rhs(const MasterEquation& me, const DensityMatrix& rho) {
    return build_generator(me, rho.space).apply(rho.rho);
}

EvolveResult evolve(const MasterEquation& me, const DensityMatrix& rho0,
                    double duration, const EvolveOptions& opts) {
    if (duration < 0.0) throw DomainError("evolve: duration must be >= 0");
    const Generator gen = build_generator(me, rho0.space);
    EvolveResult result;
    result.state = rho0;
    if (duration == 0.0) return result;

    std::vector<double> targets;
    for (int i = 1; i <= opts.n_samples; ++i)
        targets.push_back(duration * i / opts.n_samples);

    Matrix y = rho0.rho;
    result.steps_taken = integrate(
        gen, y, duration, opts, targets,
        [&](double tau, const Matrix& m) {
            result.sample_times.push_back(tau);
            result.samples.emplace_back(rho0.space, m);
        });
    result.state = DensityMatrix{rho0.space, std::move(y)};
    require_within_truncation(result.state, "evolve");
    return result;
}

SteadyStateResult evolve_to_steady(const MasterEquation& me, const DensityMatrix& rho0,
                                   const EvolveOptions& opts) {
    const Generator gen = build_generator(me, rho0.space);
    constexpr double tau_max = 1e3;
    constexpr double residual_tol = 1e-9;
    SteadyStateResult result;
    Matrix y = rho0.rho;
    double tau = 0.0;
    double chunk = 1.0;
    while (tau < tau_max) {
        const double dt = std::min(chunk, tau_max - tau);
        integrate(gen, y, dt, opts, {}, nullptr);
        tau += dt;
        if (gen.apply(y).norm() < residual_tol) {
            result.converged = true;
            break;
        }
        chunk = std::min(2.0 * chunk, 50.0);
    }
    result.state = DensityMatrix{rho0.space, std::move(y)};
    require_within_truncation(result.state, "evolve_to_steady");
    result.tau_reached = tau;
    return result;
}

SinglePhononSteadyState single_phonon_steady_state(const AtomState& atom,
                                                   double coupling) {
    const double contrast = std::norm(atom.alpha) - atom.beta_magnitude_sq;
    if (contrast <= 0.0)
        throw DomainError("single_phonon_steady_state: requires |alpha|^2 > |beta|^2");
    if (coupling <= 0.0)
        throw DomainError("single_phonon_steady_state: coupling must be > 0");
    SinglePhononSteadyState out;
    out.nbar = atom.beta_magnitude_sq / contrast;
    out.amplitude =
        Complex(0.0, -2.0) * std::conj(atom.alpha) * atom.beta() / (coupling * contrast);
    return out;
}

DisplacedFrameResult evolve_single_phonon_frame(const AtomState& atom, double coupling,
                                                const DensityMatrix& sigma0,
                                                double duration,
                                                const EvolveOptions& opts) {
    const SinglePhononSteadyState target = single_phonon_steady_state(atom, coupling);
    const double contrast = std::norm(atom.alpha) - atom.beta_magnitude_sq;
    const double kappa = coupling * coupling * contrast;

    // In the frame rho = D(lambda) sigma D^dag with lambda solving
    // lambda' = -kappa lambda / 2 - i G beta alpha^*, the drift cancels and
    // only the two dissipators survive.
    Generator gen;
    const Matrix a = annihilation(sigma0.space);
    gen.add_jump(coupling * atom.alpha * a);
    gen.add_jump(coupling * atom.beta() * a.adjoint());

    DisplacedFrameResult result;
    Matrix y = sigma0.rho;
    result.steps_taken = integrate(gen, y, duration, opts, {}, nullptr);
    result.sigma = DensityMatrix{sigma0.space, std::move(y)};
    require_within_truncation(result.sigma, "evolve_single_phonon_frame");
    result.lambda = target.amplitude * (1.0 - std::exp(-0.5 * kappa * duration));
    return result;
}

std::vector<double> channel_vs_master_agreement(const PassageChannel& channel,
                                                const MasterEquation& me,
                                                const DensityMatrix& rho0, int k) {
    if (k < 1) throw DomainError("channel_vs_master_agreement: k must be >= 1");
    const Generator gen = build_generator(me, rho0.space);
    Passage passage(channel, rho0.space);
    std::vector<double> fidelities;
    fidelities.reserve(k);
    DensityMatrix discrete = rho0;
    Matrix y = rho0.rho;
    EvolveOptions opts;
    for (int i = 0; i < k; ++i) {
        discrete = passage.apply(discrete);
        integrate(gen, y, 1.0, opts, {}, nullptr); // one passage per unit tau
        DensityMatrix continuous{rho0.space, y};
        fidelities.push_back(fidelity(discrete, continuous));
    }
    return fidelities;
}

} // namespace rydosc
