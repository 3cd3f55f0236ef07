#include "rydosc/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "rydosc/constants.hpp"

namespace rydosc {

double quadrature_variance(const DensityMatrix& rho, double phi) {
    const Matrix a = annihilation(rho.space);
    const Complex ea = expectation(a, rho);
    const Complex ea2 = expectation((a * a).eval(), rho);
    const double en = mean_phonons(rho);
    const Complex ph = std::exp(Complex(0.0, -2.0 * phi));
    const double second = 0.5 * (2.0 * (ea2 * ph).real() + 2.0 * en + 1.0);
    const double mean = std::sqrt(2.0) * (ea * std::exp(Complex(0.0, -phi))).real();
    return second - mean * mean;
}

QuadratureReport minimize_variance(const DensityMatrix& rho, int coarse_points) {
    QuadratureReport report;
    report.samples.reserve(coarse_points);
    double best_phi = 0.0;
    double best_var = std::numeric_limits<double>::infinity();
    double worst_var = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < coarse_points; ++i) {
        const double phi = constants::pi * i / coarse_points;
        const double var = quadrature_variance(rho, phi);
        report.samples.emplace_back(phi, var);
        if (var < best_var) { best_var = var; best_phi = phi; }
        worst_var = std::max(worst_var, var);
    }
    report.degenerate = (worst_var - best_var) < 1e-10 * (1.0 + std::abs(best_var));
    if (report.degenerate) {
        report.phi_min = 0.0;
        report.variance_min = best_var;
        return report;
    }
    // Golden-section refinement on the bracketing coarse interval.
    const double step = constants::pi / coarse_points;
    double lo = best_phi - step, hi = best_phi + step;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = quadrature_variance(rho, c);
    double fd = quadrature_variance(rho, d);
    while (hi - lo > 1e-4) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = quadrature_variance(rho, c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = quadrature_variance(rho, d);
        }
    }
    report.phi_min = 0.5 * (lo + hi);
    if (report.phi_min < 0.0) report.phi_min += constants::pi;
    report.variance_min = quadrature_variance(rho, report.phi_min);
    return report;
}

double analytic_squeezing_variance(double omega_t, double theta, double phi) {
    return 0.5 * (std::cosh(omega_t) -
                  std::sinh(omega_t) * std::cos(2.0 * phi - theta - constants::pi / 2.0));
}

namespace {

/// One Wigner sample via the Laguerre series
///   W = 1/pi sum_{m>=n} w_mn Re/Im-combined rho_{mn} (2 alpha^*)^{m-n}
///       (-1)^n sqrt(n!/m!) L_n^{m-n}(4|alpha|^2) e^{-2|alpha|^2}.
double wigner_point(const Matrix& rho, double x, double p) {
    const int dim = static_cast<int>(rho.rows());
    const Complex alpha(x / std::sqrt(2.0), p / std::sqrt(2.0));
    const double y = 4.0 * std::norm(alpha);
    const double envelope = std::exp(-0.5 * y);
    const double mod2 = 2.0 * std::abs(alpha);
    const Complex phase = (std::abs(alpha) > 0.0)
                              ? std::conj(alpha) / std::abs(alpha)
                              : Complex(1.0, 0.0);

    double total = 0.0;
    Complex dir(1.0, 0.0); // phase^d
    double radial0 = 1.0;  // (2|alpha|)^d / sqrt(d!)
    for (int d = 0; d < dim; ++d) {
        if (d > 0) {
            dir *= phase;
            radial0 *= mod2 / std::sqrt(static_cast<double>(d));
        }
        // March n with the generalised-Laguerre recurrence; scale carries
        // (2|alpha|)^d sqrt(n!/(n+d)!).
        double lag_prev = 0.0, lag = 1.0;
        double scale = radial0;
        double sum = 0.0; // sum over n of the real combination
        for (int n = 0; n + d < dim; ++n) {
            if (n > 0) {
                const double next =
                    ((2.0 * n - 1.0 + d - y) * lag - (n - 1.0 + d) * lag_prev) / n;
                lag_prev = lag;
                lag = next;
                scale *= std::sqrt(n / (n + static_cast<double>(d)));
            }
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            const Complex coupling = rho(n + d, n) * dir;
            const double weight = (d == 0) ? coupling.real() : 2.0 * coupling.real();
            sum += sign * weight * scale * lag;
        }
        total += sum;
    }
    return total * envelope / constants::pi;
}

void parallel_rows(int n_rows, const std::function<void(int)>& body) {
    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
    if (workers == 1 || n_rows < 8) {
        for (int i = 0; i < n_rows; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < n_rows) body(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace

WignerGrid wigner(const DensityMatrix& rho, const WignerGridSpec& spec) {
    double half = spec.half_width.value_or(0.0);
    if (!spec.half_width) {
        const double n = mean_phonons(rho);
        half = 6.0;
        if (n > 4.0) half = std::max(6.0, 3.0 + 2.5 * std::sqrt(n + 1.0));
    }
    // Auto-sized windows may underestimate elongated (strongly squeezed)
    // states; widen and retry before giving up. Explicit windows are the
    // caller's responsibility and fail immediately.
    const int attempts = spec.half_width ? 1 : 4;
    for (int attempt = 0; attempt < attempts; ++attempt, half *= 1.5) {
        WignerGrid grid{-half, half, -half, half, spec.nx, spec.np,
                        Eigen::MatrixXd(spec.nx, spec.np)};
        parallel_rows(spec.nx, [&](int ix) {
            const double x = grid.x(ix);
            for (int ip = 0; ip < spec.np; ++ip)
                grid.values(ix, ip) = wigner_point(rho.rho, x, grid.p(ip));
        });

        const double peak = grid.values.cwiseAbs().maxCoeff();
        double boundary = 0.0;
        for (int ix = 0; ix < grid.nx; ++ix)
            boundary = std::max({boundary, std::abs(grid.values(ix, 0)),
                                 std::abs(grid.values(ix, grid.np - 1))});
        for (int ip = 0; ip < grid.np; ++ip)
            boundary = std::max({boundary, std::abs(grid.values(0, ip)),
                                 std::abs(grid.values(grid.nx - 1, ip))});
        if (peak == 0.0 || boundary <= 1e-6 * peak) return grid;
    }
    throw GridError("wigner: state reaches the grid boundary; enlarge the grid");
}

double wigner_normalization(const WignerGrid& grid) {
    return grid.values.sum() * grid.dx() * grid.dp();
}

double negative_volume(const WignerGrid& grid) {
    const double abs_integral = grid.values.cwiseAbs().sum() * grid.dx() * grid.dp();
    return std::max(0.0, 0.5 * (abs_integral - 1.0));
}

} // namespace rydosc
