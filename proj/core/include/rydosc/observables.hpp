#pragma once

#include <optional>
#include <vector>

#include "rydosc/fock.hpp"

namespace rydosc {

/// Variance of chi_phi = (a e^{-i phi} + a^dag e^{i phi})/sqrt(2).
/// Vacuum gives 1/2 in this convention; values below 1/2 mean squeezing.
double quadrature_variance(const DensityMatrix& rho, double phi);

struct QuadratureReport {
    double phi_min = 0.0;
    double variance_min = 0.0;
    bool degenerate = false; // variance flat in phi (rotationally symmetric state)
    std::vector<std::pair<double, double>> samples; // (phi, variance) coarse scan
};

/// Coarse scan over [0, pi) followed by golden-section refinement.
QuadratureReport minimize_variance(const DensityMatrix& rho, int coarse_points = 180);

/// Closed-form variance of squeezed vacuum,
/// 1/2 (cosh(W) - sinh(W) cos(2 phi - theta - pi/2)) with W the
/// accumulated squeezing parameter.
double analytic_squeezing_variance(double omega_t, double theta, double phi);

/// Sampled Wigner function on a rectangular phase-space grid,
/// normalised so that sum W dx dp = 1.
struct WignerGrid {
    double x_min, x_max, p_min, p_max;
    int nx, np;
    Eigen::MatrixXd values; // (ix, ip)

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dp() const { return (p_max - p_min) / (np - 1); }
    double x(int ix) const { return x_min + ix * dx(); }
    double p(int ip) const { return p_min + ip * dp(); }
};

struct WignerGridSpec {
    std::optional<double> half_width; // symmetric bounds; auto-sized if absent
    int nx = 201;
    int np = 201;
};

/// Fock-basis Laguerre-series evaluation of W(x,p) (alpha = (x+ip)/sqrt(2)),
/// exact on the truncated space. Throws GridError when the state spills
/// over the grid boundary.
WignerGrid wigner(const DensityMatrix& rho, const WignerGridSpec& spec = {});

/// sum W dx dp, should be 1 for a contained state.
double wigner_normalization(const WignerGrid& grid);

/// V_neg = 1/2 (integral |W| - 1), clamped at 0.
double negative_volume(const WignerGrid& grid);

} // namespace rydosc
