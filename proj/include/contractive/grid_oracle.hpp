#pragma once

// Schrödinger-picture oracle: wave functions sampled on a uniform periodic
// grid, evolved exactly (closed-form Gaussian spreading or a momentum-space
// free propagator) and reduced to moments by quadrature. Nothing here uses
// the closed-form moment expressions, so it can check them.

#include <cstddef>
#include <vector>

#include "contractive/state_model.hpp"

namespace contractive {

inline constexpr double kBoundaryDecay = 1e-14;

struct Grid {
    double half_width = 0.0;
    std::size_t n_points = 0;

    double spacing() const { return 2.0 * half_width / static_cast<double>(n_points); }
    double x(std::size_t j) const { return -half_width + spacing() * static_cast<double>(j); }
};

/// Validates n_points >= 1024, a power of two, and half_width > 0.
Grid make_grid(double half_width, std::size_t n_points = std::size_t{1} << 14);

/// half_width = max|center| + 12 sqrt(1 + eta_max^2), 2^14 points.
Grid default_grid(const GaussianSuperposition& state, double eta_max);

struct SampledState {
    Grid grid;
    std::vector<complex> values;
    double eta = 0.0;
};

struct GridMoments {
    Moments moments;
    double norm = 0.0;   // quadrature norm before renormalization
    double im_xp = 0.0;  // should come out as 1/2
};

/// Samples the initial wave function and normalizes it by quadrature.
SampledState sample(const GaussianSuperposition& state, const Grid& grid,
                    double eps_norm = kDefaultNormFloor);

/// Each component spread in closed form: amplitude (1 + i eta)^{-1/2}, exponent
/// -(1 - i eta)(x - c)^2 / (2 w^2 (1 + eta^2)); then summed and normalized.
SampledState evolve_analytic(const GaussianSuperposition& state, double eta, const Grid& grid,
                             double eps_norm = kDefaultNormFloor);

/// Multiplies each Fourier mode by exp(-i k^2 eta / 2) and transforms back.
SampledState evolve_spectral(const SampledState& s, double eta);

/// Moments by trapezoid quadrature; momentum parts through the DFT.
GridMoments grid_moments_with_diagnostics(const SampledState& s);
Moments grid_moments(const SampledState& s);

double quadrature_norm(const SampledState& s);
double max_abs_difference(const SampledState& a, const SampledState& b);

/// Throws GridTooSmall if |psi|^2 near either edge exceeds kBoundaryDecay of its max.
void check_boundary_decay(const SampledState& s);

}  // namespace contractive
