#pragma once

// Parameter spaces of the state families and their conversion to a general
// superposition of equal-width, zero-momentum Gaussians.
//
// Units throughout the library: lengths in units of the component width
// parameter, momenta in hbar/width, time as the adimensional eta. In these
// units a single component has var_x = var_p = 1/2.

#include <complex>
#include <vector>

#include "contractive/errors.hpp"

namespace contractive {

using complex = std::complex<double>;

inline constexpr double kDefaultNormFloor = 1e-10;

/// Reduce an angle in degrees to [0, 360).
double wrap_degrees(double deg);
double radians(double deg);

/// Sine and cosine of an angle in degrees, exact at multiples of 90.
double sin_deg(double deg);
double cos_deg(double deg);
/// exp(i deg) with the same exactness.
complex unit_phasor(double deg);

/// Two-component cat: k+ = kappa (real), k- = exp(-i theta), centers +-delta.
struct Cat2Params {
    double kappa = 1.0;
    double theta_deg = 0.0;
    double delta = 1.0;
};

/// Three-component cat: k+ = kappa_plus e^{i theta+}, k0 = kappa_minus,
/// k- = e^{i theta-}; centers +delta, 0, -delta. Ratios are c+/c- and c0/c-.
struct Cat3Params {
    double kappa_plus = 1.0;
    double kappa_minus = 1.0;
    double theta_plus_deg = 0.0;
    double theta_minus_deg = 0.0;
    double delta = 1.0;
};

/// Twisted coherent (Yuen) state reduced to the two quantities the variance
/// dynamics depend on. Means are fixed at zero; they do not enter Lambda.
struct YuenParams {
    double xi = 0.0;
    double var_x = 0.5;

    /// Momentum variance saturating var_x var_p - xi^2 = 1/4.
    double var_p() const { return (1.0 + 4.0 * xi * xi) / (4.0 * var_x); }
};

struct Component {
    complex amplitude;
    double center = 0.0;
};

/// Unnormalized sum of Gaussians exp(-(x - c)^2 / (2 width^2)), all with zero
/// initial momentum.
struct GaussianSuperposition {
    std::vector<Component> components;
    double width = 1.0;
};

/// First and second moments of a pure state. corr_xp is the symmetrized
/// covariance <{dx, dp}> and re_xp is Re<x p>; the two are tied by
/// corr_xp = 2 (re_xp - mean_x mean_p).
struct Moments {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.5;
    double var_p = 0.5;
    double corr_xp = 0.0;
    double re_xp = 0.0;

    /// var_x var_p - (corr_xp / 2)^2; at least 1/4 for any physical state.
    double uncertainty_product() const { return var_x * var_p - 0.25 * corr_xp * corr_xp; }
};

Cat2Params make_cat2(double kappa, double theta_deg, double delta,
                     double eps_norm = kDefaultNormFloor);

Cat3Params make_cat3(double kappa_plus, double kappa_minus, double theta_plus_deg,
                     double theta_minus_deg, double delta, double eps_norm = kDefaultNormFloor);

YuenParams make_yuen(double xi, double var_x);

/// Validates the component list and the norm floor.
GaussianSuperposition make_superposition(std::vector<Component> components, double width = 1.0,
                                         double eps_norm = kDefaultNormFloor);

GaussianSuperposition single_gaussian(double center = 0.0);
GaussianSuperposition to_superposition(const Cat2Params& p);
GaussianSuperposition to_superposition(const Cat3Params& p);

/// Exact integral of |sum_i k_i g_i|^2 from pairwise Gaussian overlaps.
/// Throws DegenerateNorm when the result does not exceed
/// eps_norm * sqrt(pi) * width * sum_i |k_i|^2.
double norm_squared(const GaussianSuperposition& state, double eps_norm = kDefaultNormFloor);

}  // namespace contractive
