#pragma once

#include "contractive/state_model.hpp"

namespace contractive {

/// Closed-form initial moments of the two-component cat. The mean momentum
/// and the correlation use the forms in which the (kappa^2 - 1) factor has
/// already been cancelled, so kappa = 1 is regular.
Moments cat2_moments(const Cat2Params& p, double eps_norm = kDefaultNormFloor);

/// Closed-form initial moments of the three-component cat, obtained from the
/// eta-polynomial of <x>(eta) and <x^2>(eta) under free evolution: the eta^0,
/// eta^1 and eta^2 coefficients give var_x, corr_xp and var_p.
Moments cat3_moments(const Cat3Params& p, double eps_norm = kDefaultNormFloor);

Moments yuen_moments(const YuenParams& p);

/// Moments of an arbitrary superposition from pairwise overlap integrals of
/// the components and their first/second derivatives.
Moments superposition_moments(const GaussianSuperposition& s, double eps_norm = kDefaultNormFloor);

/// Im<x p> from the same overlap sums; 1/2 for every normalized state.
double superposition_im_xp(const GaussianSuperposition& s, double eps_norm = kDefaultNormFloor);

/// Three-component correlation parameter, corr_xp = -2 zeta.
double zeta(const Cat3Params& p, double eps_norm = kDefaultNormFloor);

}  // namespace contractive
