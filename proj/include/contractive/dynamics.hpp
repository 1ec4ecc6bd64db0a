#pragma once

// Free-evolution variance propagation and the SQL-relative figure of merit.
//
//   var_x(eta)  = a + b eta + c eta^2
//   Lambda(eta) = var_x(eta) / eta = a / eta + b + c eta
//
// with a = var_x(0), b = corr_xp(0), c = var_p(0) in adimensional units.

#include <optional>
#include <string_view>
#include <utility>

#include "contractive/state_model.hpp"

namespace contractive {

struct VarianceCurve {
    double a = 0.5;
    double b = 0.0;
    double c = 0.5;

    double discriminant() const { return b * b - 4.0 * a * c; }
};

enum class ContractivityRegion { None, RegionI, RegionII };

std::string_view to_string(ContractivityRegion r);

struct OptimalTime {
    double eta_star;
    double lambda_min;
};

struct YuenTimes {
    double t_star;
    double t_bar;
    double ratio;
};

/// Open interval of eta on which Lambda < 1.
struct ContractivityInterval {
    double lower;
    double upper;
};

/// Result of placing a cat2 state at a given readout position.
struct GlMember {
    Cat2Params params;
    double x0_units;     // separation x0, signed like the outcome
    double width_units;  // component width, in the units of the outcome
};

VarianceCurve curve_from_moments(const Moments& m);

double variance_at(const VarianceCurve& v, double eta);

/// Throws NonPositiveTime for eta <= 0 (Lambda has a 1/eta pole).
double lambda_at(const VarianceCurve& v, double eta);

OptimalTime optimal_eta(const VarianceCurve& v);

/// Real roots of var_x(eta) = eta, i.e. c eta^2 + (b - 1) eta + a = 0, when
/// they exist with the lower root positive.
std::optional<ContractivityInterval> contractivity_interval(const VarianceCurve& v);

double yuen_lambda_min(double xi);

/// Throws ZeroXi at xi = 0, where t_bar vanishes and the ratio diverges.
YuenTimes yuen_times(const YuenParams& p);

ContractivityRegion contractivity_region(const Cat2Params& p);

bool is_contractive(const Moments& m);

/// Contractive cat2 member whose position mean equals the outcome `a`.
GlMember gl_family_member(double a, double beta, double delta);

/// eta = hbar t / (m width^2), SI inputs.
double eta_from_time(double mass, double width, double t, double hbar);

}  // namespace contractive
