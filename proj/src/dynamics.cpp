#include "contractive/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "contractive/analytic_moments.hpp"

namespace contractive {

std::string_view to_string(ContractivityRegion r) {
    switch (r) {
        case ContractivityRegion::None: return "None";
        case ContractivityRegion::RegionI: return "RegionI";
        case ContractivityRegion::RegionII: return "RegionII";
    }
    return "None";
}

VarianceCurve curve_from_moments(const Moments& m) { return {m.var_x, m.corr_xp, m.var_p}; }

double variance_at(const VarianceCurve& v, double eta) { return v.a + eta * (v.b + v.c * eta); }

double lambda_at(const VarianceCurve& v, double eta) {
    if (!(eta > 0.0)) {
        std::ostringstream os;
        os << "Lambda is undefined at eta = " << eta;
        throw Error(ErrorKind::NonPositiveTime, os.str());
    }
    return v.a / eta + v.b + v.c * eta;
}

OptimalTime optimal_eta(const VarianceCurve& v) {
    return {std::sqrt(v.a / v.c), v.b + 2.0 * std::sqrt(v.a * v.c)};
}

std::optional<ContractivityInterval> contractivity_interval(const VarianceCurve& v) {
    const double lin = v.b - 1.0;
    const double disc = lin * lin - 4.0 * v.a * v.c;
    if (!(disc > 0.0) || !(lin < 0.0)) return std::nullopt;
    // Stable quadratic roots: q has the sign of -lin, so both roots are positive.
    const double q = -0.5 * (lin - std::sqrt(disc));
    const double r1 = q / v.c;
    const double r2 = v.a / q;
    return ContractivityInterval{std::min(r1, r2), std::max(r1, r2)};
}

double yuen_lambda_min(double xi) { return std::sqrt(1.0 + 4.0 * xi * xi) - 2.0 * xi; }

YuenTimes yuen_times(const YuenParams& p) {
    if (p.xi == 0.0)
        throw Error(ErrorKind::ZeroXi, "t_bar and t_star/t_bar are undefined at xi = 0");
    const double g = 1.0 + 4.0 * p.xi * p.xi;
    return {2.0 * p.var_x / std::sqrt(g), 4.0 * p.xi * p.var_x / g,
            std::sqrt(g) / (2.0 * p.xi)};
}

ContractivityRegion contractivity_region(const Cat2Params& p) {
    const double s = sin_deg(p.theta_deg);
    if (p.kappa > 1.0 && s > 0.0) return ContractivityRegion::RegionI;
    if (p.kappa < 1.0 && s < 0.0) return ContractivityRegion::RegionII;
    return ContractivityRegion::None;
}

bool is_contractive(const Moments& m) { return m.corr_xp < 0.0; }

GlMember gl_family_member(double a, double beta, double delta) {
    if (!std::isfinite(a) || a == 0.0)
        throw Error(ErrorKind::ZeroOutcome, "the outcome a = 0 has no contractive cat2 member");
    if (!std::isfinite(beta) || !(beta > 1.0)) {
        std::ostringstream os;
        os << "beta must exceed 1, got " << beta;
        throw Error(ErrorKind::InvalidBeta, os.str());
    }
    if (!std::isfinite(delta) || !(delta > 0.0))
        throw Error(ErrorKind::NonPositiveParameter, "delta must be positive");

    const bool positive = a > 0.0;
    const double ratio = std::sqrt((beta + 1.0) / (beta - 1.0));
    const double kappa = positive ? ratio : 1.0 / ratio;
    const double theta = positive ? 90.0 : 270.0;

    GlMember g{make_cat2(kappa, theta, delta), beta * a, beta * std::abs(a) / delta};

    const Moments m = cat2_moments(g.params);
    const double mean = m.mean_x * g.width_units;
    if (!(m.corr_xp < 0.0) || std::abs(mean - a) > 1e-10 * std::max(1.0, std::abs(a))) {
        std::ostringstream os;
        os << "member for a = " << a << " realizes mean " << mean << " and corr " << m.corr_xp;
        throw Error(ErrorKind::NonPositiveParameter, os.str());
    }
    return g;
}

double eta_from_time(double mass, double width, double t, double hbar) {
    for (double v : {mass, width, t, hbar})
        if (!std::isfinite(v) || !(v > 0.0))
            throw Error(ErrorKind::NonPositiveParameter,
                        "mass, width, time and hbar must all be positive");
    return hbar * t / (mass * width * width);
}

}  // namespace contractive
