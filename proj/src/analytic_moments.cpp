#include "contractive/analytic_moments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace contractive {

namespace {

void check_floor(double norm, double incoherent, double eps_norm) {
    if (!(norm > eps_norm * incoherent)) {
        std::ostringstream os;
        os << "relative squared norm " << norm / incoherent << " at or below floor " << eps_norm;
        throw Error(ErrorKind::DegenerateNorm, os.str());
    }
}

// Interference sums shared by cat3_moments and zeta, all in units where
// c- = 1. Naming follows the pair: "p0" is (+,0), "m0" is (-,0), "pm" is (+,-).
struct Cat3Sums {
    double delta, e4, e1;
    double cp, c0, cm;
    double s_p0, s_m0, s_pm;  // k_i* k_j + k_i k_j*
    double a_p0, a_m0, a_pm;  // i (k_i* k_j - k_i k_j*)
    double norm;              // K
    double x_bracket;         // <x> K / delta
    double p_bracket;         // <p> K / delta
};

Cat3Sums cat3_sums(const Cat3Params& p, double eps_norm) {
    Cat3Sums s{};
    s.delta = p.delta;
    s.e4 = std::exp(-0.25 * p.delta * p.delta);
    s.e1 = std::exp(-p.delta * p.delta);
    s.cp = p.kappa_plus;
    s.c0 = p.kappa_minus;
    s.cm = 1.0;
    const double tp = p.theta_plus_deg;
    const double tm = p.theta_minus_deg;
    s.s_p0 = 2.0 * s.c0 * s.cp * cos_deg(tp);
    s.s_m0 = 2.0 * s.c0 * s.cm * cos_deg(tm);
    s.s_pm = 2.0 * s.cp * s.cm * cos_deg(tp - tm);
    s.a_p0 = 2.0 * s.c0 * s.cp * sin_deg(tp);
    s.a_m0 = 2.0 * s.c0 * s.cm * sin_deg(tm);
    s.a_pm = 2.0 * s.cp * s.cm * sin_deg(tp - tm);

    const double incoherent = s.cp * s.cp + s.c0 * s.c0 + s.cm * s.cm;
    s.norm = incoherent + (s.s_p0 + s.s_m0) * s.e4 + s.s_pm * s.e1;
    check_floor(s.norm, incoherent, eps_norm);

    s.x_bracket = s.cp * s.cp - s.cm * s.cm + 0.5 * (s.s_p0 - s.s_m0) * s.e4;
    s.p_bracket = 0.5 * (s.a_p0 - s.a_m0) * s.e4 + s.a_pm * s.e1;
    return s;
}

struct OverlapSums {
    double norm = 0.0;
    double x = 0.0;
    double x2 = 0.0;
    double p = 0.0;
    double p2 = 0.0;
    complex xp;
    double width = 1.0;
};

OverlapSums overlap_sums(const GaussianSuperposition& s, double eps_norm) {
    OverlapSums out;
    out.width = s.width;
    const double root_pi = std::sqrt(std::numbers::pi);
    double incoherent = 0.0;
    complex xp_sum;
    for (const auto& ci : s.components) {
        incoherent += std::norm(ci.amplitude);
        const double ui = ci.center / s.width;
        for (const auto& cj : s.components) {
            const double uj = cj.center / s.width;
            const double d = ui - uj;
            const double m = 0.5 * (ui + uj);
            const double overlap = root_pi * std::exp(-0.25 * d * d);
            const complex w = std::conj(ci.amplitude) * cj.amplitude;
            out.norm += w.real() * overlap;
            out.x += w.real() * m * overlap;
            out.x2 += w.real() * (m * m + 0.5) * overlap;
            // <g_i| -i d/dx |g_j>, its square and <g_i| x (-i d/dx) |g_j>
            out.p += -w.imag() * 0.5 * d * overlap;
            out.p2 += w.real() * (0.5 - 0.25 * d * d) * overlap;
            const double mixed = -((m * m + 0.5) - uj * m) * overlap;
            xp_sum += complex(0.0, -1.0) * w * mixed;
        }
    }
    check_floor(out.norm, incoherent * root_pi, eps_norm);
    out.x /= out.norm;
    out.x2 /= out.norm;
    out.p /= out.norm;
    out.p2 /= out.norm;
    out.xp = xp_sum / out.norm;
    return out;
}

}  // namespace

Moments cat2_moments(const Cat2Params& p, double eps_norm) {
    const double k = p.kappa;
    const double d2 = p.delta * p.delta;
    const double e = std::exp(-d2);
    const double c = cos_deg(p.theta_deg);
    const double s = sin_deg(p.theta_deg);
    const double incoherent = 1.0 + k * k;
    const double n = incoherent + 2.0 * k * e * c;
    check_floor(n, incoherent, eps_norm);
    const double n2 = n * n;

    Moments m;
    m.mean_x = p.delta * (k * k - 1.0) / n;
    m.mean_p = 2.0 * p.delta * k * s * e / n;
    m.var_x = 0.5 + 2.0 * k * d2 * (2.0 * k + incoherent * e * c) / n2;
    m.var_p = 0.5 - 2.0 * k * d2 * (2.0 * k * e + incoherent * c) * e / n2;
    m.corr_xp = 4.0 * k * d2 * (1.0 - k * k) * e * s / n2;
    m.re_xp = 0.0;
    return m;
}

Moments cat3_moments(const Cat3Params& p, double eps_norm) {
    const Cat3Sums s = cat3_sums(p, eps_norm);
    const double d2 = s.delta * s.delta;
    const double sum_c2 = s.cp * s.cp + s.c0 * s.c0 + s.cm * s.cm;
    const double side = (s.s_p0 + s.s_m0) * s.e4;

    // <x^2>(eta) = q0 + q1 eta + q2 eta^2
    const double q0 =
        (0.5 * sum_c2 + (s.cp * s.cp + s.cm * s.cm) * d2 + (0.5 + 0.25 * d2) * side +
         0.5 * s.s_pm * s.e1) / s.norm;
    const double q1 = 0.5 * (s.a_p0 + s.a_m0) * s.e4 * d2 / s.norm;
    const double q2 =
        (0.5 * sum_c2 + (0.5 - 0.25 * d2) * side + (0.5 - d2) * s.s_pm * s.e1) / s.norm;

    Moments m;
    m.mean_x = s.delta * s.x_bracket / s.norm;
    m.mean_p = s.delta * s.p_bracket / s.norm;
    m.var_x = q0 - m.mean_x * m.mean_x;
    m.var_p = q2 - m.mean_p * m.mean_p;
    m.re_xp = 0.5 * q1;
    m.corr_xp = q1 - 2.0 * m.mean_x * m.mean_p;
    return m;
}

Moments yuen_moments(const YuenParams& p) {
    Moments m;
    m.mean_x = 0.0;
    m.mean_p = 0.0;
    m.var_x = p.var_x;
    m.var_p = p.var_p();
    m.corr_xp = -2.0 * p.xi;
    m.re_xp = -p.xi;
    return m;
}

Moments superposition_moments(const GaussianSuperposition& s, double eps_norm) {
    const OverlapSums o = overlap_sums(s, eps_norm);
    const double w = o.width;
    Moments m;
    m.mean_x = o.x * w;
    m.mean_p = o.p / w;
    m.var_x = (o.x2 - o.x * o.x) * w * w;
    m.var_p = (o.p2 - o.p * o.p) / (w * w);
    m.re_xp = o.xp.real();
    m.corr_xp = 2.0 * (o.xp.real() - o.x * o.p);
    return m;
}

double superposition_im_xp(const GaussianSuperposition& s, double eps_norm) {
    return overlap_sums(s, eps_norm).xp.imag();
}

double zeta(const Cat3Params& p, double eps_norm) {
    const Cat3Sums s = cat3_sums(p, eps_norm);
    const double d2 = s.delta * s.delta;
    const double sine_sum = 0.5 * (s.a_p0 + s.a_m0);  // c0 (c+ sin th+ + c- sin th-)
    return d2 / (s.norm * s.norm) *
           (-0.5 * sine_sum * s.norm * s.e4 + s.p_bracket * s.x_bracket);
}

}  // namespace contractive
