#include "contractive/state_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace contractive {

namespace {

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        std::ostringstream os;
        os << name << " must be a finite positive number, got " << value;
        throw Error(ErrorKind::NonPositiveParameter, os.str());
    }
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be finite, got " << value;
        throw Error(ErrorKind::NonPositiveParameter, os.str());
    }
}

}  // namespace

double wrap_degrees(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    // fmod of a tiny negative number can round back up to exactly 360
    if (r >= 360.0) r = 0.0;
    return r;
}

double radians(double deg) { return deg * (std::numbers::pi / 180.0); }

double sin_deg(double deg) {
    const double r = wrap_degrees(deg);
    if (r == 0.0 || r == 180.0) return 0.0;
    if (r == 90.0) return 1.0;
    if (r == 270.0) return -1.0;
    return std::sin(radians(r));
}

double cos_deg(double deg) {
    const double r = wrap_degrees(deg);
    if (r == 90.0 || r == 270.0) return 0.0;
    if (r == 0.0) return 1.0;
    if (r == 180.0) return -1.0;
    return std::cos(radians(r));
}

complex unit_phasor(double deg) { return {cos_deg(deg), sin_deg(deg)}; }

Cat2Params make_cat2(double kappa, double theta_deg, double delta, double eps_norm) {
    require_positive(kappa, "kappa");
    require_positive(delta, "delta");
    require_finite(theta_deg, "theta");
    Cat2Params p{kappa, wrap_degrees(theta_deg), delta};
    norm_squared(to_superposition(p), eps_norm);
    return p;
}

Cat3Params make_cat3(double kappa_plus, double kappa_minus, double theta_plus_deg,
                     double theta_minus_deg, double delta, double eps_norm) {
    require_positive(kappa_plus, "kappa_plus");
    require_positive(kappa_minus, "kappa_minus");
    require_positive(delta, "delta");
    require_finite(theta_plus_deg, "theta_plus");
    require_finite(theta_minus_deg, "theta_minus");
    Cat3Params p{kappa_plus, kappa_minus, wrap_degrees(theta_plus_deg),
                 wrap_degrees(theta_minus_deg), delta};
    norm_squared(to_superposition(p), eps_norm);
    return p;
}

YuenParams make_yuen(double xi, double var_x) {
    require_finite(xi, "xi");
    require_positive(var_x, "var_x");
    return YuenParams{xi, var_x};
}

GaussianSuperposition make_superposition(std::vector<Component> components, double width,
                                         double eps_norm) {
    if (components.empty())
        throw Error(ErrorKind::NonPositiveParameter, "superposition needs at least one component");
    require_positive(width, "width");
    for (const auto& c : components) {
        require_finite(c.center, "component center");
        if (!std::isfinite(c.amplitude.real()) || !std::isfinite(c.amplitude.imag()))
            throw Error(ErrorKind::NonPositiveParameter, "component amplitude must be finite");
    }
    GaussianSuperposition s{std::move(components), width};
    norm_squared(s, eps_norm);
    return s;
}

GaussianSuperposition single_gaussian(double center) {
    return GaussianSuperposition{{{complex(1.0, 0.0), center}}, 1.0};
}

GaussianSuperposition to_superposition(const Cat2Params& p) {
    return GaussianSuperposition{
        {{complex(p.kappa, 0.0), p.delta}, {unit_phasor(-p.theta_deg), -p.delta}}, 1.0};
}

GaussianSuperposition to_superposition(const Cat3Params& p) {
    return GaussianSuperposition{{{p.kappa_plus * unit_phasor(p.theta_plus_deg), p.delta},
                                  {complex(p.kappa_minus, 0.0), 0.0},
                                  {unit_phasor(p.theta_minus_deg), -p.delta}},
                                 1.0};
}

double norm_squared(const GaussianSuperposition& state, double eps_norm) {
    const double w = state.width;
    const double scale = std::sqrt(std::numbers::pi) * w;
    double incoherent = 0.0;
    double total = 0.0;
    const auto& cs = state.components;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const double mag2 = std::norm(cs[i].amplitude);
        incoherent += mag2;
        total += mag2;
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            const double d = (cs[i].center - cs[j].center) / w;
            total += 2.0 * std::real(std::conj(cs[i].amplitude) * cs[j].amplitude) *
                     std::exp(-0.25 * d * d);
        }
    }
    if (!(total > eps_norm * incoherent)) {
        std::ostringstream os;
        os << "squared norm " << total * scale << " is at or below the floor "
           << eps_norm * incoherent * scale << " (destructive interference)";
        throw Error(ErrorKind::DegenerateNorm, os.str());
    }
    return total * scale;
}

}  // namespace contractive
