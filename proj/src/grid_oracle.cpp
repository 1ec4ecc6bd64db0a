#include "contractive/grid_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace contractive {

namespace {

// The FFTW planner is not re-entrant; plans are created and destroyed under
// this lock and executed outside it.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftBuffer {
public:
    explicit FftBuffer(std::size_t n) : n_(n) {
        data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        std::lock_guard lock(planner_mutex());
        const int len = static_cast<int>(n);
        forward_ = fftw_plan_dft_1d(len, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(len, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftBuffer() {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(backward_);
        }
        fftw_free(data_);
    }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;

    void load(const std::vector<complex>& v) {
        std::copy(v.begin(), v.end(), reinterpret_cast<complex*>(data_));
    }
    std::vector<complex> store() const {
        const auto* p = reinterpret_cast<const complex*>(data_);
        return std::vector<complex>(p, p + n_);
    }
    complex& operator[](std::size_t j) { return reinterpret_cast<complex*>(data_)[j]; }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }

private:
    std::size_t n_;
    fftw_complex* data_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

std::vector<double> wavenumbers(const Grid& g) {
    const std::size_t n = g.n_points;
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.spacing());
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto signed_j = j < n / 2 ? static_cast<double>(j)
                                        : static_cast<double>(j) - static_cast<double>(n);
        k[j] = dk * signed_j;
    }
    return k;
}

double suggested_half_width(const GaussianSuperposition& state, double eta) {
    return default_grid(state, eta).half_width;
}

void normalize(SampledState& s) {
    const double n = quadrature_norm(s);
    if (!(n > 0.0) || !std::isfinite(n))
        throw Error(ErrorKind::DegenerateNorm, "sampled wave function has zero norm");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& v : s.values) v *= scale;
}

void check_with_suggestion(const SampledState& s, const GaussianSuperposition& state, double eta) {
    try {
        check_boundary_decay(s);
    } catch (const Error&) {
        std::ostringstream os;
        os << "wave function at eta = " << eta << " does not decay at the edge of half_width "
           << s.grid.half_width << "; use half_width >= " << suggested_half_width(state, eta);
        throw Error(ErrorKind::GridTooSmall, os.str());
    }
}

}  // namespace

Grid make_grid(double half_width, std::size_t n_points) {
    if (!std::isfinite(half_width) || !(half_width > 0.0))
        throw Error(ErrorKind::NonPositiveParameter, "grid half_width must be positive");
    if (n_points < 1024 || (n_points & (n_points - 1)) != 0) {
        std::ostringstream os;
        os << "grid n_points must be a power of two >= 1024, got " << n_points;
        throw Error(ErrorKind::NonPositiveParameter, os.str());
    }
    return Grid{half_width, n_points};
}

Grid default_grid(const GaussianSuperposition& state, double eta_max) {
    double reach = 0.0;
    for (const auto& c : state.components) reach = std::max(reach, std::abs(c.center));
    return make_grid(reach + 12.0 * state.width * std::sqrt(1.0 + eta_max * eta_max));
}

double quadrature_norm(const SampledState& s) {
    double sum = 0.0;
    for (const auto& v : s.values) sum += std::norm(v);
    return sum * s.grid.spacing();
}

void check_boundary_decay(const SampledState& s) {
    double peak = 0.0;
    for (const auto& v : s.values) peak = std::max(peak, std::norm(v));
    const std::size_t n = s.values.size();
    const std::size_t edge = std::min<std::size_t>(8, n / 2);
    double outer = 0.0;
    for (std::size_t j = 0; j < edge; ++j)
        outer = std::max({outer, std::norm(s.values[j]), std::norm(s.values[n - 1 - j])});
    if (outer > kBoundaryDecay * peak) {
        std::ostringstream os;
        os << "|psi|^2 at the boundary is " << outer / peak << " of its peak (half_width "
           << s.grid.half_width << ")";
        throw Error(ErrorKind::GridTooSmall, os.str());
    }
}

SampledState sample(const GaussianSuperposition& state, const Grid& grid, double eps_norm) {
    return evolve_analytic(state, 0.0, grid, eps_norm);
}

SampledState evolve_analytic(const GaussianSuperposition& state, double eta, const Grid& grid,
                             double eps_norm) {
    if (!(eta >= 0.0)) throw Error(ErrorKind::NonPositiveTime, "eta must be non-negative");
    norm_squared(state, eps_norm);

    const double w2 = state.width * state.width;
    const complex spread(1.0, eta);
    const complex prefactor = 1.0 / std::sqrt(spread);
    const complex exponent_scale = -1.0 / (2.0 * w2 * spread);

    SampledState s{grid, std::vector<complex>(grid.n_points), eta};
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        complex acc;
        for (const auto& c : state.components) {
            const double u = x - c.center;
            acc += c.amplitude * std::exp(exponent_scale * (u * u));
        }
        s.values[j] = prefactor * acc;
    }
    check_with_suggestion(s, state, eta);
    normalize(s);
    return s;
}

SampledState evolve_spectral(const SampledState& s, double eta) {
    if (!(eta >= 0.0)) throw Error(ErrorKind::NonPositiveTime, "eta must be non-negative");
    const std::size_t n = s.grid.n_points;
    const auto k = wavenumbers(s.grid);
    FftBuffer buf(n);
    buf.load(s.values);
    buf.forward();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
        buf[j] *= std::polar(inv_n, -0.5 * k[j] * k[j] * eta);
    buf.backward();
    SampledState out{s.grid, buf.store(), s.eta + eta};
    check_boundary_decay(out);
    return out;
}

GridMoments grid_moments_with_diagnostics(const SampledState& s) {
    check_boundary_decay(s);
    const Grid& g = s.grid;
    const std::size_t n = g.n_points;
    const double h = g.spacing();

    GridMoments out;
    out.norm = quadrature_norm(s);

    double sx = 0.0;
    double sx2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = g.x(j);
        const double rho = std::norm(s.values[j]);
        sx += x * rho;
        sx2 += x * x * rho;
    }
    const double mean_x = sx * h / out.norm;
    const double x2 = sx2 * h / out.norm;

    const auto k = wavenumbers(g);
    FftBuffer buf(n);
    buf.load(s.values);
    buf.forward();
    double spec = 0.0;
    double sk = 0.0;
    double sk2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double power = std::norm(buf[j]);
        spec += power;
        sk += k[j] * power;
        sk2 += k[j] * k[j] * power;
    }
    const double mean_p = sk / spec;
    const double p2 = sk2 / spec;

    // p psi = -i dpsi/dx, back on the position grid
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) buf[j] *= k[j] * inv_n;
    buf.backward();
    complex xp;
    for (std::size_t j = 0; j < n; ++j) xp += std::conj(s.values[j]) * g.x(j) * buf[j];
    xp *= h / out.norm;

    Moments& m = out.moments;
    m.mean_x = mean_x;
    m.mean_p = mean_p;
    m.var_x = x2 - mean_x * mean_x;
    m.var_p = p2 - mean_p * mean_p;
    m.re_xp = xp.real();
    m.corr_xp = 2.0 * (xp.real() - mean_x * mean_p);
    out.im_xp = xp.imag();
    return out;
}

Moments grid_moments(const SampledState& s) { return grid_moments_with_diagnostics(s).moments; }

double max_abs_difference(const SampledState& a, const SampledState& b) {
    if (a.values.size() != b.values.size())
        throw Error(ErrorKind::NonPositiveParameter, "sampled states live on different grids");
    double d = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j) d = std::max(d, std::abs(a.values[j] - b.values[j]));
    return d;
}

}  // namespace contractive
