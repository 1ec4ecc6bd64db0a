#include <cmath>
#include <numbers>
#include <random>

#include "contractive/analytic_moments.hpp"
#include "contractive/state_model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace contractive;

namespace {

bool throws_kind(ErrorKind kind, auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

}  // namespace

TEST_CASE("degree helpers are exact at quarter turns") {
    CHECK(sin_deg(180.0) == 0.0);
    CHECK(sin_deg(360.0) == 0.0);
    CHECK(cos_deg(90.0) == 0.0);
    CHECK(cos_deg(270.0) == 0.0);
    CHECK(sin_deg(-90.0) == -1.0);
    CHECK(wrap_degrees(-30.0) == doctest::Approx(330.0));
    CHECK(wrap_degrees(720.0) == 0.0);
    CHECK(wrap_degrees(-1e-18) == 0.0);
    CHECK(sin_deg(30.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("make_cat2 validates its inputs") {
    const auto p = make_cat2(2.26, 127.0, 0.49);
    CHECK(p.kappa == 2.26);
    CHECK(p.theta_deg == 127.0);
    CHECK(make_cat2(1.0, 400.0, 1.0).theta_deg == doctest::Approx(40.0));
    CHECK_NOTHROW(make_cat2(1.0, 0.0, 1.0));
    CHECK(throws_kind(ErrorKind::DegenerateNorm, [] { make_cat2(1.0, 180.0, 1e-9); }));
    CHECK(throws_kind(ErrorKind::NonPositiveParameter, [] { make_cat2(0.0, 10.0, 1.0); }));
    CHECK(throws_kind(ErrorKind::NonPositiveParameter, [] { make_cat2(1.0, 10.0, -1.0); }));
    CHECK(throws_kind(ErrorKind::NonPositiveParameter, [] { make_cat2(1.0, NAN, 1.0); }));
}

TEST_CASE("make_cat3 and make_yuen validate their inputs") {
    CHECK_NOTHROW(make_cat3(1.0, 2.38, 249.0, 249.0, 1.21));
    CHECK(throws_kind(ErrorKind::NonPositiveParameter, [] { make_cat3(1.0, 0.0, 0.0, 0.0, 1.0); }));
    CHECK(throws_kind(ErrorKind::NonPositiveParameter, [] { make_yuen(0.5, 0.0); }));
    const auto y = make_yuen(0.5, 0.5);
    CHECK(y.var_p() == doctest::Approx(1.0));
}

TEST_CASE("to_superposition places components and amplitudes") {
    const auto s = to_superposition(make_cat2(2.0, 90.0, 1.0));
    REQUIRE(s.components.size() == 2);
    CHECK(s.components[0].center == 1.0);
    CHECK(s.components[1].center == -1.0);
    CHECK(s.components[0].amplitude == complex(2.0, 0.0));
    CHECK(s.components[1].amplitude == complex(0.0, -1.0));

    const auto s3 = to_superposition(make_cat3(1.0, 2.38, 249.0, 249.0, 1.21));
    REQUIRE(s3.components.size() == 3);
    CHECK(s3.components[0].center == 1.21);
    CHECK(s3.components[1].center == 0.0);
    CHECK(s3.components[2].center == -1.21);
    CHECK(s3.components[1].amplitude == complex(2.38, 0.0));
    CHECK(std::abs(s3.components[0].amplitude - std::polar(1.0, radians(249.0))) < 1e-15);
}

TEST_CASE("cat3 without its middle component is a cat2") {
    // theta = theta+ - theta- reproduces every moment; the opposite sign gives
    // the complex conjugate, which shares only the position distribution.
    const double kp = 1.7, tp = 35.0, tm = 310.0, delta = 0.8;
    const auto c3 = cat3_moments(Cat3Params{kp, 1e-12, tp, tm, delta});
    const auto same = cat2_moments(make_cat2(kp, tp - tm, delta));
    CHECK(c3.mean_x == doctest::Approx(same.mean_x).epsilon(1e-9));
    CHECK(c3.mean_p == doctest::Approx(same.mean_p).epsilon(1e-9));
    CHECK(c3.var_x == doctest::Approx(same.var_x).epsilon(1e-9));
    CHECK(c3.var_p == doctest::Approx(same.var_p).epsilon(1e-9));
    CHECK(c3.corr_xp == doctest::Approx(same.corr_xp).epsilon(1e-9));

    const auto conj = cat2_moments(make_cat2(kp, tm - tp, delta));
    CHECK(c3.mean_x == doctest::Approx(conj.mean_x).epsilon(1e-9));
    CHECK(c3.var_x == doctest::Approx(conj.var_x).epsilon(1e-9));
    CHECK(c3.mean_p == doctest::Approx(-conj.mean_p).epsilon(1e-9));
    CHECK(c3.corr_xp == doctest::Approx(-conj.corr_xp).epsilon(1e-9));
}

TEST_CASE("norm_squared matches quadrature") {
    CHECK(norm_squared(single_gaussian()) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    const GaussianSuperposition far{{{1.0, 10.0}, {1.0, -10.0}}, 1.0};
    CHECK(std::abs(norm_squared(far) - 2.0 * std::sqrt(std::numbers::pi)) < 1e-12);
    const GaussianSuperposition dead{{{1.0, 0.0}, {unit_phasor(-180.0), 0.0}}, 1.0};
    CHECK(throws_kind(ErrorKind::DegenerateNorm, [&] { norm_squared(dead); }));

    const auto ref = oracle::quadrature(oracle::cat3(1.3, 0.7, 40.0, 200.0, 0.9));
    CHECK(norm_squared(to_superposition(Cat3Params{1.3, 0.7, 40.0, 200.0, 0.9})) ==
          doctest::Approx(ref.norm).epsilon(1e-10));
}

TEST_CASE("norm_squared invariances over random states") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        GaussianSuperposition s;
        const int n = 1 + trial % 5;
        for (int i = 0; i < n; ++i) s.components.push_back({complex(u(rng), u(rng)) * 2.0, 3.0 * u(rng)});
        double base = 0.0;
        try {
            base = norm_squared(s);
        } catch (const Error&) {
            continue;
        }
        auto rotated = s;
        const complex g = std::polar(1.0, 3.0 * u(rng));
        for (auto& c : rotated.components) c.amplitude *= g;
        CHECK(std::abs(norm_squared(rotated) - base) <= 1e-12 * base);

        auto mirrored = s;
        for (auto& c : mirrored.components) c.center = -c.center;
        std::reverse(mirrored.components.begin(), mirrored.components.end());
        CHECK(std::abs(norm_squared(mirrored) - base) <= 1e-12 * base);
    }
}

TEST_CASE("valid cat parameters always have a norm above the floor") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        try {
            const auto p = make_cat2(std::exp(8.0 * u(rng) - 4.0), 360.0 * u(rng), 5.0 * u(rng) + 1e-3);
            const auto s = to_superposition(p);
            CHECK(norm_squared(s) > kDefaultNormFloor * std::sqrt(std::numbers::pi));
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateNorm);
        }
    }
}
