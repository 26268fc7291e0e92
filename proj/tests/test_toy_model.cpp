#include <doctest.h>

#include <cmath>
#include <random>

#include "pertkit/toy_model.hpp"

using namespace pertkit;

TEST_CASE("golden values of Z") {
    const auto z0 = toy::z_exact(0.0);
    CHECK(std::abs(z0.value - std::sqrt(M_PI)) < 1e-10);
    CHECK(z0.error < 1e-9);

    const auto z50 = toy::z_exact(1.0 / 50.0);
    CHECK(std::abs(z50.value - 1.7478812) < 5e-7);
}

TEST_CASE("two quadrature schemes agree") {
    quad::QuadratureConfig de;
    de.scheme = quad::Scheme::tanh_sinh;
    SUBCASE("at lambda = 1") {
        const auto a = toy::z_exact(1.0);
        const auto b = toy::z_exact(1.0, de);
        CHECK(std::abs(a.value - b.value) < 1e-9);
    }
    SUBCASE("at 20 random couplings") {
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> lam(1e-3, 2.0);
        for (int i = 0; i < 20; ++i) {
            const double l = lam(rng);
            const auto a = toy::z_exact(l);
            const auto b = toy::z_exact(l, de);
            CHECK(std::abs(a.value - b.value) <= a.error + b.error);
        }
    }
}

TEST_CASE("Z is strictly decreasing and bounded") {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20; ++i) {
        const double lambda = 0.05 * i;
        const double z = toy::z_exact(lambda).value;
        CHECK(z > 0.0);
        CHECK(z <= std::sqrt(M_PI) + 1e-12);
        CHECK(z < prev);
        prev = z;
    }
}

TEST_CASE("substituted saddle form reproduces Z") {
    // (1/sqrt(lambda)) int du exp(-(u^2+u^4)/lambda)
    for (double lambda : {0.02, 0.1, 0.5}) {
        auto f = [lambda](double u) {
            const double u2 = u * u;
            return std::exp(-(u2 + u2 * u2) / lambda);
        };
        const double R = std::sqrt(lambda * std::log(1e14));  // exp(-R^2/lambda) < 1e-14
        const auto half = quad::integrate(f, 0.0, R);
        const double sub = 2.0 * half.value / std::sqrt(lambda);
        CHECK(sub == doctest::Approx(toy::z_exact(lambda).value).epsilon(1e-7));
    }
}

TEST_CASE("Bessel closed form agrees with direct quadrature") {
    const auto b50 = toy::z_bessel(1.0 / 50.0);
    CHECK(!b50.bessel_fallback);
    CHECK(std::abs(b50.value - 1.7478812) < 1e-6);

    for (double lambda : {0.1, 1.0}) {
        const auto b = toy::z_bessel(lambda);
        const auto z = toy::z_exact(lambda);
        CHECK(!b.bessel_fallback);
        CHECK(std::abs(b.value - z.value) < 1e-8);
    }
}

TEST_CASE("Bessel route falls back when the integrand underflows") {
    const double lambda = 1e-5;  // x = 1/(8 lambda) = 12500
    const auto b = toy::z_bessel(lambda);
    CHECK(b.bessel_fallback);
    CHECK(b.value == doctest::Approx(toy::z_exact(lambda).value));
}

TEST_CASE("tolerance failure carries the best estimate") {
    quad::QuadratureConfig cfg;
    cfg.abs_tol = 1e-16;
    cfg.rel_tol = 1e-16;
    cfg.max_subdivisions = 2;
    CHECK_THROWS_AS(toy::z_exact(0.3, cfg), quad::QuadratureError);
}

TEST_CASE("negative coupling is rejected") {
    CHECK_THROWS_AS(toy::z_exact(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(toy::z_bessel(0.0), std::invalid_argument);
}
