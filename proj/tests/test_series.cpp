#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_bigint.hpp"
#include "pertkit/series.hpp"
#include "pertkit/toy_model.hpp"

using namespace pertkit;

TEST_CASE("toy coefficients match the paper's first values") {
    const double sqrt_pi = std::sqrt(M_PI);
    CHECK(series::toy_coefficient(0).value() == doctest::Approx(sqrt_pi).epsilon(1e-12));
    CHECK(series::toy_coefficient(1).value() ==
          doctest::Approx(-0.75 * sqrt_pi).epsilon(1e-12));  // product (1/2)(3/2) = 3/4
    // exact rational 8!/(2^8 4! 2!) = 105/32
    CHECK(oracle::toy_rational(2) == mpq_class(105, 32));
    CHECK(series::toy_coefficient(2).value() ==
          doctest::Approx((105.0 / 32.0) * sqrt_pi).epsilon(1e-12));
    CHECK(series::toy_coefficient(1).value() == doctest::Approx(-1.3293404).epsilon(1e-7));
    // 3.28125 * sqrt(pi); the exact rational 105/32 pins the digits
    CHECK(series::toy_coefficient(2).value() == doctest::Approx(5.8158642).epsilon(1e-7));
}

TEST_CASE("log-domain coefficients match the big-integer oracle to 12 digits") {
    for (int k = 0; k <= 30; ++k) {
        const double exact = oracle::toy_coefficient_value(k);
        const double got = series::toy_coefficient(k).value();
        CHECK(std::abs(got / exact - 1.0) < 1e-12);
    }
}

TEST_CASE("coefficient signs alternate") {
    for (int k = 0; k <= 100; ++k) CHECK(series::toy_coefficient(k).sign == (k % 2 == 0 ? 1 : -1));
}

TEST_CASE("coefficient magnitudes stay representable in the log domain at k = 10^4") {
    const auto c = series::toy_coefficient(10000);
    CHECK(std::isfinite(c.log_magnitude));
}

TEST_CASE("partial sums reproduce the quoted digits at lambda = 1/50") {
    const auto s = series::toy_series(40);
    CHECK(series::partial_sum(s, 0.02, 5) == doctest::Approx(1.7478728).epsilon(1e-7));
    CHECK(series::partial_sum(s, 0.02, 10) == doctest::Approx(1.7478818).epsilon(1e-7));
    CHECK(series::partial_sum(s, 0.5, 0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));
}

TEST_CASE("partial sum beyond available coefficients is an explicit error") {
    const auto s = series::toy_series(10);
    CHECK_THROWS_AS(series::partial_sum(s, 0.02, 11), series::OutOfCoefficientsError);
}

TEST_CASE("optimal truncation agrees with the exact rational term scan") {
    const auto s = series::toy_series(60);

    const int k50 = series::optimal_truncation(s, 1.0 / 50.0);
    CHECK(k50 == oracle::first_term_minimum(mpq_class(1, 50), 60));
    CHECK(k50 >= 11);
    CHECK(k50 <= 14);  // analytic estimate 1/(4 lambda) = 12.5

    const int k10 = series::optimal_truncation(s, 0.1);
    CHECK(k10 == oracle::first_term_minimum(mpq_class(1, 10), 60));
    CHECK(k10 >= 1);
    CHECK(k10 <= 4);
}

TEST_CASE("monotone terms (convergent series) yield the extend-the-series error") {
    std::vector<double> ones(30, 1.0);
    const auto geometric = series::AsymptoticSeries::from_values(ones);
    CHECK_THROWS_AS(series::optimal_truncation(geometric, 0.5), series::OutOfCoefficientsError);
}

TEST_CASE("truncation accuracy improves until the optimal order") {
    const auto s = series::toy_series(40);
    const double lambda = 1.0 / 50.0;
    const double z = toy::z_exact(lambda).value;
    const int kstar = series::optimal_truncation(s, lambda);
    const double best = std::abs(series::partial_sum(s, lambda, kstar) - z);
    for (int N = 0; N <= kstar / 2; ++N)
        CHECK(best <= std::abs(series::partial_sum(s, lambda, N) - z));
}

TEST_CASE("coefficient ratio slope approaches 4k") {
    // OLS slope of |a_{k+1}/a_k| against k over k = 20..60
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int k = 20; k <= 60; ++k) {
        const double y = oracle::coefficient_ratio(k);
        sx += k; sy += y; sxx += double(k) * k; sxy += k * y;
        ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(std::abs(slope - 4.0) < 0.05 * 4.0);
}

TEST_CASE("growth fit witnesses the factorial bound") {
    SUBCASE("toy series") {
        const auto fit = series::fit_strong_asymptotic(series::toy_series(40));
        CHECK(fit.sigma >= 3.8);
        CHECK(fit.sigma <= 4.2);
        CHECK(fit.C >= 0.15);
        CHECK(fit.C <= 0.35);
        CHECK(fit.satisfied);
        // bound actually holds on every fitted order
        for (int n = 1; n <= 40; ++n) {
            const auto c = series::toy_coefficient(n);
            CHECK(c.log_magnitude <=
                  std::log(fit.C) + n * std::log(fit.sigma) + std::lgamma(n + 1.0) + 1e-9);
        }
    }
    SUBCASE("a_n = n! is the exact bound") {
        series::AsymptoticSeries s;
        for (int n = 0; n <= 12; ++n) {
            series::SeriesCoefficient c;
            c.k = n;
            c.sign = 1;
            c.log_magnitude = std::lgamma(n + 1.0);
            s.coefficients.push_back(c);
        }
        const auto fit = series::fit_strong_asymptotic(s);
        CHECK(fit.sigma == doctest::Approx(1.0).epsilon(0.05));
        CHECK(fit.C == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(fit.satisfied);
    }
    SUBCASE("geometric coefficients have a vastly slack bound") {
        std::vector<double> ones(41, 1.0);
        const auto fit = series::fit_strong_asymptotic(series::AsymptoticSeries::from_values(ones));
        CHECK(fit.sigma < 0.2);
    }
    SUBCASE("zero coefficients are skipped in the fit") {
        std::vector<double> vals(21, 0.0);
        for (int n = 0; n <= 20; n += 2) vals[static_cast<size_t>(n)] = std::exp(std::lgamma(n + 1.0));
        const auto fit = series::fit_strong_asymptotic(series::AsymptoticSeries::from_values(vals));
        CHECK(std::isfinite(fit.sigma));
        CHECK(fit.sigma == doctest::Approx(1.0).epsilon(0.1));
    }
}

TEST_CASE("series JSON round trip") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    std::uniform_int_distribution<int> zero(0, 4);
    for (int trial = 0; trial < 20; ++trial) {
        series::AsymptoticSeries s;
        for (int k = 0; k <= 15; ++k) {
            if (zero(rng) == 0)
                s.coefficients.push_back(series::SeriesCoefficient::zero(k));
            else
                s.coefficients.push_back(
                    series::SeriesCoefficient::from_value(k, std::copysign(std::exp(mag(rng)),
                                                                           mag(rng))));
        }
        const auto back = series::AsymptoticSeries::from_json(s.to_json());
        REQUIRE(back.max_order() == s.max_order());
        for (int k = 0; k <= 15; ++k) {
            CHECK(back.at(k).is_zero == s.at(k).is_zero);
            if (!s.at(k).is_zero) CHECK(back.at(k).value() == doctest::Approx(s.at(k).value()));
        }
    }
    // the documented wire format
    const auto j = series::toy_series(2).to_json();
    CHECK(j.contains("coeffs"));
    CHECK(j["coeffs"][0]["k"] == 0);
    CHECK(j["coeffs"][0]["sign"] == 1);
    CHECK(j["coeffs"][0].contains("log_mag"));
}
