#include "pertkit/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pertkit::series {

double SeriesCoefficient::value() const {
    if (is_zero) return 0.0;
    return sign * std::exp(log_magnitude);
}

SeriesCoefficient SeriesCoefficient::from_value(int k, double v) {
    if (v == 0.0) return zero(k);
    SeriesCoefficient c;
    c.k = k;
    c.sign = v > 0 ? 1 : -1;
    c.log_magnitude = std::log(std::abs(v));
    return c;
}

SeriesCoefficient SeriesCoefficient::zero(int k) {
    SeriesCoefficient c;
    c.k = k;
    c.is_zero = true;
    c.log_magnitude = std::numeric_limits<double>::quiet_NaN();
    return c;
}

const SeriesCoefficient& AsymptoticSeries::at(int k) const {
    if (k < 0 || k > max_order())
        throw OutOfCoefficientsError("coefficient index " + std::to_string(k) +
                                     " outside available orders 0.." + std::to_string(max_order()));
    return coefficients[static_cast<size_t>(k)];
}

AsymptoticSeries AsymptoticSeries::from_values(std::span<const double> values) {
    AsymptoticSeries s;
    s.coefficients.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i)
        s.coefficients.push_back(SeriesCoefficient::from_value(static_cast<int>(i), values[i]));
    return s;
}

nlohmann::json AsymptoticSeries::to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : coefficients) {
        nlohmann::json jc;
        jc["k"] = c.k;
        jc["sign"] = c.is_zero ? 0 : c.sign;
        if (!c.is_zero) jc["log_mag"] = c.log_magnitude;
        coeffs.push_back(jc);
    }
    return nlohmann::json{{"coeffs", coeffs}};
}

AsymptoticSeries AsymptoticSeries::from_json(const nlohmann::json& j) {
    AsymptoticSeries s;
    const auto& coeffs = j.at("coeffs");
    s.coefficients.reserve(coeffs.size());
    int expect = 0;
    for (const auto& jc : coeffs) {
        const int k = jc.at("k").get<int>();
        if (k != expect++) throw std::invalid_argument("series coefficients must be contiguous from 0");
        const int sign = jc.at("sign").get<int>();
        if (sign == 0) {
            s.coefficients.push_back(SeriesCoefficient::zero(k));
        } else {
            SeriesCoefficient c;
            c.k = k;
            c.sign = sign > 0 ? 1 : -1;
            c.log_magnitude = jc.at("log_mag").get<double>();
            s.coefficients.push_back(c);
        }
    }
    return s;
}

SeriesCoefficient toy_coefficient(int k) {
    if (k < 0) throw std::invalid_argument("toy_coefficient: k must be nonnegative");
    SeriesCoefficient c;
    c.k = k;
    c.sign = (k % 2 == 0) ? 1 : -1;
    c.log_magnitude = 0.5 * std::log(M_PI) + std::lgamma(4.0 * k + 1.0) -
                      4.0 * k * std::log(2.0) - std::lgamma(2.0 * k + 1.0) -
                      std::lgamma(k + 1.0);
    return c;
}

AsymptoticSeries toy_series(int max_order) {
    AsymptoticSeries s;
    s.coefficients.reserve(static_cast<size_t>(max_order) + 1);
    for (int k = 0; k <= max_order; ++k) s.coefficients.push_back(toy_coefficient(k));
    return s;
}

double partial_sum(const AsymptoticSeries& s, double lambda, int N) {
    if (!(lambda > 0)) throw std::invalid_argument("partial_sum: lambda must be positive");
    if (N < 0 || N > s.max_order())
        throw OutOfCoefficientsError("partial_sum: order " + std::to_string(N) +
                                     " exceeds available coefficients (max " +
                                     std::to_string(s.max_order()) + ")");
    const double ll = std::log(lambda);
    double sum = 0.0, comp = 0.0;  // Kahan
    for (int k = 0; k <= N; ++k) {
        const auto& c = s.coefficients[static_cast<size_t>(k)];
        if (c.is_zero) continue;
        const double term = c.sign * std::exp(c.log_magnitude + k * ll);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

int optimal_truncation(const AsymptoticSeries& s, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("optimal_truncation: lambda must be positive");
    const double ll = std::log(lambda);
    auto term_log = [&](int k) {
        const auto& c = s.coefficients[static_cast<size_t>(k)];
        return c.is_zero ? -std::numeric_limits<double>::infinity() : c.log_magnitude + k * ll;
    };
    for (int k = 1; k + 1 <= s.max_order(); ++k) {
        const double prev = term_log(k - 1), cur = term_log(k), next = term_log(k + 1);
        if (cur <= prev && cur < next) return k;
    }
    throw OutOfCoefficientsError(
        "optimal_truncation: no local minimum of |a_k lambda^k| within available coefficients; "
        "extend the series (or the terms decrease monotonically and the series converges)");
}

GrowthFit fit_strong_asymptotic(const AsymptoticSeries& s) {
    const int N = s.max_order();
    if (N < 8) throw std::invalid_argument("fit_strong_asymptotic: need max_order >= 8");

    // OLS of log|a_n| - log n! against n over the late-order window [N/4, N].
    const int lo = N / 4;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    auto y_of = [&](int n) {
        return s.coefficients[static_cast<size_t>(n)].log_magnitude - std::lgamma(n + 1.0);
    };
    for (int n = lo; n <= N; ++n) {
        if (s.coefficients[static_cast<size_t>(n)].is_zero) continue;
        const double y = y_of(n);
        sx += n;
        sy += y;
        sxx += double(n) * n;
        sxy += n * y;
        ++m;
    }
    if (m < 2) throw std::invalid_argument("fit_strong_asymptotic: too few nonzero coefficients");
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;

    // Inflate C until |a_n| <= C sigma^n n! holds for every available
    // order n >= 1. (The strong asymptotic condition constrains the
    // coefficients only from n = 1 up; a_0 = f(0) is unconstrained.)
    double worst = 0.0;
    for (int n = 1; n <= N; ++n) {
        if (s.coefficients[static_cast<size_t>(n)].is_zero) continue;
        worst = std::max(worst, y_of(n) - (intercept + slope * n));
    }

    GrowthFit fit;
    fit.sigma = std::exp(slope);
    fit.residual = worst;
    fit.C = std::exp(intercept + std::max(worst, 0.0));
    fit.satisfied = std::exp(std::max(worst, 0.0)) < 10.0;
    return fit;
}

}  // namespace pertkit::series
