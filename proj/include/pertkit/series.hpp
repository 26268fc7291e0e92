#pragma once

// Divergent power series in a coupling lambda: coefficient storage in
// sign + log-magnitude form, partial sums, optimal truncation and
// factorial-growth diagnostics.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pertkit::series {

// One coefficient a_k, stored as sign * exp(log_magnitude). (4k)! alone
// overflows a double at k = 43, while the toy model needs orders ~40-60,
// so magnitudes live in the log domain throughout.
struct SeriesCoefficient {
    int k = 0;
    int sign = 1;                 // +1 or -1 (ignored when is_zero)
    double log_magnitude = 0.0;   // ln|a_k|, undefined when is_zero
    bool is_zero = false;

    double value() const;
    static SeriesCoefficient from_value(int k, double v);
    static SeriesCoefficient zero(int k);
};

struct AsymptoticSeries {
    std::vector<SeriesCoefficient> coefficients;  // contiguous, indices 0..N

    int max_order() const { return static_cast<int>(coefficients.size()) - 1; }
    const SeriesCoefficient& at(int k) const;

    static AsymptoticSeries from_values(std::span<const double> values);

    nlohmann::json to_json() const;
    static AsymptoticSeries from_json(const nlohmann::json& j);
};

// Fitted constants witnessing the factorial growth bound |a_n| <= C sigma^n n!.
struct GrowthFit {
    double C = 0.0;
    double sigma = 0.0;
    double residual = 0.0;  // max log-domain violation of the OLS line before inflation
    bool satisfied = false;
};

class OutOfCoefficientsError : public std::runtime_error {
  public:
    explicit OutOfCoefficientsError(const std::string& what) : std::runtime_error(what) {}
};

// a_k of the quartic toy integral, lambda stripped:
// a_k = sqrt(pi) (-1)^k (4k)! / (2^{4k} (2k)! k!), computed with lgamma.
SeriesCoefficient toy_coefficient(int k);
AsymptoticSeries toy_series(int max_order);

// sum_{k<=N} a_k lambda^k with compensated summation
double partial_sum(const AsymptoticSeries& s, double lambda, int N);

// index of the first local minimum of |a_k lambda^k|
int optimal_truncation(const AsymptoticSeries& s, double lambda);

GrowthFit fit_strong_asymptotic(const AsymptoticSeries& s);

}  // namespace pertkit::series
