#pragma once

// Borel transform, analytic continuation by Pade approximation in the
// Borel plane, and the inverse (Laplace) integral recovering a finite
// value from a divergent expansion.

#include <complex>
#include <vector>

#include <json.hpp>

#include "pertkit/quadrature.hpp"
#include "pertkit/series.hpp"

namespace pertkit::borel {

struct BorelTransform {
    series::AsymptoticSeries coefficients;  // a_n / n!, sign + log-magnitude
    double radius_estimate = 0.0;           // +inf sentinel when ratios diverge
};

struct RationalApproximant {
    std::vector<double> numerator;    // degree L
    std::vector<double> denominator;  // degree M, denominator[0] == 1
    std::vector<std::complex<double>> poles;
    std::vector<bool> spurious;       // Froissart doublet flag, parallel to poles
    double condition = 0.0;           // of the scaled linear system
    int L() const { return static_cast<int>(numerator.size()) - 1; }
    int M() const { return static_cast<int>(denominator.size()) - 1; }
    double evaluate(double t) const;
};

struct BorelDiagnostics {
    std::vector<std::complex<double>> poles;
    std::vector<bool> spurious;
    double radius_estimate = 0.0;
    double quadrature_error = 0.0;
    int L_used = 0;
    int M_used = 0;
    nlohmann::json to_json() const;
};

struct BorelResult {
    double value = 0.0;
    BorelDiagnostics diagnostics;
};

class NonBorelSummableError : public std::runtime_error {
  public:
    NonBorelSummableError(const std::string& what, std::vector<std::complex<double>> poles)
        : std::runtime_error(what), poles(std::move(poles)) {}
    std::vector<std::complex<double>> poles;
};

BorelTransform borel_transform(const series::AsymptoticSeries& s);

// [L/M] Pade approximant of the transform. Degenerate systems (detected by
// failure to reproduce the input series) reduce M by one and retry.
RationalApproximant pade(const BorelTransform& t, int L, int M);

// f(lambda) = int_0^inf g(b lambda) e^{-b} db with g continued by Pade.
BorelResult borel_sum(const series::AsymptoticSeries& s, double lambda, int L, int M,
                      const quad::QuadratureConfig& cfg = {});

}  // namespace pertkit::borel
