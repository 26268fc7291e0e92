#pragma once

// Finite-interval quadrature used by every integral in the toolkit.
// Two independent schemes are provided so that they can cross-check each
// other: an adaptive Gauss-Kronrod (G7/K15) subdivision scheme and a
// double-exponential (tanh-sinh) scheme. Infinite domains are handled by
// the callers through analytic truncation with a recorded tail bound.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pertkit::quad {

enum class Scheme {
    adaptive_gk,  // adaptive subdivision with a Gauss-Kronrod 7/15 pair
    tanh_sinh,    // double-exponential transformation, level refinement
};

struct QuadratureConfig {
    Scheme scheme = Scheme::adaptive_gk;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
    // Radius at which improper integrands are cut; 0 means "derive from
    // abs_tol" (callers bound the tail analytically and fold it into the
    // reported error).
    double truncation_radius = 0.0;

    double target(double value_estimate) const {
        return std::max(abs_tol, rel_tol * std::abs(value_estimate));
    }
};

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;  // estimate, <= max(abs_tol, rel_tol*|value|) on success
    int subdivisions = 0;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double best_value, double best_error)
        : std::runtime_error(what), best_value(best_value), best_error(best_error) {}
    double best_value;
    double best_error;
};

using Integrand = std::function<double(double)>;

// Integrate f over [a, b] with the configured scheme.
IntegralResult integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg = {});

// Integrate over consecutive segments [pts[0],pts[1]], [pts[1],pts[2]], ...
// Zero-length segments are skipped. Error estimates add.
IntegralResult integrate_segments(const Integrand& f, std::vector<double> pts,
                                  const QuadratureConfig& cfg = {});

}  // namespace pertkit::quad
