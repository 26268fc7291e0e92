#pragma once

// High-precision ground truth for Z(lambda) = int dx exp(-x^2 - lambda x^4),
// by direct quadrature and through the modified-Bessel closed form
// Z = e^{1/(8 lambda)} K_{1/4}(1/(8 lambda)) / (2 sqrt(lambda)).

#include "pertkit/quadrature.hpp"

namespace pertkit::toy {

struct ZResult {
    double value = 0.0;
    double error = 0.0;           // quadrature estimate plus analytic tail bound
    bool bessel_fallback = false; // z_bessel fell back to z_exact (underflow guard)
};

ZResult z_exact(double lambda, const quad::QuadratureConfig& cfg = {});

// Bessel route; K_{1/4}(x) is evaluated from its integral representation
// int_0^inf exp(-x cosh t) cosh(t/4) dt with the same quadrature machinery.
// For x = 1/(8 lambda) large enough that exp(-x) underflows, falls back to
// z_exact and sets bessel_fallback.
ZResult z_bessel(double lambda, const quad::QuadratureConfig& cfg = {});

}  // namespace pertkit::toy
