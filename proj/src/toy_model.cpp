#include "pertkit/toy_model.hpp"

#include <cmath>
#include <stdexcept>

namespace pertkit::toy {

ZResult z_exact(double lambda, const quad::QuadratureConfig& cfg) {
    if (lambda < 0) throw std::invalid_argument("z_exact: lambda must be nonnegative");

    // Truncate where the Gaussian tail alone is below abs_tol/100:
    // int_R^inf e^{-x^2} dx <= e^{-R^2}/(2R).
    double R = cfg.truncation_radius;
    if (R <= 0.0) R = std::sqrt(std::log(100.0 / cfg.abs_tol));
    const double tail = std::exp(-R * R) / (2.0 * R);

    auto f = [lambda](double x) {
        const double x2 = x * x;
        return std::exp(-x2 - lambda * x2 * x2);
    };
    quad::IntegralResult half = quad::integrate(f, 0.0, R, cfg);
    return {2.0 * half.value, 2.0 * (half.error + tail), false};
}

ZResult z_bessel(double lambda, const quad::QuadratureConfig& cfg) {
    if (!(lambda > 0)) throw std::invalid_argument("z_bessel: lambda must be positive");
    const double x = 1.0 / (8.0 * lambda);

    // e^{-x cosh t} <= e^{-x} underflows the whole integrand for x beyond
    // ~700; the closed form is then useless in double precision.
    if (x > 700.0) {
        ZResult r = z_exact(lambda, cfg);
        r.bessel_fallback = true;
        return r;
    }

    // Truncation T of the t-integral: require x cosh T - T/4 >= ln(2/tail_target).
    const double tail_target = 0.01 * cfg.abs_tol * std::exp(-x);  // scale-aware
    const double L = std::log(2.0 / tail_target);
    double T = 1.0;
    for (int it = 0; it < 40; ++it) {
        const double arg = (L + T / 4.0) / x;
        T = arg > 1.0 ? std::acosh(arg) : 1.0;
    }
    T = std::max(T, 1.0);
    // tail bound: int_T^inf e^{-x cosh t + t/4} dt <= e^{-x cosh T + T/4} / (x sinh T - 1/4)
    const double denom = x * std::sinh(T) - 0.25;
    const double tail = denom > 0 ? std::exp(-x * std::cosh(T) + T / 4.0) / denom : tail_target;

    auto integrand = [x](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(t / 4.0); };
    quad::QuadratureConfig kcfg = cfg;
    kcfg.abs_tol = tail_target;  // the K value is itself of size ~e^{-x}
    quad::IntegralResult k = quad::integrate(integrand, 0.0, T, kcfg);

    if (k.value <= 0.0) {  // underflowed despite the x guard
        ZResult r = z_exact(lambda, cfg);
        r.bessel_fallback = true;
        return r;
    }

    // e^x * K / (2 sqrt(lambda)), with the product formed in the log domain
    const double pref = 1.0 / (2.0 * std::sqrt(lambda));
    const double value = std::exp(x + std::log(k.value)) * pref;
    const double err = (k.error + tail) * std::exp(x) * pref;
    return {value, err, false};
}

}  // namespace pertkit::toy
