#pragma once

// Steepest-descent data for the substituted toy integral
// (1/sqrt(lambda)) int du exp(-(u^2+u^4)/lambda): saddle locations of
// u^2+u^4, leading Gaussian contributions, the nonperturbative scale
// exp(-|S|/lambda) and the crossover order where perturbation theory
// stops improving.

#include <complex>
#include <vector>

#include <json.hpp>

namespace pertkit::saddle {

struct Saddle {
    std::complex<double> location;            // u0 with 2u + 4u^3 = 0
    std::complex<double> action;              // S = u0^2 + u0^4
    std::complex<double> second_derivative;   // d^2/du^2 (u^2+u^4) at u0
    std::complex<double> gaussian_prefactor;  // sqrt(2 pi / S''), principal branch
};

// the three saddles {0, +i/sqrt2, -i/sqrt2} in closed form
std::vector<Saddle> find_saddles();

// (1/sqrt(lambda)) e^{-|S|/lambda} sqrt(2 pi lambda / S'').  The decaying
// sign convention e^{-|S|/lambda} is used for the off-contour saddles; the
// lambda factors cancel, so the u=0 saddle gives exactly sqrt(pi).
std::complex<double> leading_contribution(const Saddle& s, double lambda);

// e^{-|S|/lambda}; the magnitude invisible to the Taylor expansion
double nonperturbative_scale(const Saddle& s, double lambda);

struct CrossoverOrder {
    double k_paper;  // 1/lambda, the order-of-magnitude estimate
    double k_exact;  // 1/(4 lambda ln(1/lambda)), the exact solve of e^{-1/(4l)} = l^k
};
CrossoverOrder crossover_order(double lambda);

nlohmann::json saddle_table_json(double lambda);

}  // namespace pertkit::saddle
