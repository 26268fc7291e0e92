#include "pertkit/saddle.hpp"

#include <cmath>
#include <stdexcept>

namespace pertkit::saddle {

namespace {

Saddle make_saddle(std::complex<double> u0) {
    Saddle s;
    s.location = u0;
    s.action = u0 * u0 + u0 * u0 * u0 * u0;
    s.second_derivative = 2.0 + 12.0 * u0 * u0;
    s.gaussian_prefactor = std::sqrt(2.0 * M_PI / s.second_derivative);
    return s;
}

}  // namespace

std::vector<Saddle> find_saddles() {
    // 2u + 4u^3 = 0  =>  u = 0, u = +-i/sqrt(2)
    const double is2 = 1.0 / std::sqrt(2.0);
    return {make_saddle({0.0, 0.0}), make_saddle({0.0, is2}), make_saddle({0.0, -is2})};
}

std::complex<double> leading_contribution(const Saddle& s, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("leading_contribution: lambda must be positive");
    if (std::abs(s.second_derivative) < 1e-14)
        throw std::domain_error("leading_contribution: degenerate saddle (vanishing second derivative)");
    return nonperturbative_scale(s, lambda) * s.gaussian_prefactor;
}

double nonperturbative_scale(const Saddle& s, double lambda) {
    return std::exp(-std::abs(s.action) / lambda);
}

CrossoverOrder crossover_order(double lambda) {
    if (!(lambda > 0) || lambda >= 1.0)
        throw std::invalid_argument("crossover_order: requires 0 < lambda < 1");
    return {1.0 / lambda, 1.0 / (4.0 * lambda * std::log(1.0 / lambda))};
}

nlohmann::json saddle_table_json(double lambda) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : find_saddles()) {
        rows.push_back({{"location", {{"re", s.location.real()}, {"im", s.location.imag()}}},
                        {"action", {{"re", s.action.real()}, {"im", s.action.imag()}}},
                        {"scale", nonperturbative_scale(s, lambda)}});
    }
    return nlohmann::json{{"lambda", lambda}, {"saddles", rows}};
}

}  // namespace pertkit::saddle
