#include "oracle_bigint.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

mpq_class toy_rational(int k) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    mpz_class num, den_a, den_b;
    mpz_fac_ui(num.get_mpz_t(), 4 * static_cast<unsigned long>(k));
    mpz_fac_ui(den_a.get_mpz_t(), 2 * static_cast<unsigned long>(k));
    mpz_fac_ui(den_b.get_mpz_t(), static_cast<unsigned long>(k));
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, 4 * static_cast<unsigned long>(k));
    mpq_class q(num, den_a * den_b * two_pow);
    q.canonicalize();
    return q;
}

double toy_coefficient_value(int k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * std::sqrt(M_PI) * toy_rational(k).get_d();
}

int first_term_minimum(const mpq_class& lambda, int k_max) {
    mpq_class prev_term = toy_rational(0);  // lambda^0
    mpq_class pow = lambda;
    mpq_class cur_term = toy_rational(1) * pow;
    for (int k = 1; k + 1 <= k_max; ++k) {
        pow *= lambda;
        mpq_class next_term = toy_rational(k + 1) * pow;
        if (cur_term <= prev_term && cur_term < next_term) return k;
        prev_term = cur_term;
        cur_term = next_term;
    }
    throw std::runtime_error("no local minimum found in exact term scan");
}

double coefficient_ratio(int k) {
    mpq_class r = toy_rational(k + 1) / toy_rational(k);
    return r.get_d();
}

}  // namespace oracle
