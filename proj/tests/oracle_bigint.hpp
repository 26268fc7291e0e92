#pragma once

// Exact big-integer/rational oracles for the toy-series tests. Everything
// here is independent of the library's log-domain arithmetic: coefficients
// are exact rationals, term comparisons are exact rational comparisons.

#include <gmpxx.h>

namespace oracle {

// (4k)! / (2^{4k} (2k)! k!)  -- the coefficient a_k with the sqrt(pi) factor
// stripped (it is a common positive factor and drops out of comparisons)
mpq_class toy_rational(int k);

// sqrt(pi) * (-1)^k * toy_rational(k), rounded to double at the end
double toy_coefficient_value(int k);

// index of the first local minimum of |a_k lambda^k| (exact rational scan)
int first_term_minimum(const mpq_class& lambda, int k_max);

// |a_{k+1} / a_k| as a double (exact rational ratio, then rounded)
double coefficient_ratio(int k);

}  // namespace oracle
