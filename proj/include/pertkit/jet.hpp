#pragma once

// Truncated Taylor-series arithmetic. A Jet holds the Taylor coefficients
// c_k = f^{(k)}(x0)/k! of a function at a point, up to a fixed maximum
// order, and propagates them through +, -, *, /, exp. Test-function
// derivatives are obtained this way instead of finite differences so that
// Taylor subtraction sees derivative values at machine precision.

#include <array>
#include <cmath>
#include <stdexcept>

namespace pertkit {

inline constexpr int kMaxJetOrder = 6;

struct Jet {
    int order = 0;                                 // highest tracked coefficient
    std::array<double, kMaxJetOrder + 1> c{};      // Taylor coefficients

    Jet() = default;
    explicit Jet(int ord) : order(ord) {
        if (ord < 0 || ord > kMaxJetOrder) throw std::invalid_argument("jet order out of range");
    }

    // constant
    static Jet constant(double v, int ord) {
        Jet j(ord);
        j.c[0] = v;
        return j;
    }
    // the independent variable at x0
    static Jet variable(double x0, int ord) {
        Jet j(ord);
        j.c[0] = x0;
        if (ord >= 1) j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }
    // k-th derivative (not the raw coefficient)
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r(a.order);
    for (int k = 0; k <= a.order; ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
    Jet r(a.order);
    for (int k = 0; k <= a.order; ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
}

inline Jet operator-(const Jet& a) {
    Jet r(a.order);
    for (int k = 0; k <= a.order; ++k) r.c[k] = -a.c[k];
    return r;
}

inline Jet operator*(const Jet& a, double s) {
    Jet r(a.order);
    for (int k = 0; k <= a.order; ++k) r.c[k] = a.c[k] * s;
    return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }

inline Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c[0] += s;
    return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }

// truncated Cauchy product
inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.order);
    for (int k = 0; k <= a.order; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
    if (b.c[0] == 0.0) throw std::domain_error("jet division by zero leading coefficient");
    Jet r(a.order);
    for (int k = 0; k <= a.order; ++k) {
        double s = a.c[k];
        for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
        r.c[k] = s / b.c[0];
    }
    return r;
}

inline Jet exp(const Jet& u) {
    Jet r(u.order);
    r.c[0] = std::exp(u.c[0]);
    for (int k = 1; k <= u.order; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * u.c[j] * r.c[k - j];
        r.c[k] = s / k;
    }
    return r;
}

// jet of a polynomial sum_i p[i] x^i evaluated on x (Horner)
inline Jet polyval(const double* p, int np, const Jet& x) {
    Jet r = Jet::constant(0.0, x.order);
    for (int i = np - 1; i >= 0; --i) r = r * x + p[i];
    return r;
}

// jet of f^{(m)} from a jet of f computed to order `order + m`
inline Jet shift_derivative(const Jet& a, int m, int order) {
    if (m + order > a.order) throw std::invalid_argument("jet too short for derivative shift");
    Jet r(order);
    for (int j = 0; j <= order; ++j) {
        double f = 1.0;  // (j+m)! / j!
        for (int i = j + 1; i <= j + m; ++i) f *= i;
        r.c[j] = a.c[j + m] * f;
    }
    return r;
}

}  // namespace pertkit
