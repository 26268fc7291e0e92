#include "pertkit/borel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pertkit::borel {

namespace {

std::vector<double> coefficient_values(const series::AsymptoticSeries& s) {
    std::vector<double> v(s.coefficients.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = s.coefficients[i].value();
    return v;
}

// roots of a polynomial sum_j c_j t^j via the companion matrix
std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
    int deg = static_cast<int>(c.size()) - 1;
    while (deg > 0 && c[static_cast<size_t>(deg)] == 0.0) --deg;
    if (deg < 1) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<size_t>(i)] / c[static_cast<size_t>(deg)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(static_cast<size_t>(deg));
    for (int i = 0; i < deg; ++i) roots[static_cast<size_t>(i)] = es.eigenvalues()[i];
    return roots;
}

// reconstruct the Taylor series of numerator/denominator through order `n`
std::vector<double> rational_series(const std::vector<double>& p, const std::vector<double>& q,
                                    int n) {
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        double s = i < static_cast<int>(p.size()) ? p[static_cast<size_t>(i)] : 0.0;
        for (int j = 1; j < static_cast<int>(q.size()) && j <= i; ++j)
            s -= q[static_cast<size_t>(j)] * c[static_cast<size_t>(i - j)];
        c[static_cast<size_t>(i)] = s;  // q[0] == 1
    }
    return c;
}

// match relative to each coefficient, with an absolute floor set by the
// overall coefficient scale (tiny coefficients cannot carry 1e-8 relative
// accuracy through a double-precision solve)
bool series_matches(const std::vector<double>& got, const std::vector<double>& want, int through,
                    double rel_tol) {
    double scale = 0.0;
    for (int i = 0; i <= through; ++i) scale = std::max(scale, std::abs(want[static_cast<size_t>(i)]));
    if (scale == 0.0) scale = 1.0;
    for (int i = 0; i <= through; ++i) {
        const double w = want[static_cast<size_t>(i)];
        const double tol = rel_tol * std::max(std::abs(w), 1e-8 * scale);
        if (std::abs(got[static_cast<size_t>(i)] - w) > tol) return false;
    }
    return true;
}

// single [L/M] solve in the radius-scaled variable; returns false when the
// solution is non-finite or fails to reproduce the input series
bool try_pade(const std::vector<double>& c, int L, int M, double rho, RationalApproximant& out) {
    std::vector<double> ct(c.size());
    double r = 1.0;
    for (size_t i = 0; i < c.size(); ++i, r *= rho) ct[i] = c[i] * r;

    std::vector<double> qs(static_cast<size_t>(M) + 1, 0.0);
    qs[0] = 1.0;
    double cond = 1.0;
    if (M > 0) {
        Eigen::MatrixXd A(M, M);
        Eigen::VectorXd b(M);
        for (int i = 1; i <= M; ++i) {
            b(i - 1) = -ct[static_cast<size_t>(L + i)];
            for (int j = 1; j <= M; ++j) {
                const int idx = L + i - j;
                A(i - 1, j - 1) = idx >= 0 ? ct[static_cast<size_t>(idx)] : 0.0;
            }
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        const auto& R = qr.matrixR();
        double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < M; ++i) {
            const double d = std::abs(R(i, i));
            rmax = std::max(rmax, d);
            rmin = std::min(rmin, d);
        }
        cond = rmin > 0 ? rmax / rmin : std::numeric_limits<double>::infinity();
        Eigen::VectorXd q = qr.solve(b);
        if (!q.allFinite()) return false;
        for (int j = 1; j <= M; ++j) qs[static_cast<size_t>(j)] = q(j - 1);
    }

    std::vector<double> ps(static_cast<size_t>(L) + 1, 0.0);
    for (int i = 0; i <= L; ++i) {
        double s = ct[static_cast<size_t>(i)];
        for (int j = 1; j <= std::min(i, M); ++j) s += qs[static_cast<size_t>(j)] * ct[static_cast<size_t>(i - j)];
        ps[static_cast<size_t>(i)] = s;
    }

    // validate against the scaled input through order L+M
    if (!series_matches(rational_series(ps, qs, L + M), ct, L + M, 1e-8)) return false;

    // unscale: coefficient of t^k is (scaled coefficient)/rho^k
    out.numerator.assign(static_cast<size_t>(L) + 1, 0.0);
    out.denominator.assign(static_cast<size_t>(M) + 1, 0.0);
    r = 1.0;
    for (int i = 0; i <= std::max(L, M); ++i, r *= rho) {
        if (i <= L) out.numerator[static_cast<size_t>(i)] = ps[static_cast<size_t>(i)] / r;
        if (i <= M) out.denominator[static_cast<size_t>(i)] = qs[static_cast<size_t>(i)] / r;
    }
    out.condition = cond;
    return true;
}

}  // namespace

double RationalApproximant::evaluate(double t) const {
    double num = 0.0, den = 0.0;
    for (int i = L(); i >= 0; --i) num = num * t + numerator[static_cast<size_t>(i)];
    for (int i = M(); i >= 0; --i) den = den * t + denominator[static_cast<size_t>(i)];
    return num / den;
}

nlohmann::json BorelDiagnostics::to_json() const {
    nlohmann::json jp = nlohmann::json::array();
    for (size_t i = 0; i < poles.size(); ++i)
        jp.push_back({{"re", poles[i].real()},
                      {"im", poles[i].imag()},
                      {"spurious", spurious.size() > i ? static_cast<bool>(spurious[i]) : false}});
    return nlohmann::json{{"poles", jp},
                          {"radius_estimate", radius_estimate},
                          {"quadrature_error", quadrature_error},
                          {"order", {{"L", L_used}, {"M", M_used}}}};
}

BorelTransform borel_transform(const series::AsymptoticSeries& s) {
    if (s.max_order() < 4) throw std::invalid_argument("borel_transform: need max_order >= 4");
    BorelTransform t;
    t.coefficients.coefficients.reserve(s.coefficients.size());
    for (const auto& c : s.coefficients) {
        series::SeriesCoefficient g = c;
        if (!g.is_zero) g.log_magnitude -= std::lgamma(c.k + 1.0);
        t.coefficients.coefficients.push_back(g);
    }

    // ratio test |g_n / g_{n+1}| over the last third of the coefficients;
    // compare against the middle third to recognize a diverging (entire
    // function) trend
    const int N = t.coefficients.max_order();
    auto mean_ratio = [&](int lo, int hi) {
        double sum = 0.0;
        int cnt = 0;
        for (int n = lo; n < hi; ++n) {
            const auto& a = t.coefficients.coefficients[static_cast<size_t>(n)];
            const auto& b = t.coefficients.coefficients[static_cast<size_t>(n + 1)];
            if (a.is_zero || b.is_zero) continue;
            sum += std::exp(a.log_magnitude - b.log_magnitude);
            ++cnt;
        }
        return cnt > 0 ? sum / cnt : std::numeric_limits<double>::quiet_NaN();
    };
    const double last = mean_ratio(N - N / 3, N);
    const double middle = mean_ratio(N / 3, N - N / 3);
    if (!std::isfinite(last) || (std::isfinite(middle) && middle > 0 && last / middle > 1.25))
        t.radius_estimate = std::numeric_limits<double>::infinity();
    else
        t.radius_estimate = last;
    return t;
}

RationalApproximant pade(const BorelTransform& t, int L, int M) {
    if (L < 0 || M < 0) throw std::invalid_argument("pade: orders must be nonnegative");
    if (L + M + 1 > static_cast<int>(t.coefficients.coefficients.size()))
        throw std::invalid_argument("pade: L+M+1 exceeds available transform coefficients");

    const std::vector<double> c = coefficient_values(t.coefficients);
    const double rho =
        (std::isfinite(t.radius_estimate) && t.radius_estimate > 0) ? t.radius_estimate : 1.0;

    RationalApproximant out;
    bool ok = false;
    for (int m = M; m >= 0; --m) {
        if (try_pade(c, L, m, rho, out)) {
            ok = true;
            break;
        }
    }
    if (!ok) throw std::runtime_error("pade: all denominator orders degenerate");

    out.poles = poly_roots(out.denominator);
    const std::vector<std::complex<double>> zeros = poly_roots(out.numerator);
    out.spurious.assign(out.poles.size(), false);
    for (size_t i = 0; i < out.poles.size(); ++i)
        for (const auto& z : zeros)
            if (std::abs(z - out.poles[i]) < 1e-6) out.spurious[i] = true;
    return out;
}

BorelResult borel_sum(const series::AsymptoticSeries& s, double lambda, int L, int M,
                      const quad::QuadratureConfig& cfg) {
    if (!(lambda > 0)) throw std::invalid_argument("borel_sum: lambda must be positive");
    BorelTransform t = borel_transform(s);
    RationalApproximant r = pade(t, L, M);

    // Poles on the positive real Borel axis (excluding Froissart doublets)
    // obstruct the Laplace integral, which runs through t = b*lambda > 0.
    std::vector<std::complex<double>> blocking;
    for (size_t i = 0; i < r.poles.size(); ++i)
        if (!r.spurious[i] && std::abs(r.poles[i].imag()) < 1e-8 && r.poles[i].real() > 0)
            blocking.push_back(r.poles[i]);
    if (!blocking.empty())
        throw NonBorelSummableError("borel_sum: pole on the positive real Borel axis; "
                                    "not Borel summable along the real direction",
                                    blocking);

    // int_0^inf g(b lambda) e^{-b} db = int_0^1 g(-ln(s) lambda) ds
    auto integrand = [&](double sv) { return r.evaluate(-std::log(sv) * lambda); };
    quad::IntegralResult q;
    try {
        q = quad::integrate(integrand, 0.0, 1.0, cfg);
    } catch (const quad::QuadratureError&) {
        quad::QuadratureConfig fallback = cfg;
        fallback.scheme = cfg.scheme == quad::Scheme::adaptive_gk ? quad::Scheme::tanh_sinh
                                                                  : quad::Scheme::adaptive_gk;
        q = quad::integrate(integrand, 0.0, 1.0, fallback);
    }

    BorelResult res;
    res.value = q.value;
    res.diagnostics.poles = r.poles;
    res.diagnostics.spurious = r.spurious;
    res.diagnostics.radius_estimate = t.radius_estimate;
    res.diagnostics.quadrature_error = q.error;
    res.diagnostics.L_used = r.L();
    res.diagnostics.M_used = r.M();
    return res;
}

}  // namespace pertkit::borel
