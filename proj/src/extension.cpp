#include "pertkit/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pertkit::renorm {

using dist::Probe;

dist::TestFunction CutoffFunction::profile() const {
    dist::TestFunction f;
    f.dimension = 1;
    f.center = 0.0;
    if (kind == CutoffKind::smoothed_step) {
        f.family = dist::SmoothingFamily::smoothed_step;
        f.radius = 1.0 / M;
        f.smoothing = smoothing;
        f.normalization = 1.0;
    } else {
        f.family = dist::SmoothingFamily::mollifier;
        f.radius = radius;
        f.normalization = std::exp(1.0);  // mollifier(0) = e^{-1}
    }
    return f;
}

double CutoffFunction::plateau() const {
    return kind == CutoffKind::smoothed_step ? (1.0 - smoothing) / M : 0.5 * radius;
}

double CutoffFunction::support_outer() const {
    return kind == CutoffKind::smoothed_step ? (1.0 + smoothing) / M : radius;
}

nlohmann::json CutoffFunction::to_json() const {
    if (kind == CutoffKind::smoothed_step)
        return {{"kind", "smoothed_step"}, {"M", M}, {"smoothing", smoothing}};
    return {{"kind", "mollifier"}, {"radius", radius}};
}

CutoffFunction CutoffFunction::from_json(const nlohmann::json& j) {
    CutoffFunction w;
    const std::string kind = j.value("kind", "smoothed_step");
    if (kind == "smoothed_step") {
        w.kind = CutoffKind::smoothed_step;
        w.M = j.value("M", 1.0);
        w.smoothing = j.value("smoothing", 1e-2);
    } else if (kind == "mollifier") {
        w.kind = CutoffKind::mollifier_normalized;
        w.radius = j.value("radius", 1.0);
    } else {
        throw std::invalid_argument("unknown cutoff kind: " + kind);
    }
    return w;
}

CountertermCount counterterm_dimension(int n, double omega) {
    if (n < 1) throw std::invalid_argument("counterterm_dimension: n must be >= 1");
    CountertermCount c;
    c.n = n;
    c.omega = omega;
    if (omega < 0) return c;  // both counts zero
    const int m = static_cast<int>(std::floor(omega));
    // number of multi-indices alpha in N^n with |alpha| <= m: C(n + m, n)
    long long total = 1;
    for (int i = 1; i <= n; ++i) total = total * (m + i) / i;
    c.total = total;
    c.rotation_invariant = m / 2 + 1;
    return c;
}

Probe taylor_subtract(const Probe& phi, double omega, const CutoffFunction& w) {
    if (omega < 0) throw std::invalid_argument("taylor_subtract: omega must be >= 0");
    const int K = static_cast<int>(std::floor(omega));
    if (K > 4) throw std::invalid_argument("taylor_subtract: orders above 4 are not supported");

    const dist::TestFunction wf = w.profile();
    // Taylor coefficients of phi/w at 0 (w(0) = 1 by construction; the
    // division keeps the formula valid for cutoffs not normalized exactly)
    Jet psi = phi.jet(0.0, K) / wf.jet_at(0.0, K);
    std::vector<double> subtract(psi.c.begin(), psi.c.begin() + K + 1);

    Probe out;
    out.dimension = phi.dimension;
    const double w_hi = w.support_outer();
    out.lo = phi.dimension > 1 ? 0.0 : std::min(phi.lo, -w_hi);
    out.hi = std::max(phi.hi, w_hi);
    out.jet = [inner = phi.jet, wf, subtract](double x, int order) {
        Jet p = inner(x, order);
        Jet wj = wf.jet_at(x, order);
        Jet poly = polyval(subtract.data(), static_cast<int>(subtract.size()),
                           Jet::variable(x, order));
        return p - wj * poly;
    };

    // verified contract: phi_s vanishes at 0 together with derivatives <= K
    Jet probe0 = out.jet(0.0, K);
    double scale = 1.0;
    for (int j = 0; j <= K; ++j) scale = std::max(scale, std::abs(subtract[static_cast<size_t>(j)]));
    for (int j = 0; j <= K; ++j)
        if (std::abs(probe0.c[static_cast<size_t>(j)]) > 1e-8 * scale)
            throw std::logic_error("taylor_subtract: subtracted function does not vanish at 0");
    return out;
}

ExtendedDistribution::ExtendedDistribution(dist::KernelFn kernel, int n, double omega,
                                           CutoffFunction w, CountertermMap counterterms)
    : kernel_(std::move(kernel)), n_(n), omega_(omega), w_(w),
      counterterms_(std::move(counterterms)) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (omega < 0) throw std::invalid_argument("extend_renormalized: omega must be >= 0");
    const int K = static_cast<int>(std::floor(omega));
    for (const auto& [key, c] : counterterms_) {
        (void)c;
        const int order = n_ == 1 ? key : 2 * key;
        if (key < 0 || order > K)
            throw std::invalid_argument("counterterm key exceeds floor(omega)");
    }
}

double ExtendedDistribution::apply_probe(const Probe& phi, const quad::QuadratureConfig& cfg) const {
    if (phi.dimension != n_) throw std::invalid_argument("dimension mismatch");
    Probe phi_s = taylor_subtract(phi, omega_, w_);

    // k * phi_s is bounded near 0; avoid inf * 0 from overflowing kernels at
    // nodes far below the cancellation floor of the subtraction
    auto integrand = [&](double x) {
        const double v = phi_s.jet(x, 0).value();
        if (v == 0.0 || std::abs(x) < 1e-60) return 0.0;
        return kernel_(x) * v;
    };

    // The subtraction leaves a bounded integrand (including the radial
    // measure) near 0; verify cheaply so a too-small omega fails loudly
    // instead of silently diverging. Subtracted values below the double-
    // precision cancellation floor cannot certify anything and are skipped.
    {
        const double ref = 0.5 * std::min(w_.plateau() > 0 ? w_.plateau() : w_.support_outer(),
                                          std::max(std::abs(phi_s.hi), 1e-12));
        const double x1 = 1e-2 * ref, x2 = 1e-4 * ref;
        const double v1 = phi_s.jet(x1, 0).value();
        const double v2 = phi_s.jet(x2, 0).value();
        const double floor1 = 1e-12 * (std::abs(phi.jet(x1, 0).value()) + 1e-300);
        const double floor2 = 1e-12 * (std::abs(phi.jet(x2, 0).value()) + 1e-300);
        if (std::abs(v1) > floor1 && std::abs(v2) > floor2) {
            const double g1 = std::abs(kernel_(x1) * v1) * std::pow(x1, n_ - 1);
            const double g2 = std::abs(kernel_(x2) * v2) * std::pow(x2, n_ - 1);
            if (g2 > 30.0 * std::max(g1, 1e-100))
                throw std::domain_error(
                    "extend_renormalized: integrand grows near 0; singular order omega too "
                    "small for this kernel");
        }
    }

    const double plateau = w_.plateau();
    const double outer = std::max({phi_s.hi, w_.support_outer()});

    quad::QuadratureConfig inner_cfg = cfg;
    inner_cfg.scheme = quad::Scheme::tanh_sinh;  // steep near 0 for thin smoothing widths

    double total = 0.0;
    auto integrate_range = [&](double a, double b, const quad::QuadratureConfig& c) {
        if (b <= a) return;
        std::vector<double> seg{a, b};
        for (double bp : kernel_.breakpoints) {
            const double xbp = bp / kernel_.scale_arg;
            if (xbp > a && xbp < b) seg.push_back(xbp);
        }
        std::sort(seg.begin(), seg.end());
        if (n_ == 1) {
            total += quad::integrate_segments(integrand, seg, c).value;
        } else {
            auto radial = [&](double r) { return std::pow(r, n_ - 1) * integrand(r); };
            total += dist::surface_measure(n_) * quad::integrate_segments(radial, seg, c).value;
        }
    };

    if (n_ == 1) {
        integrate_range(-outer, -plateau, cfg);
        integrate_range(-plateau, 0.0, inner_cfg);
        integrate_range(0.0, plateau, inner_cfg);
        integrate_range(plateau, outer, cfg);
    } else {
        integrate_range(0.0, plateau, inner_cfg);
        integrate_range(plateau, outer, cfg);
    }

    // counterterm part: sum c_alpha (-1)^{|alpha|} d^alpha phi(0)
    for (const auto& [key, c] : counterterms_) {
        if (n_ == 1) {
            const double sign = key % 2 == 0 ? 1.0 : -1.0;
            total += c * sign * phi.derivative(0.0, key);
        } else {
            // Laplacian powers: (-1)^{2m} = +1
            Jet j = phi.jet(0.0, 2 * key);
            double fac = 1.0;
            for (int i = 1; i <= key; ++i) fac *= 2.0 * i * (2.0 * i + n_ - 2.0);
            total += c * fac * j.c[static_cast<size_t>(2 * key)];
        }
    }
    return total;
}

double ExtendedDistribution::apply(const dist::TestFunction& phi,
                                   const quad::QuadratureConfig& cfg) const {
    return apply_probe(dist::make_probe(phi), cfg);
}

nlohmann::json ExtendedDistribution::descriptor() const {
    nlohmann::json jc = nlohmann::json::object();
    for (const auto& [key, c] : counterterms_) jc[std::to_string(key)] = c;
    nlohmann::json jk{{"tag", kernel_.tag}};
    if (!kernel_.params.empty()) jk["params"] = kernel_.params;
    return {{"variant", "extension"}, {"kernel", jk},      {"dimension", n_},
            {"omega", omega_},        {"cutoff", w_.to_json()}, {"counterterms", jc}};
}

ExtendedDistribution ExtendedDistribution::from_json(const nlohmann::json& j) {
    CountertermMap cts;
    if (j.contains("counterterms"))
        for (const auto& [key, val] : j["counterterms"].items())
            cts[std::stoi(key)] = val.get<double>();
    return ExtendedDistribution(dist::kernel_from_json(j.at("kernel")), j.at("dimension").get<int>(),
                                j.at("omega").get<double>(), CutoffFunction::from_json(j.at("cutoff")),
                                std::move(cts));
}

dist::Distribution ExtendedDistribution::as_distribution() const {
    return dist::Distribution::custom(std::make_shared<ExtendedDistribution>(*this));
}

std::vector<double> geometric_schedule(double eps0, double ratio, int count) {
    if (!(eps0 > 0) || !(ratio > 1) || count < 4)
        throw std::invalid_argument("geometric_schedule: need eps0 > 0, ratio > 1, count >= 4");
    std::vector<double> s(static_cast<size_t>(count));
    double e = eps0;
    for (int i = 0; i < count; ++i, e /= ratio) s[static_cast<size_t>(i)] = e;
    return s;
}

namespace {

// T0[c_eps phi] with c_eps vanishing inside |x| < eps and 1 outside 2 eps
class LowSdExtension : public dist::Applicable {
  public:
    LowSdExtension(dist::KernelFn kernel, int n, std::vector<double> schedule)
        : kernel_(std::move(kernel)), n_(n), schedule_(std::move(schedule)) {}

    double apply_probe(const Probe& phi, const quad::QuadratureConfig& cfg) const override {
        std::vector<double> vals;
        vals.reserve(schedule_.size());
        for (double eps : schedule_) vals.push_back(evaluate_at(phi, eps, cfg));

        double scale = 1.0;
        for (double v : vals) scale = std::max(scale, std::abs(v));
        std::vector<double> d(vals.size() - 1);
        for (size_t i = 0; i + 1 < vals.size(); ++i) d[i] = vals[i + 1] - vals[i];

        // already converged (e.g. probe vanishes near 0, c_eps phi = phi)
        const double flat_tol = std::max(10.0 * cfg.abs_tol, 1e-13 * scale);
        bool flat = true;
        for (double x : d) flat = flat && std::abs(x) <= flat_tol;
        if (flat) return vals.back();

        // non-decaying differences mean sd >= n in practice (log divergence
        // gives asymptotically constant increments)
        int stalled = 0;
        for (size_t i = d.size() - 3; i + 1 < d.size(); ++i)
            if (std::abs(d[i + 1]) > flat_tol && std::abs(d[i + 1]) >= 0.9 * std::abs(d[i]))
                ++stalled;
        if (stalled >= 2)
            throw NonConvergentExtensionError(
                "extend_low_sd: cutoff schedule does not converge (scaling degree >= n?)", vals);

        auto aitken = [](double v0, double v1, double v2) {
            const double d1 = v1 - v0, d2 = v2 - v1;
            const double den = d2 - d1;
            return den == 0.0 ? v2 : v2 - d2 * d2 / den;
        };
        const size_t m = vals.size();
        const double lim = aitken(vals[m - 3], vals[m - 2], vals[m - 1]);
        const double prev = aitken(vals[m - 4], vals[m - 3], vals[m - 2]);
        if (std::abs(lim - prev) > std::max(1e3 * cfg.abs_tol, 1e-7 * scale))
            throw NonConvergentExtensionError(
                "extend_low_sd: extrapolated limit not stable across schedule windows", vals);
        return lim;
    }

    int dimension() const override { return n_; }

    nlohmann::json descriptor() const override {
        return {{"variant", "low_sd_extension"},
                {"kernel", kernel_.tag},
                {"dimension", n_},
                {"schedule", schedule_}};
    }

  private:
    double evaluate_at(const Probe& phi, double eps, const quad::QuadratureConfig& cfg) const {
        auto c_eps = [eps](double ax) {
            if (ax <= eps) return 0.0;
            if (ax >= 2.0 * eps) return 1.0;
            return dist::detail::smoothstep_jet(Jet::constant((ax - eps) / eps, 0)).value();
        };
        auto integrand = [&](double x) {
            return kernel_(x) * c_eps(std::abs(x)) * phi.jet(x, 0).value();
        };
        double total = 0.0;
        if (n_ == 1) {
            if (phi.lo < -eps)
                total += quad::integrate_segments(integrand,
                                                  {phi.lo, -2.0 * eps, -eps}, cfg).value;
            if (phi.hi > eps)
                total += quad::integrate_segments(integrand, {eps, 2.0 * eps, phi.hi}, cfg).value;
        } else {
            auto radial = [&](double r) { return std::pow(r, n_ - 1) * integrand(r); };
            if (phi.hi > eps)
                total += dist::surface_measure(n_) *
                         quad::integrate_segments(radial, {eps, 2.0 * eps, phi.hi}, cfg).value;
        }
        return total;
    }

    dist::KernelFn kernel_;
    int n_;
    std::vector<double> schedule_;
};

}  // namespace

dist::Distribution extend_low_sd(const dist::Distribution& T0, double sd,
                                 std::vector<double> eps_schedule,
                                 const quad::QuadratureConfig& cfg) {
    (void)cfg;
    if (T0.kind() != dist::Distribution::Kind::regular || !T0.punctured())
        throw std::invalid_argument("extend_low_sd: T0 must be a punctured regular distribution");
    if (!(sd < T0.dimension()))
        throw std::invalid_argument("extend_low_sd: requires scaling degree < n");
    if (eps_schedule.empty()) eps_schedule = geometric_schedule(0.25, 2.0, 14);
    if (eps_schedule.size() < 5)
        throw std::invalid_argument("extend_low_sd: schedule needs at least 5 entries");
    std::sort(eps_schedule.begin(), eps_schedule.end(), std::greater<>());
    return dist::Distribution::custom(
        std::make_shared<LowSdExtension>(T0.kernel(), T0.dimension(), std::move(eps_schedule)));
}

ExtendedDistribution extend_renormalized(dist::KernelFn kernel, int n, double omega,
                                         CutoffFunction w, CountertermMap counterterms) {
    return ExtendedDistribution(std::move(kernel), n, omega, w, std::move(counterterms));
}

dist::Distribution log_kernel_form(double M, double smoothing) {
    if (!(M > 0)) throw std::invalid_argument("log_kernel_form: M must be positive");
    dist::KernelFn f =
        dist::kernel_from_tag("log_step", {{"M", M}, {"smoothing", smoothing}});
    // the w-subtracted 1/|x| extension equals T_f[phi'] = -(dT_f)[phi]
    return dist::Distribution::scaled(
        -1.0, dist::Distribution::derivative(
                  dist::Distribution::regular(1, std::move(f), /*punctured=*/false), 1));
}

double rg_flow_difference(double M, double M_prime, double smoothing,
                          const dist::TestFunction& phi, const quad::QuadratureConfig& cfg,
                          const CountertermMap& counterterms, const dist::KernelFn* kernel) {
    if (!(M > 0) || !(M_prime > 0))
        throw std::invalid_argument("rg_flow_difference: scales must be positive");
    dist::KernelFn k = kernel ? *kernel : dist::kernel_from_tag("inv_abs");
    CutoffFunction w1{CutoffKind::smoothed_step, M, smoothing, 1.0};
    CutoffFunction w2{CutoffKind::smoothed_step, M_prime, smoothing, 1.0};
    ExtendedDistribution t1(k, 1, 0.0, w1, counterterms);
    ExtendedDistribution t2(k, 1, 0.0, w2, counterterms);
    return t2.apply(phi, cfg) - t1.apply(phi, cfg);
}

double w_independence_check(const dist::KernelFn& kernel, int n, double omega,
                            const CutoffFunction& w1, const CutoffFunction& w2,
                            const dist::TestFunction& phi, const quad::QuadratureConfig& cfg) {
    const int K = static_cast<int>(std::floor(omega));
    dist::Probe p = dist::make_probe(phi);
    Jet j0 = p.jet(0.0, std::min(K, kMaxJetOrder));
    for (int j = 0; j <= K; ++j)
        if (std::abs(j0.derivative(j)) > 1e-10)
            throw std::invalid_argument(
                "w_independence_check: probe must vanish to order omega at 0");
    ExtendedDistribution t1(kernel, n, omega, w1);
    ExtendedDistribution t2(kernel, n, omega, w2);
    return t1.apply_probe(p, cfg) - t2.apply_probe(p, cfg);
}

}  // namespace pertkit::renorm
