#include "pertkit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pertkit::dist {

struct Distribution::Impl {
    Kind kind;
    int n = 1;
    // regular
    KernelFn kernel;
    bool punctured = false;
    // delta
    DeltaSpec dspec;
    double coeff = 1.0;
    // composite: sum terms, or the single child of derivative/scaled
    std::vector<Distribution> terms;
    int deriv_order = 1;
    double factor = 1.0;
    // custom
    std::shared_ptr<const Applicable> custom_impl;
};

namespace {

using Impl = Distribution::Impl;

// numeric local-integrability probe: dyadic shells around 0 must have
// summable |kernel| mass (ratio of successive shell masses < ~0.97)
void check_locally_integrable(int n, const KernelFn& k, const quad::QuadratureConfig&) {
    quad::QuadratureConfig shell_cfg;
    shell_cfg.abs_tol = 1e-12;
    shell_cfg.rel_tol = 1e-6;
    shell_cfg.max_subdivisions = 200;

    auto shell_mass = [&](double a, double b) {
        auto f = [&](double x) {
            const double w = n > 1 ? std::pow(x, n - 1) : 1.0;
            double v = std::abs(k(x)) * w;
            if (n == 1) v += std::abs(k(-x)) * w;
            return v;
        };
        return quad::integrate(f, a, b, shell_cfg).value;
    };

    double prev = -1.0;
    int bad = 0;
    for (int level = 1; level <= 22; ++level) {
        const double hi = std::pow(2.0, -level);
        const double mass = shell_mass(hi / 2.0, hi);
        if (!std::isfinite(mass))
            throw NotLocallyIntegrableError("kernel '" + k.tag + "' is not locally integrable near 0");
        if (level > 8) {  // ignore the transient from kernel structure away from 0
            if (prev > 0.0 && mass > 0.97 * prev) ++bad;
            else bad = 0;
            if (bad >= 4)
                throw NotLocallyIntegrableError(
                    "kernel '" + k.tag + "' fails the numeric local-integrability check near 0 "
                    "(dyadic shell masses do not decay)");
        }
        prev = mass;
        if (mass == 0.0) return;  // vanishes near 0
    }
}

void check_puncture(const Probe& p) {
    const double extent = std::max({std::abs(p.lo), std::abs(p.hi), 1e-300});
    const double gap = 1e-6 * extent;
    Jet j0 = p.jet(0.0, 2);
    for (int k = 0; k <= 2; ++k)
        if (j0.c[static_cast<size_t>(k)] != 0.0)
            throw PunctureViolationError(
                "punctured distribution applied to a test function that does not vanish in a "
                "neighbourhood of 0");
    for (int i = 1; i <= 5; ++i) {
        const double x = gap * i / 5.0;
        if (p.jet(x, 0).value() != 0.0 || (p.lo < 0 && p.jet(-x, 0).value() != 0.0))
            throw PunctureViolationError(
                "punctured distribution applied to a test function not identically zero on "
                "|x| < 1e-6 * support radius");
    }
}

double puncture_gap(const Probe& p) {
    return 1e-6 * std::max({std::abs(p.lo), std::abs(p.hi), 1e-300});
}

double apply_regular(const Impl& im, const Probe& p, const quad::QuadratureConfig& cfg) {
    if (im.punctured) check_puncture(p);
    const double gap = im.punctured ? puncture_gap(p) : 0.0;

    auto integrand = [&](double x) { return im.kernel(x) * p.jet(x, 0).value(); };

    auto range_value = [&](double a, double b) {
        if (b <= a) return 0.0;
        std::vector<double> seg{a, b};
        for (double bp : im.kernel.breakpoints) {
            const double xbp = bp / im.kernel.scale_arg;
            if (xbp > a && xbp < b) seg.push_back(xbp);
        }
        std::sort(seg.begin(), seg.end());
        return quad::integrate_segments(integrand, seg, cfg).value;
    };

    double total = 0.0;
    if (im.n == 1) {
        if (p.lo < 0.0) total += range_value(p.lo, std::min(-gap, p.hi));
        total += range_value(std::max(gap, p.lo), p.hi);
    } else {
        const double lo = std::max({p.lo, gap});
        std::vector<double> seg{lo, p.hi};
        for (double bp : im.kernel.breakpoints) {
            const double xbp = bp / im.kernel.scale_arg;
            if (xbp > lo && xbp < p.hi) seg.push_back(xbp);
        }
        std::sort(seg.begin(), seg.end());
        const int n = im.n;
        auto radial = [&](double r) {
            return std::pow(r, n - 1) * im.kernel(r) * p.jet(r, 0).value();
        };
        total = surface_measure(n) * quad::integrate_segments(radial, seg, cfg).value;
    }
    return total;
}

double apply_delta(const Impl& im, const Probe& p) {
    const DeltaSpec& d = im.dspec;
    if (im.n == 1) {
        if (d.laplacian && d.order > 0)
            throw std::invalid_argument("laplacian delta terms require dimension > 1");
        const int k = d.order;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return im.coeff * sign * p.derivative(0.0, k);
    }
    if (!d.laplacian && d.order > 0)
        throw std::invalid_argument("only Laplacian-power delta derivatives are supported for n > 1");
    if (d.order == 0) return im.coeff * p.jet(0.0, 0).value();
    if (2 * d.order > kMaxJetOrder)
        throw std::invalid_argument("Laplacian power too high for the jet order");
    // Delta^m phi(0) for a radial profile F: coefficient of r^{2m} times
    // prod_{j=1..m} 2j (2j + n - 2)
    Jet j = p.jet(0.0, 2 * d.order);
    double fac = 1.0;
    for (int i = 1; i <= d.order; ++i) fac *= 2.0 * i * (2.0 * i + im.n - 2.0);
    return im.coeff * fac * j.c[static_cast<size_t>(2 * d.order)];
}

double apply_impl(const Impl& im, const Probe& p, const quad::QuadratureConfig& cfg) {
    switch (im.kind) {
        case Distribution::Kind::regular:
            return apply_regular(im, p, cfg);
        case Distribution::Kind::delta:
            return apply_delta(im, p);
        case Distribution::Kind::sum: {
            double s = 0.0;
            for (const auto& t : im.terms) s += apply(t, p, cfg);
            return s;
        }
        case Distribution::Kind::derivative: {
            const double sign = (im.deriv_order % 2 == 0) ? 1.0 : -1.0;
            return sign * apply(im.terms.front(), derivative_probe(p, im.deriv_order), cfg);
        }
        case Distribution::Kind::scaled:
            return im.factor * apply(im.terms.front(), p, cfg);
        case Distribution::Kind::custom:
            return im.custom_impl->apply_probe(p, cfg);
    }
    throw std::logic_error("unreachable");
}

Distribution wrap(std::shared_ptr<Impl> im) { return Distribution(std::move(im)); }

}  // namespace

Distribution Distribution::regular(int dimension, KernelFn kernel, bool punctured,
                                   const quad::QuadratureConfig& check_cfg) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!punctured) check_locally_integrable(dimension, kernel, check_cfg);
    auto im = std::make_shared<Impl>();
    im->kind = Kind::regular;
    im->n = dimension;
    im->kernel = std::move(kernel);
    im->punctured = punctured;
    return wrap(std::move(im));
}

Distribution Distribution::delta(int dimension, DeltaSpec spec, double coeff) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (dimension == 1 && spec.laplacian) spec = DeltaSpec{2 * spec.order, false};
    auto im = std::make_shared<Impl>();
    im->kind = Kind::delta;
    im->n = dimension;
    im->dspec = spec;
    im->coeff = coeff;
    return wrap(std::move(im));
}

Distribution Distribution::sum(std::vector<Distribution> terms) {
    if (terms.empty()) throw std::invalid_argument("sum of zero distributions");
    const int n = terms.front().dimension();
    for (const auto& t : terms)
        if (t.dimension() != n) throw std::invalid_argument("sum terms must share the dimension");
    auto im = std::make_shared<Impl>();
    im->kind = Kind::sum;
    im->n = n;
    im->terms = std::move(terms);
    return wrap(std::move(im));
}

Distribution Distribution::derivative(Distribution inner, int order) {
    if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (inner.dimension() != 1)
        throw std::invalid_argument("distributional derivatives are implemented for n = 1 only");
    auto im = std::make_shared<Impl>();
    im->kind = Kind::derivative;
    im->n = 1;
    im->terms.push_back(std::move(inner));
    im->deriv_order = order;
    return wrap(std::move(im));
}

Distribution Distribution::scaled(double factor, Distribution inner) {
    auto im = std::make_shared<Impl>();
    im->kind = Kind::scaled;
    im->n = inner.dimension();
    im->factor = factor;
    im->terms.push_back(std::move(inner));
    return wrap(std::move(im));
}

Distribution Distribution::custom(std::shared_ptr<const Applicable> impl) {
    auto im = std::make_shared<Impl>();
    im->kind = Kind::custom;
    im->n = impl->dimension();
    im->custom_impl = std::move(impl);
    return wrap(std::move(im));
}

Distribution::Kind Distribution::kind() const { return impl_->kind; }
int Distribution::dimension() const { return impl_->n; }
const KernelFn& Distribution::kernel() const {
    if (impl_->kind != Kind::regular) throw std::logic_error("not a regular distribution");
    return impl_->kernel;
}
bool Distribution::punctured() const {
    if (impl_->kind != Kind::regular) throw std::logic_error("not a regular distribution");
    return impl_->punctured;
}
const DeltaSpec& Distribution::delta_spec() const {
    if (impl_->kind != Kind::delta) throw std::logic_error("not a delta term");
    return impl_->dspec;
}
double Distribution::coefficient() const {
    if (impl_->kind == Kind::delta) return impl_->coeff;
    if (impl_->kind == Kind::scaled) return impl_->factor;
    throw std::logic_error("no scalar coefficient for this variant");
}

double apply(const Distribution& T, const Probe& phi, const quad::QuadratureConfig& cfg) {
    if (T.dimension() != phi.dimension)
        throw std::invalid_argument("distribution / test function dimension mismatch");
    return apply_impl(T.impl(), phi, cfg);
}

double apply(const Distribution& T, const TestFunction& phi, const quad::QuadratureConfig& cfg) {
    return apply(T, make_probe(phi), cfg);
}

Distribution scale(const Distribution& T, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("scale: lambda must be positive");
    const Impl& im = T.impl();
    switch (im.kind) {
        case Distribution::Kind::regular: {
            KernelFn k = im.kernel;
            k.scale_arg *= lambda;
            auto copy = std::make_shared<Impl>(im);
            copy->kernel = std::move(k);
            return Distribution(std::move(copy));
        }
        case Distribution::Kind::delta: {
            auto copy = std::make_shared<Impl>(im);
            copy->coeff = im.coeff * std::pow(lambda, -double(im.n + im.dspec.total_order()));
            return Distribution(std::move(copy));
        }
        case Distribution::Kind::sum: {
            std::vector<Distribution> terms;
            terms.reserve(im.terms.size());
            for (const auto& t : im.terms) terms.push_back(scale(t, lambda));
            return Distribution::sum(std::move(terms));
        }
        case Distribution::Kind::derivative: {
            // (dT)_lambda = lambda^{-k} d(T_lambda)
            Distribution d =
                Distribution::derivative(scale(im.terms.front(), lambda), im.deriv_order);
            auto wrapim = std::make_shared<Impl>();
            wrapim->kind = Distribution::Kind::scaled;
            wrapim->n = im.n;
            wrapim->factor = std::pow(lambda, -double(im.deriv_order));
            wrapim->terms.push_back(std::move(d));
            return Distribution(std::move(wrapim));
        }
        case Distribution::Kind::scaled: {
            auto wrapim = std::make_shared<Impl>(im);
            wrapim->terms.clear();
            wrapim->terms.push_back(scale(im.terms.front(), lambda));
            return Distribution(std::move(wrapim));
        }
        case Distribution::Kind::custom:
            throw std::invalid_argument("scaling is not defined for custom functionals");
    }
    throw std::logic_error("unreachable");
}

std::vector<double> dyadic_lambda_grid(int levels) {
    std::vector<double> g;
    for (int k = 0; k <= levels; ++k) g.push_back(std::pow(2.0, -k));
    return g;
}

std::string ScalingReport::to_csv() const {
    std::ostringstream os;
    os << "# {\"fitted_degree\":" << fitted_degree << ",\"regression_r2\":" << regression_r2
       << ",\"probe_count\":" << probe_count << ",\"confident\":" << (confident ? "true" : "false")
       << "}\n";
    os << "lambda";
    for (int p = 0; p < probe_count; ++p) os << ",probe_" << p;
    os << "\n";
    char buf[64];
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", lambda_grid[i]);
        os << buf;
        for (const auto& s : samples) {
            std::snprintf(buf, sizeof buf, "%.17g", i < s.size() ? s[i] : 0.0);
            os << "," << buf;
        }
        os << "\n";
    }
    return os.str();
}

ScalingReport estimate_scaling_degree(const Distribution& T, const std::vector<TestFunction>& probes,
                                      std::vector<double> lambda_grid,
                                      const quad::QuadratureConfig& cfg) {
    if (probes.size() < 2)
        throw std::invalid_argument("estimate_scaling_degree: need at least 2 probes");
    if (lambda_grid.empty()) lambda_grid = dyadic_lambda_grid();
    std::sort(lambda_grid.begin(), lambda_grid.end(), std::greater<>());
    if (!(lambda_grid.front() / lambda_grid.back() >= 100.0))
        throw std::invalid_argument("estimate_scaling_degree: grid must span at least 2 decades");

    ScalingReport rep;
    rep.lambda_grid = lambda_grid;
    rep.probe_count = static_cast<int>(probes.size());

    if (T.kind() == Distribution::Kind::delta) {
        rep.fitted_degree = T.dimension() + T.delta_spec().total_order();
        rep.regression_r2 = 1.0;
        rep.confident = true;
        rep.exact = true;
        return rep;
    }

    double best_degree = -std::numeric_limits<double>::infinity();
    double best_r2 = 0.0;
    bool any_valid = false;
    for (const auto& probe : probes) {
        std::vector<double> vals;
        for (double lam : lambda_grid) vals.push_back(apply(scale(T, lam), probe, cfg));
        rep.samples.push_back(vals);

        // log-log OLS over nonzero samples
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        int m = 0;
        for (size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] == 0.0 || !std::isfinite(vals[i])) continue;
            const double x = std::log(lambda_grid[i]);
            const double y = std::log(std::abs(vals[i]));
            sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
            ++m;
        }
        if (m < 4) continue;
        const double denom = m * sxx - sx * sx;
        const double slope = (m * sxy - sx * sy) / denom;
        const double ss_tot = syy - sy * sy / m;
        double r2;
        if (ss_tot <= 1e-20 * std::max(1.0, syy)) {
            r2 = 1.0;  // constant samples: perfect degree-0 fit
        } else {
            const double ss_res = ss_tot - slope * (sxy - sx * sy / m);
            r2 = 1.0 - std::max(0.0, ss_res) / ss_tot;
        }
        any_valid = true;
        if (-slope > best_degree) {
            best_degree = -slope;
            best_r2 = r2;
        }
    }

    if (!any_valid)
        throw InconclusiveScalingError("estimate_scaling_degree: no probe produced usable samples",
                                       rep);
    rep.fitted_degree = best_degree;
    rep.regression_r2 = best_r2;
    rep.confident = best_r2 >= 0.99;
    if (best_r2 < 0.9) {
        // check whether any probe cleared the bar before declaring failure
        throw InconclusiveScalingError(
            "estimate_scaling_degree: regression r^2 below 0.9 on all probes", rep);
    }
    return rep;
}

double sd_derivative_bound(double sd, int alpha_total) { return sd + alpha_total; }
double sd_monomial_bound(double sd, int alpha_total) { return sd - alpha_total; }
double sd_sum_bound(double sd1, double sd2) { return std::max(sd1, sd2); }
int propagator_sd(int n) { return n - 2; }

double surface_measure(int n) {
    // S_{n-1} = 2 pi^{n/2} / Gamma(n/2)
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

KernelFn kernel_from_tag(const std::string& tag, const nlohmann::json& params) {
    KernelFn k;
    k.tag = tag;
    k.params = params.is_null() ? nlohmann::json::object() : params;
    if (tag == "one") {
        k.f = [](double) { return 1.0; };
    } else if (tag == "inv_abs") {
        k.f = [](double x) { return 1.0 / std::abs(x); };
        k.breakpoints = {0.0};
    } else if (tag == "inv_sqrt_abs") {
        k.f = [](double x) { return 1.0 / std::sqrt(std::abs(x)); };
        k.breakpoints = {0.0};
    } else if (tag == "abs_pow") {
        const double p = k.params.at("exponent").get<double>();
        k.f = [p](double x) { return std::pow(std::abs(x), p); };
        k.breakpoints = {0.0};
    } else if (tag == "inv_r4") {
        k.f = [](double r) { return 1.0 / (r * r * r * r); };
        k.breakpoints = {0.0};
    } else if (tag == "inv_r6") {
        k.f = [](double r) { return 1.0 / (r * r * r * r * r * r); };
        k.breakpoints = {0.0};
    } else if (tag == "gaussian") {
        k.f = [](double x) { return std::exp(-x * x); };
    } else if (tag == "log_step") {
        // f(y) = -ln(M|y|) theta_s(1 - M|y|) sign(y): the closed-form kernel
        // whose derivative reproduces the w-subtracted 1/|x| extension
        const double M = k.params.value("M", 1.0);
        const double s = k.params.value("smoothing", 1e-2);
        TestFunction w;
        w.family = SmoothingFamily::smoothed_step;
        w.radius = 1.0 / M;
        w.smoothing = s;
        k.f = [M, w](double y) {
            if (y == 0.0) return 0.0;
            const double sgn = y > 0 ? 1.0 : -1.0;
            return -std::log(M * std::abs(y)) * w(y) * sgn;
        };
        k.breakpoints = {-(1.0 + s) / M, -(1.0 - s) / M, 0.0, (1.0 - s) / M, (1.0 + s) / M};
    } else {
        throw std::invalid_argument("unknown kernel tag: " + tag);
    }
    return k;
}

KernelFn kernel_from_json(const nlohmann::json& j) {
    if (j.is_string()) return kernel_from_tag(j.get<std::string>());
    KernelFn k = kernel_from_tag(j.at("tag").get<std::string>(),
                                 j.contains("params") ? j["params"] : nlohmann::json{});
    if (j.contains("scale_arg")) k.scale_arg = j["scale_arg"].get<double>();
    return k;
}

nlohmann::json Distribution::to_json() const {
    const Impl& im = *impl_;
    switch (im.kind) {
        case Kind::regular: {
            nlohmann::json jk{{"tag", im.kernel.tag}};
            if (!im.kernel.params.empty()) jk["params"] = im.kernel.params;
            if (im.kernel.scale_arg != 1.0) jk["scale_arg"] = im.kernel.scale_arg;
            return {{"variant", "regular"}, {"dimension", im.n}, {"kernel", jk},
                    {"punctured", im.punctured}};
        }
        case Kind::delta:
            return {{"variant", "delta"}, {"dimension", im.n}, {"order", im.dspec.order},
                    {"laplacian", im.dspec.laplacian}, {"coeff", im.coeff}};
        case Kind::sum: {
            nlohmann::json terms = nlohmann::json::array();
            for (const auto& t : im.terms) terms.push_back(t.to_json());
            return {{"variant", "sum"}, {"terms", terms}};
        }
        case Kind::derivative:
            return {{"variant", "derivative"}, {"order", im.deriv_order},
                    {"of", im.terms.front().to_json()}};
        case Kind::scaled:
            return {{"variant", "scaled"}, {"factor", im.factor},
                    {"of", im.terms.front().to_json()}};
        case Kind::custom:
            return im.custom_impl->descriptor();
    }
    throw std::logic_error("unreachable");
}

Distribution Distribution::from_json(const nlohmann::json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "regular")
        return regular(j.at("dimension").get<int>(), kernel_from_json(j.at("kernel")),
                       j.value("punctured", false));
    if (variant == "delta")
        return delta(j.at("dimension").get<int>(),
                     DeltaSpec{j.value("order", 0), j.value("laplacian", false)},
                     j.value("coeff", 1.0));
    if (variant == "sum") {
        std::vector<Distribution> terms;
        for (const auto& t : j.at("terms")) terms.push_back(from_json(t));
        return sum(std::move(terms));
    }
    if (variant == "derivative") return derivative(from_json(j.at("of")), j.value("order", 1));
    if (variant == "scaled") {
        auto im = std::make_shared<Impl>();
        im->kind = Kind::scaled;
        im->factor = j.at("factor").get<double>();
        im->terms.push_back(from_json(j.at("of")));
        im->n = im->terms.front().dimension();
        return Distribution(std::move(im));
    }
    throw std::invalid_argument("unknown distribution variant: " + variant);
}

}  // namespace pertkit::dist
