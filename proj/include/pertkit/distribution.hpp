#pragma once

// Distributions as functionals on test functions: regular kernels
// (optionally punctured at the origin), delta-derivative terms, sums,
// distributional derivatives, and custom functionals (renormalized
// extensions). Includes the scaling map and the numeric scaling-degree
// estimator.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pertkit/quadrature.hpp"
#include "pertkit/test_function.hpp"

namespace pertkit::dist {

// A scalar kernel evaluated as f(scale_arg * x); the scaling map acts by
// multiplying scale_arg so that repeated scalings compose exactly.
struct KernelFn {
    std::function<double(double)> f;
    std::string tag;
    nlohmann::json params = nlohmann::json::object();
    std::vector<double> breakpoints;  // non-smooth points of f in its own argument
    double scale_arg = 1.0;

    double operator()(double x) const { return f(scale_arg * x); }
};

KernelFn kernel_from_tag(const std::string& tag, const nlohmann::json& params = {});
KernelFn kernel_from_json(const nlohmann::json& j);

// Delta-derivative index: plain derivative order for n=1, Laplacian power
// for radially symmetric n>1 (total order |alpha| = 2*order then).
struct DeltaSpec {
    int order = 0;
    bool laplacian = false;
    int total_order() const { return laplacian ? 2 * order : order; }
};

class PunctureViolationError : public std::runtime_error {
  public:
    explicit PunctureViolationError(const std::string& w) : std::runtime_error(w) {}
};
class NotLocallyIntegrableError : public std::runtime_error {
  public:
    explicit NotLocallyIntegrableError(const std::string& w) : std::runtime_error(w) {}
};

// Hook for functionals defined outside this module (renormalized extensions).
class Applicable {
  public:
    virtual ~Applicable() = default;
    virtual double apply_probe(const Probe& p, const quad::QuadratureConfig& cfg) const = 0;
    virtual int dimension() const = 0;
    virtual nlohmann::json descriptor() const = 0;
};

class Distribution {
  public:
    enum class Kind { regular, delta, sum, derivative, scaled, custom };

    static Distribution regular(int dimension, KernelFn kernel, bool punctured,
                                const quad::QuadratureConfig& check_cfg = {});
    static Distribution delta(int dimension, DeltaSpec spec = {}, double coeff = 1.0);
    static Distribution sum(std::vector<Distribution> terms);
    static Distribution derivative(Distribution inner, int order = 1);
    static Distribution scaled(double factor, Distribution inner);
    static Distribution custom(std::shared_ptr<const Applicable> impl);

    Kind kind() const;
    int dimension() const;
    const KernelFn& kernel() const;           // regular only
    bool punctured() const;                   // regular only
    const DeltaSpec& delta_spec() const;      // delta only
    double coefficient() const;               // delta / scaled factor

    nlohmann::json to_json() const;
    static Distribution from_json(const nlohmann::json& j);

    struct Impl;
    explicit Distribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    const Impl& impl() const { return *impl_; }

  private:
    std::shared_ptr<const Impl> impl_;
};

double apply(const Distribution& T, const Probe& phi, const quad::QuadratureConfig& cfg = {});
double apply(const Distribution& T, const TestFunction& phi, const quad::QuadratureConfig& cfg = {});

// T_lambda with T_lambda[phi] = T[phi_lambda]: regular kernels become
// x -> f(lambda x), delta terms pick up lambda^{-n-|alpha|}.
Distribution scale(const Distribution& T, double lambda);

struct ScalingReport {
    std::vector<double> lambda_grid;
    std::vector<std::vector<double>> samples;  // samples[probe][grid index]
    double fitted_degree = 0.0;
    double regression_r2 = 0.0;
    int probe_count = 0;
    bool confident = false;
    bool exact = false;  // delta shortcut, no sampling
    std::string to_csv() const;
};

class InconclusiveScalingError : public std::runtime_error {
  public:
    InconclusiveScalingError(const std::string& w, ScalingReport r)
        : std::runtime_error(w), report(std::move(r)) {}
    ScalingReport report;
};

std::vector<double> dyadic_lambda_grid(int levels = 10);  // 2^0 .. 2^-levels

ScalingReport estimate_scaling_degree(const Distribution& T, const std::vector<TestFunction>& probes,
                                      std::vector<double> lambda_grid = {},
                                      const quad::QuadratureConfig& cfg = {});

// scaling-degree calculus bounds
double sd_derivative_bound(double sd, int alpha_total);  // sd + |alpha|
double sd_monomial_bound(double sd, int alpha_total);    // sd - |alpha|
double sd_sum_bound(double sd1, double sd2);             // max
int propagator_sd(int n);                                // n - 2

double surface_measure(int n);  // S_{n-1}; S_3 = 2 pi^2

}  // namespace pertkit::dist
