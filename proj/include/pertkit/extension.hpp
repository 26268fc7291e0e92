#pragma once

// Extension of distributions across the origin. For scaling degree < n a
// unique extension exists and is constructed from a shrinking cutoff
// schedule; for scaling degree >= n the Taylor-subtracted (renormalized)
// extension carries counterterm ambiguities and a cutoff scale M whose
// change generates the renormalization-group flow.

#include <map>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "pertkit/distribution.hpp"
#include "pertkit/test_function.hpp"

namespace pertkit::renorm {

enum class CutoffKind { mollifier_normalized, smoothed_step };

// w(x) with w(0) = 1, compactly supported and smooth. The smoothed step is
// identically 1 on |x| <= (1-s)/M and 0 beyond (1+s)/M, with a
// mollifier-integral transition in between.
struct CutoffFunction {
    CutoffKind kind = CutoffKind::smoothed_step;
    double M = 1.0;          // inverse-length scale (smoothed_step)
    double smoothing = 1e-2; // transition width fraction s
    double radius = 1.0;     // support radius (mollifier kind)

    dist::TestFunction profile() const;
    double operator()(double x) const { return profile()(x); }
    Jet jet_at(double x, int order) const { return profile().jet_at(x, order); }
    double plateau() const;        // inner radius below which the integrand is split off
    double support_outer() const;

    nlohmann::json to_json() const;
    static CutoffFunction from_json(const nlohmann::json& j);
};

struct CountertermCount {
    int n = 0;
    double omega = 0.0;
    long long total = 0;               // multi-indices with |alpha| <= floor(omega)
    long long rotation_invariant = 0;  // SO(n)-invariant combinations (powers of the Laplacian)
};
CountertermCount counterterm_dimension(int n, double omega);

// key: derivative order (n = 1) or Laplacian power (n > 1)
using CountertermMap = std::map<int, double>;

// phi_s(x) = phi(x) - sum_{|alpha| <= omega} x^alpha w(x)/alpha! d^alpha(phi/w)(0),
// with phi_s and derivatives through floor(omega) vanishing at 0 (verified).
dist::Probe taylor_subtract(const dist::Probe& phi, double omega, const CutoffFunction& w);

class ExtendedDistribution : public dist::Applicable {
  public:
    ExtendedDistribution(dist::KernelFn kernel, int n, double omega, CutoffFunction w,
                         CountertermMap counterterms = {});

    double apply_probe(const dist::Probe& phi, const quad::QuadratureConfig& cfg) const override;
    double apply(const dist::TestFunction& phi, const quad::QuadratureConfig& cfg = {}) const;
    int dimension() const override { return n_; }
    nlohmann::json descriptor() const override;

    dist::Distribution as_distribution() const;
    double singular_order() const { return omega_; }
    const CutoffFunction& cutoff() const { return w_; }
    const CountertermMap& counterterms() const { return counterterms_; }

    static ExtendedDistribution from_json(const nlohmann::json& j);

  private:
    dist::KernelFn kernel_;
    int n_;
    double omega_;
    CutoffFunction w_;
    CountertermMap counterterms_;
};

class NonConvergentExtensionError : public std::runtime_error {
  public:
    NonConvergentExtensionError(const std::string& w, std::vector<double> samples)
        : std::runtime_error(w), samples(std::move(samples)) {}
    std::vector<double> samples;
};

std::vector<double> geometric_schedule(double eps0, double ratio, int count);

// Unique extension for sd < n via T[phi] = lim T0[c_eps phi]; the converged
// tail of the schedule is extrapolated (Aitken), and failure of the
// differences to decay raises NonConvergentExtensionError.
dist::Distribution extend_low_sd(const dist::Distribution& T0, double sd,
                                 std::vector<double> eps_schedule = {},
                                 const quad::QuadratureConfig& cfg = {});

ExtendedDistribution extend_renormalized(dist::KernelFn kernel, int n, double omega,
                                         CutoffFunction w, CountertermMap counterterms = {});

// Derivative of the regular distribution with kernel
// f(y) = -ln(M|y|) theta_s(1 - M|y|) sign(y): the closed-form route to the
// w-subtracted 1/|x| extension.
dist::Distribution log_kernel_form(double M, double smoothing);

// apply(T_{M'}, phi) - apply(T_M, phi) for the 1/|x| extension at two cutoff
// scales with shared smoothing and counterterms; equals 2 ln(M'/M) phi(0) up
// to smoothing-width corrections.
double rg_flow_difference(double M, double M_prime, double smoothing,
                          const dist::TestFunction& phi, const quad::QuadratureConfig& cfg = {},
                          const CountertermMap& counterterms = {},
                          const dist::KernelFn* kernel = nullptr);

// Difference of two extensions with different cutoffs on a probe vanishing
// to order omega at 0; zero up to quadrature error.
double w_independence_check(const dist::KernelFn& kernel, int n, double omega,
                            const CutoffFunction& w1, const CutoffFunction& w2,
                            const dist::TestFunction& phi,
                            const quad::QuadratureConfig& cfg = {});

}  // namespace pertkit::renorm
