#pragma once

#include <map>
#include <string>
#include <vector>

#include "bhit/specfun.hpp"
#include "bhit/zeros.hpp"

namespace bhit {

enum class Regime { FromOrigin, Inward, ToOrigin, Outward };

const char* regime_name(Regime r);

/// Start a, target b and index nu of a first hitting time. The index is
/// snapped onto a half-integer when it lies within 1e-9 of one.
class HittingQuery {
public:
    HittingQuery(double a, double b, double nu);

    double a() const { return a_; }
    double b() const { return b_; }
    const Index& nu() const { return nu_; }
    Regime regime() const { return regime_; }
    /// a / b; requires b > 0.
    double alpha() const;
    /// a == b: the hitting time is identically zero.
    bool trivial() const { return a_ == b_; }
    /// lim_{t -> inf} P(tau <= t).
    double total_mass() const;

private:
    double a_, b_;
    Index nu_;
    Regime regime_;
};

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    /// Guaranteed exponential decay rate of the damped L-kernel.
    double x_truncation_decay = 2.0;
    int max_subdivisions = 2000;

    /// X with e^{-decay X} / decay below abs_tol (times the kernel's pi bound).
    double truncation_point() const;
    void validate() const;
};

/// A sampled distribution function. `method` is one of exact-series,
/// exact-outward, exact-closed-form, oracle-inversion, oracle-mc.
struct DistributionCurve {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> err_estimates;
    std::string method;
    double total_mass = 1.0;
};

/// A value with an absolute error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

// ---------------------------------------------------------------------------
// Laplace transforms E[exp(-lambda tau)].

double laplace_hitting(const HittingQuery& q, double lambda);
/// Analytic continuation to complex lambda off the negative real axis.
cplx laplace_hitting(const HittingQuery& q, cplx lambda);

// ---------------------------------------------------------------------------
// Kernel and ratio decomposition.

/// L_{mu,c}(x). Overflows to infinity once e^{(c-3)x} does; the damped form
/// below stays finite.
double l_kernel(double mu, double c, double x);
/// L_{mu,c}(x) e^{-(c-1)x}, which decays like e^{-2x}.
double l_kernel_damped(double mu, double c, double x);

/// K_nu(cw)/K_nu(w) assembled from the exponential term, the zero sum and the
/// kernel integral.
cplx ratio_decomposition(const Index& nu, double c, CutPlanePoint w, const QuadratureSpec& spec = {});

// ---------------------------------------------------------------------------
// Distribution functions.

struct SeriesOptions {
    /// Hard cap on the number of eigenfunction terms.
    int max_terms = 100000;
    /// Terms are added until the tail bound drops below this.
    double abs_tol = 1e-16;
};

/// Eigenfunction-series evaluation with its truncation report.
struct SeriesEstimate {
    double cdf = 0.0;
    double survival = 0.0;
    double error = 0.0;
    int terms = 0;
    /// True when max_terms was reached before the tail bound met abs_tol.
    bool truncated = false;
};

SeriesEstimate series_from_origin(const HittingQuery& q, double t, const SeriesOptions& opt = {});
SeriesEstimate series_inward(const HittingQuery& q, double t, const SeriesOptions& opt = {});

/// P(tau_{0,b} <= t). With k_terms > 0 exactly that many terms are summed.
double cdf_from_origin(const HittingQuery& q, double t, int k_terms = 0);
/// P(tau_{a,b} <= t) for 0 < a <= b.
double cdf_inward(const HittingQuery& q, double t);
/// P(tau_{a,0} <= t) = Q(|nu|, a^2 / 2t).
double cdf_to_origin(const HittingQuery& q, double t);

double psi1(const HittingQuery& q, double t);
cplx psi2(const HittingQuery& q, double t, cplx z, const QuadratureSpec& spec = {});
Estimate psi3(const HittingQuery& q, double t, const QuadratureSpec& spec = {});

/// Pieces of the outward representation at one time.
struct OutwardParts {
    double psi1 = 0.0;
    double erfc_part = 0.0;       // 1 - psi1, computed directly
    cplx zero_sum{};              // sum_j w_j psi2(t; z_j)
    double psi3 = 0.0;
    double cdf = 0.0;
    double survival = 0.0;
    double error = 0.0;
    /// survival - (1 - (b/a)^{2 nu}) for nu > 0, survival otherwise.
    double excess_survival = 0.0;
};

OutwardParts outward_parts(const HittingQuery& q, double t, const QuadratureSpec& spec = {});
double cdf_outward(const HittingQuery& q, double t, const QuadratureSpec& spec = {});
/// Outward CDF from the double integral in s, for coarse cross-checks only.
double cdf_outward_raw(const HittingQuery& q, double t, const QuadratureSpec& spec = {});

/// Regime dispatch.
Estimate cdf_estimate(const HittingQuery& q, double t, const QuadratureSpec& spec = {});
Estimate survival_estimate(const HittingQuery& q, double t, const QuadratureSpec& spec = {});
double cdf(const HittingQuery& q, double t, const QuadratureSpec& spec = {});
double survival(const HittingQuery& q, double t, const QuadratureSpec& spec = {});

DistributionCurve cdf_curve(const HittingQuery& q, const std::vector<double>& times,
                            const QuadratureSpec& spec = {});
/// Method tag that cdf_curve uses for this query.
std::string exact_method_tag(const HittingQuery& q);

// ---------------------------------------------------------------------------
// Rescaled inversion pairs.

/// Inverse transform of e^{-(alpha-1) sqrt(lambda)} / lambda.
double inv_laplace_p1(double alpha, double t);
/// Inverse transform of e^{-(alpha-1) sqrt(lambda)} / (sqrt(lambda)(sqrt(lambda) - z)).
cplx inv_laplace_p2(double alpha, cplx z, double t);

/// int_beta^inf x^n e^{-mu x} dx = e^{-beta mu} sum_k n!/k! beta^k / mu^{n-k+1}.
double exp_moment_tail(int n, double beta, double mu);

// ---------------------------------------------------------------------------
// Large-time behaviour of the outward survival function.

struct TailCoefficients {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    bool has_sigma = false;  // half-integer nu only
    std::map<int, double> beta1;
    std::map<int, double> beta2;
    std::map<int, double> beta3;  // empty for half-integer nu
    int m_max = -1;
};

/// m(nu): the greatest integer not exceeding |nu| - 1/2.
int m_of(const Index& nu);
double beta1(const HittingQuery& q, int m);
cplx beta_mz(const HittingQuery& q, int m, cplx z);
double beta2(const HittingQuery& q, int m);
double beta3(const HittingQuery& q, int m, const QuadratureSpec& spec = {});
double sigma1(const HittingQuery& q);
double sigma2(const HittingQuery& q);

TailCoefficients tail_coefficients(const HittingQuery& q, const QuadratureSpec& spec = {});

/// Leading large-t approximation of P(tau > t), constant term included.
/// For half-integer nu the t^{-|nu|} coefficient is built from sigma1 - (b/a)^nu sigma2
/// (nu < 0) and (b/a)^{2nu}(sigma1 - (a/b)^nu sigma2) (nu > 0).
double tail_asymptotic(const HittingQuery& q, double t);
/// The same with sigma2 entering with a plus sign.
double tail_asymptotic_plus_sigma2(const HittingQuery& q, double t);

}  // namespace bhit
