#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bhit/hitting.hpp"

namespace bhit {

enum class InversionMethod { Talbot, GaverStehfest };

const char* inversion_method_name(InversionMethod m);

struct InversionSpec {
    InversionMethod method = InversionMethod::Talbot;
    /// 0 selects the default: 48 Talbot nodes, 16 Gaver-Stehfest terms.
    int node_count = 0;
    /// Run Gaver-Stehfest next to Talbot and report their gap as the error.
    bool cross_check = true;

    int nodes() const;
    void validate() const;
};

using RealTransform = std::function<double(double)>;
using ComplexTransform = std::function<cplx(cplx)>;

/// f(t) from its transform F on the fixed Talbot contour, n midpoint nodes.
double talbot_invert(const ComplexTransform& F, double t, int n = 48);
/// f(t) from real samples F(k ln2 / t), k = 1..n; n even.
double gaver_stehfest_invert(const RealTransform& F, double t, int n = 16);

struct InversionResult {
    double value = 0.0;
    /// |talbot - gaver-stehfest| when both ran, else 0.
    double error = 0.0;
    std::string method;
    /// Set when the two methods disagree by more than 1e-4.
    bool flagged = false;
};

/// P(tau <= t) by inverting E[exp(-lambda tau)] / lambda.
InversionResult invert_transform(const HittingQuery& q, const InversionSpec& spec, double t);
DistributionCurve invert_curve(const HittingQuery& q, const InversionSpec& spec, const std::vector<double>& times);

// ---------------------------------------------------------------------------
// Monte Carlo.

struct McSpec {
    std::int64_t paths = 100000;
    std::uint64_t seed = 20240601;
    /// Step size dt = clamp(eps * d^2, dt_min, dt_max) with d the distance to
    /// the target level (and to the origin for the Euler scheme).
    double eps = 0.02;
    double dt_min = 1e-9;
    /// 0 selects horizon / 100.
    double dt_max = 0.0;
    /// Paths still running at the horizon are right-censored.
    double horizon = 0.0;
    bool bridge_correction = true;
    /// 0 uses the hardware concurrency.
    int threads = 0;

    void validate() const;
};

enum class McScheme { GaussianVector, SquaredBesselExact, EulerAbsorbed };

const char* mc_scheme_name(McScheme s);
/// Scheme simulate_hitting uses for this query.
McScheme mc_scheme_for(const HittingQuery& q);

struct McResult {
    /// Sorted hitting times of the paths that hit before the horizon.
    std::vector<double> hit_times;
    std::int64_t paths = 0;
    std::int64_t censored = 0;
    double horizon = 0.0;
    /// Half-width of the 99% Dvoretzky-Kiefer-Wolfowitz band.
    double band = 0.0;
    McScheme scheme = McScheme::GaussianVector;
    /// Empirical CDF on the requested times; err_estimates hold the band.
    DistributionCurve curve;

    double ecdf(double t) const;
};

/// Half-width of the DKW band at confidence 1 - alpha for n samples.
double dkw_band(std::int64_t n, double alpha = 0.01);

/// Simulate first hitting times up to spec.horizon (required > 0) and tabulate
/// the empirical CDF on `times`.
McResult simulate_hitting(const HittingQuery& q, const McSpec& spec, const std::vector<double>& times = {});

/// sup over `times` of |ecdf - exact|.
double ks_on_grid(const McResult& mc, const std::vector<double>& times, const std::vector<double>& exact);

/// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace bhit
