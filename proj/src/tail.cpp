#include <cmath>

#include "bhit/hitting.hpp"
#include "kernel_integral.hpp"

namespace bhit {

namespace {

void require_outward(const HittingQuery& q) {
    if (q.regime() != Regime::Outward) throw DomainError("tail quantities need 0<b<a");
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// sum_{k=0}^{n} x^k / k!
cplx exp_partial(cplx x, int n) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 1; k <= n; ++k) {
        term *= x / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

void require_m(const HittingQuery& q, int m) {
    if (m < 0 || m > m_of(q.nu())) throw DomainError("m must lie in [0, m(nu)]");
}

}  // namespace

int m_of(const Index& nu) {
    const double v = nu.abs_nu() - 0.5;
    if (v < 0.0) return -1;
    if (nu.is_half_integer()) return static_cast<int>(std::lround(v));
    return static_cast<int>(std::floor(v));
}

double beta1(const HittingQuery& q, int m) {
    require_outward(q);
    if (m < 0) throw DomainError("m must be nonnegative");
    return std::pow(q.a() - q.b(), 2 * m + 1) / (2.0 * m + 1.0);
}

cplx beta_mz(const HittingQuery& q, int m, cplx z) {
    require_outward(q);
    if (m < 0) throw DomainError("m must be nonnegative");
    const double a = q.a();
    const double b = q.b();
    const cplx x = z * (a - b) / b;
    return -factorial(2 * m) * std::pow(b / z, 2 * m + 1) * std::exp(x) * exp_partial(-x, 2 * m);
}

double beta2(const HittingQuery& q, int m) {
    require_outward(q);
    require_m(q, m);
    const auto zs = cached_k_zeros(q.nu().abs_nu());
    if (zs->count() == 0) return 0.0;
    const auto w = zs->residue_weights(q.alpha());
    cplx sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * beta_mz(q, m, zs->zeros()[j]);
    return sum.real();
}

double beta3(const HittingQuery& q, int m, const QuadratureSpec& spec) {
    require_outward(q);
    require_m(q, m);
    if (q.nu().is_half_integer()) return 0.0;
    const double a = q.a();
    const double b = q.b();
    const double mu = q.nu().abs_nu();
    const double r = (a - b) / b;
    double sum = 0.0;
    double rk = 1.0;  // r^k / k!
    for (int k = 0; k <= 2 * m; ++k) {
        if (k > 0) rk *= r / k;
        const double power = 2.0 * m - k + 2.0;
        const auto res = detail::kernel_integral<double>(mu, a / b, power, 0.5, [](double) { return 1.0; }, spec);
        if (!res.converged) throw NumericalError("beta3 kernel moment did not converge");
        sum += rk * res.value;
    }
    return factorial(2 * m) * std::pow(b, 2 * m + 1) * sum;
}

double sigma1(const HittingQuery& q) {
    require_outward(q);
    if (!q.nu().is_half_integer()) throw DomainError("sigma coefficients need half-integer nu");
    const double mu = q.nu().abs_nu();
    return std::pow(q.a() - q.b(), 2.0 * mu) / (2.0 * mu);
}

double sigma2(const HittingQuery& q) {
    require_outward(q);
    if (!q.nu().is_half_integer()) throw DomainError("sigma coefficients need half-integer nu");
    const double mu = q.nu().abs_nu();
    const auto zs = cached_k_zeros(mu);
    if (zs->count() == 0) return 0.0;
    const double a = q.a();
    const double b = q.b();
    const int n = static_cast<int>(std::lround(2.0 * mu));
    const auto w = zs->residue_weights(q.alpha());
    cplx sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const cplx z = zs->zeros()[j];
        const cplx x = z * (a - b) / b;
        sum += w[j] / std::pow(z, n) * std::exp(x) * exp_partial(-x, n - 1);
    }
    return std::pow(b, 2.0 * mu) * factorial(n - 1) * sum.real();
}

TailCoefficients tail_coefficients(const HittingQuery& q, const QuadratureSpec& spec) {
    require_outward(q);
    TailCoefficients tc;
    tc.m_max = m_of(q.nu());
    if (q.nu().is_half_integer()) {
        tc.has_sigma = true;
        tc.sigma1 = sigma1(q);
        tc.sigma2 = sigma2(q);
    }
    for (int m = 0; m <= tc.m_max; ++m) {
        tc.beta1[m] = beta1(q, m);
        tc.beta2[m] = beta2(q, m);
        if (!q.nu().is_half_integer()) tc.beta3[m] = beta3(q, m, spec);
    }
    return tc;
}

namespace {

double tail_impl(const HittingQuery& q, double t, double sigma2_sign) {
    require_outward(q);
    if (!(t > 1.0) || !std::isfinite(t)) throw DomainError("tail_asymptotic needs finite t > 1");
    const double a = q.a();
    const double b = q.b();
    const double v = q.nu().nu();
    const double c = b / a;
    if (v == 0.0) return 2.0 * std::log(a / b) / std::log(t);
    if (q.nu().is_half_integer()) {
        const double mu = q.nu().abs_nu();
        const int m = static_cast<int>(std::lround(mu - 0.5));
        const double lead = std::sqrt(2.0 / kPi) * std::pow(-0.5, m) / factorial(m);
        const double s1 = sigma1(q);
        const double s2 = sigma2(q);
        if (v < 0.0) return lead * (s1 + sigma2_sign * std::pow(c, v) * s2) * std::pow(t, v);
        const double c2 = std::pow(c, 2.0 * v);
        return 1.0 - c2 + c2 * lead * (s1 + sigma2_sign * std::pow(a / b, v) * s2) * std::pow(t, -v);
    }
    if (v > 0.0) {
        return 1.0 - std::pow(c, 2.0 * v) + std::pow(b * b * b / (2.0 * a), v) *
                                                 (std::pow(a / b, v) - std::pow(b / a, v)) /
                                                 (std::tgamma(1.0 + v) * std::pow(t, v));
    }
    return std::pow(2.0 / (a * b), v) * (std::pow(b / a, v) - std::pow(a / b, v)) * std::pow(t, v) /
           std::tgamma(1.0 - v);
}

}  // namespace

double tail_asymptotic(const HittingQuery& q, double t) { return tail_impl(q, t, -1.0); }

double tail_asymptotic_plus_sigma2(const HittingQuery& q, double t) { return tail_impl(q, t, 1.0); }

}  // namespace bhit
