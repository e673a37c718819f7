#include "bhit/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>

namespace bhit {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;
constexpr double kEulerGamma = 0.57721566490153286061;

double absval(double x) { return std::fabs(x); }
double absval(const cplx& z) { return std::abs(z); }

// ---------------------------------------------------------------------------
// Gamma helpers for the small-order series: 1/Gamma(1 +- mu) through zeta sums.

const std::array<double, 64>& zeta_table() {
    static const std::array<double, 64> table = [] {
        std::array<double, 64> z{};
        const double p2 = kPi * kPi;
        z[2] = p2 / 6.0;
        z[3] = 1.2020569031595942854;
        z[4] = p2 * p2 / 90.0;
        z[5] = 1.0369277551433699263;
        z[6] = p2 * p2 * p2 / 945.0;
        z[7] = 1.0083492773819228268;
        z[8] = p2 * p2 * p2 * p2 / 9450.0;
        z[9] = 1.0020083928260822144;
        z[10] = p2 * p2 * p2 * p2 * p2 / 93555.0;
        z[11] = 1.0004941886041194646;
        for (int k = 12; k < 64; ++k) {
            double s = 0.0;
            for (int n = 40; n >= 1; --n) s += std::pow(static_cast<double>(n), -k);
            z[k] = s;
        }
        return z;
    }();
    return table;
}

struct TemmeGammas {
    double gam1, gam2, gampl, gammi;
};

// |mu| <= 1/2. gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 the half sum.
TemmeGammas temme_gammas(double mu) {
    const auto& zeta = zeta_table();
    double odd = kEulerGamma * mu;  // odd part of -log G(1+mu)
    double odd_over_mu = kEulerGamma;
    double even = 0.0;
    double pw = mu;  // mu^{k-1}
    for (int k = 2; k < 64; ++k) {
        pw *= mu;
        const double term = zeta[k] * pw / k;
        if (k % 2 == 0) {
            even += term;
        } else {
            odd += term;
            odd_over_mu += zeta[k] * (pw / (mu == 0.0 ? 1.0 : mu)) / k;
        }
        if (std::fabs(term) < 1e-18) break;
    }
    if (mu == 0.0) odd_over_mu = kEulerGamma;
    const double sinhc = std::fabs(odd) < 1e-3
                             ? 1.0 + odd * odd / 6.0 + odd * odd * odd * odd / 120.0
                             : std::sinh(odd) / odd;
    const double e = std::exp(-even);
    TemmeGammas g{};
    g.gam1 = -e * sinhc * odd_over_mu;
    g.gam2 = e * std::cosh(odd);
    g.gampl = std::exp(odd - even);
    g.gammi = std::exp(-odd - even);
    return g;
}

// ---------------------------------------------------------------------------
// Modified Bessel functions, shared between real and complex arguments.

// I_{nu+1}(z) / I_nu(z) by the continued fraction 1/(b1 + 1/(b2 + ...)).
template <class T>
T i_ratio(double nu, T z) {
    // Leading series term; the next correction is O(|z|^2).
    if (absval(z) < 1e-150) return z / (2.0 * (nu + 1.0));
    const T zi = T(2.0) / z;
    T g = (nu + 1.0) * zi;
    T c = g;
    T d = 0.0;
    for (int j = 2; j < kMaxIter; ++j) {
        const T b = (nu + j) * zi;
        d = b + d;
        if (absval(d) < kTiny) d = kTiny;
        c = b + T(1.0) / c;
        if (absval(c) < kTiny) c = kTiny;
        d = T(1.0) / d;
        const T del = c * d;
        g *= del;
        if (absval(del - T(1.0)) < kEps) return T(1.0) / g;
    }
    throw NumericalError("continued fraction for I_{nu+1}/I_nu did not converge");
}

template <class T>
T sinh_over(T e) {
    return absval(e) < 1e-4 ? T(1.0) + e * e / 6.0 + e * e * e * e / 120.0 : std::sinh(e) / e;
}

// K_mu and K_{mu+1} (unscaled) for |mu| <= 1/2 and |z| < 2.
template <class T>
std::pair<T, T> k_small_series(double mu, T z) {
    const TemmeGammas g = temme_gammas(mu);
    const T x2 = z * 0.5;
    const double pimu = kPi * mu;
    const double fact = std::fabs(pimu) < 1e-4
                            ? 1.0 + pimu * pimu / 6.0 + 7.0 * pimu * pimu * pimu * pimu / 360.0
                            : pimu / std::sin(pimu);
    T d = -std::log(x2);
    T e = mu * d;
    T ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * sinh_over(e) * d);
    T sum = ff;
    const T ee = std::exp(e);
    T p = 0.5 * ee / g.gampl;
    T q = 0.5 / (ee * g.gammi);
    T c = 1.0;
    const T dd = x2 * x2;
    T sum1 = p;
    const double mu2 = mu * mu;
    for (int i = 1; i <= 500; ++i) {
        const double di = i;
        ff = (di * ff + p + q) / (di * di - mu2);
        c *= dd / di;
        p /= (di - mu);
        q /= (di + mu);
        const T del = c * ff;
        sum += del;
        const T del1 = c * (p - di * ff);
        sum1 += del1;
        if (absval(del) < absval(sum) * kEps && absval(del1) < absval(sum1) * kEps)
            return {sum, sum1 * 2.0 / z};
    }
    throw NumericalError("small-argument K series hit the 500-term cap");
}

// e^z K_mu and e^z K_{mu+1} for |mu| <= 1/2, |z| >= 2, Re z >= 0 (Steed's method).
template <class T>
std::pair<T, T> k_steed_scaled(double mu, T z) {
    T b = 2.0 * (1.0 + z);
    T d = T(1.0) / b;
    T h = d;
    T delh = d;
    T q1 = 0.0;
    T q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    T q = a1;
    double c = a1;
    double a = -a1;
    T s = 1.0 + q * delh;
    int i = 2;
    for (; i < kMaxIter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const T qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = T(1.0) / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const T dels = q * delh;
        s += dels;
        if (absval(dels) < absval(s) * kEps) break;
    }
    if (i >= kMaxIter) throw NumericalError("Steed continued fraction for K did not converge");
    h = a1 * h;
    const T kmu = std::sqrt(kPi / (2.0 * z)) / s;
    const T kmu1 = kmu * (mu + z + 0.5 - h) / z;
    return {kmu, kmu1};
}

// e^z K_nu(z) from the large-argument expansion; terms are added until they
// fall below 1e-17 of the sum or start to grow.
template <class T>
T k_asymptotic_scaled(double nu, T z) {
    const double m = 4.0 * nu * nu;
    T term = 1.0;
    T sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double f = (m - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        term *= f / z;
        const double at = absval(term);
        if (at > prev) break;
        sum += term;
        if (at <= 1e-17 * absval(sum)) break;
        prev = at;
    }
    return std::sqrt(kPi / (2.0 * z)) * sum;
}

template <class T>
BesselIKPair<T> ik_scaled_impl(double nu, T z) {
    if (!(nu >= 0.0)) throw DomainError("order must be nonnegative here");
    if (absval(z) == 0.0) throw DomainError("Bessel functions evaluated at z = 0");
    T kn, kn1;
    if (absval(z) > k_asymptotic_radius(nu)) {
        kn = k_asymptotic_scaled(nu, z);
        kn1 = k_asymptotic_scaled(nu + 1.0, z);
    } else {
        const int nl = static_cast<int>(std::floor(nu + 0.5));
        const double mu = nu - nl;
        std::pair<T, T> base;
        if (absval(z) < 2.0) {
            base = k_small_series(mu, z);
            const T ez = std::exp(z);
            base.first *= ez;
            base.second *= ez;
        } else {
            base = k_steed_scaled(mu, z);
        }
        T k0 = base.first;
        T k1 = base.second;
        for (int i = 1; i <= nl; ++i) {
            const T kt = (mu + i) * 2.0 / z * k1 + k0;
            k0 = k1;
            k1 = kt;
        }
        kn = k0;
        kn1 = k1;
    }
    const T r = i_ratio(nu, z);
    const T in = T(1.0) / (z * (kn1 + r * kn));
    return {in, r * in, kn, kn1};
}

// ---------------------------------------------------------------------------
// Half-integer closed form.

struct PsiTable {
    std::vector<PsiPolynomial> polys;
};

constexpr int kPsiTableSize = 16;

const PsiPolynomial& cached_psi(int n) {
    static const PsiTable table = [] {
        PsiTable t;
        t.polys.reserve(kPsiTableSize + 1);
        for (int k = 0; k <= kPsiTableSize; ++k) t.polys.emplace_back(k + 0.5);
        return t;
    }();
    return table.polys.at(static_cast<std::size_t>(n));
}

std::pair<cplx, cplx> k_half_integer_scaled(double nu, cplx z) {
    const int n = static_cast<int>(std::lround(nu - 0.5));
    const cplx zn = std::pow(z, nu);
    const double c = std::sqrt(kPi / 2.0);
    const cplx k = c * cached_psi(n)(z) / zn;
    const cplx k1 = c * cached_psi(n + 1)(z) / (zn * z);
    return {k, k1};
}

bool use_half_integer_form(double nu) { return is_half_integer(nu) && nu <= kPsiClosedFormMaxOrder; }

}  // namespace

// ---------------------------------------------------------------------------

CutPlanePoint::CutPlanePoint(double re, double im) : CutPlanePoint(cplx(re, im)) {}

CutPlanePoint::CutPlanePoint(cplx z) : z_(z) {
    if (z.real() == 0.0 && z.imag() == 0.0) throw DomainError("z = 0 is not in the cut plane");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("non-finite complex argument");
}

bool CutPlanePoint::near_cut(double guard) const { return std::fabs(arg()) >= kPi - guard; }

bool is_half_integer(double nu, double tol) {
    const double r = std::fmod(std::fabs(2.0 * nu), 2.0);
    return std::fabs(r - 1.0) <= tol;
}

Index::Index(double nu) : nu_(nu), half_(bhit::is_half_integer(nu)) {
    if (!std::isfinite(nu)) throw DomainError("index must be finite");
}

Index Index::snapped(double tol) const {
    const double h = std::floor(nu_) + 0.5;
    if (std::fabs(nu_ - h) <= tol) return Index(h);
    return *this;
}

// ---------------------------------------------------------------------------

PsiPolynomial::PsiPolynomial(double nu) : nu_(nu) {
    if (!is_half_integer(nu) || nu < 0.5)
        throw DomainError("psi polynomials exist for half-integer orders >= 1/2");
    const int n = static_cast<int>(std::lround(nu - 0.5));
    // psi_{k+3/2} = (2k+1) psi_{k+1/2} + z^2 psi_{k-1/2}
    std::vector<double> prev{1.0};
    std::vector<double> cur{1.0};
    std::vector<__int128> eprev{1};
    std::vector<__int128> ecur{1};
    bool exact_ok = true;
    if (n >= 1) {
        cur = {1.0, 1.0};
        ecur = {1, 1};
    }
    for (int k = 1; k < n; ++k) {
        const double f = 2.0 * k + 1.0;
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i] += f * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + 2] += prev[i];
        if (exact_ok) {
            std::vector<__int128> enext(ecur.size() + 1, 0);
            const __int128 fi = 2 * k + 1;
            for (std::size_t i = 0; i < ecur.size() && exact_ok; ++i) {
                __int128 prod;
                exact_ok = !__builtin_mul_overflow(fi, ecur[i], &prod) &&
                           !__builtin_add_overflow(enext[i], prod, &enext[i]);
            }
            for (std::size_t i = 0; i < eprev.size() && exact_ok; ++i)
                exact_ok = !__builtin_add_overflow(enext[i + 2], eprev[i], &enext[i + 2]);
            eprev = std::move(ecur);
            ecur = std::move(enext);
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    coeffs_ = std::move(cur);
    if (exact_ok) {
        exact_ = std::move(ecur);
        for (std::size_t i = 0; i < exact_.size(); ++i) coeffs_[i] = static_cast<double>(exact_[i]);
    }
}

__int128 PsiPolynomial::exact_coeff(int k) const {
    if (exact_.empty()) throw DomainError("psi coefficients beyond 128-bit range are inexact");
    return exact_.at(static_cast<std::size_t>(k));
}

double PsiPolynomial::operator()(double z) const {
    double s = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * z + *it;
    return s;
}

cplx PsiPolynomial::operator()(cplx z) const {
    cplx s = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * z + *it;
    return s;
}

cplx PsiPolynomial::derivative(cplx z) const {
    cplx s = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) s = s * z + static_cast<double>(k) * coeffs_[k];
    return s;
}

PsiPolynomial psi_polynomial(double nu) { return PsiPolynomial(nu); }

// ---------------------------------------------------------------------------

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x)) throw DomainError("Gamma has a pole at nonpositive integers");
    return std::tgamma(x);
}

namespace {

double gamma_p_series(double s, double x) {
    double ap = s;
    double del = 1.0 / s;
    double sum = del;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw NumericalError("incomplete gamma series did not converge");
}

double gamma_q_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double gamma_p(double s, double x) {
    if (!(s > 0.0) || x < 0.0) throw DomainError("gamma_p requires s > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_fraction(s, x);
}

double gamma_q(double s, double x) {
    if (!(s > 0.0) || x < 0.0) throw DomainError("gamma_q requires s > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_fraction(s, x);
}

double erfcx(double x) {
    if (x < 0.0) {
        const double p = x * x;
        const double e = std::fma(x, x, -p);
        return 2.0 * std::exp(p) * (1.0 + e) - erfcx(-x);
    }
    if (x < 26.0) {
        const double p = x * x;
        const double e = std::fma(x, x, -p);
        return std::exp(p) * (1.0 + e) * std::erfc(x);
    }
    // 1/(x sqrt(pi)) sum (-1)^k (2k-1)!! / (2x^2)^k
    const double r = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        term *= -(2.0 * k - 1.0) * r;
        sum += term;
        if (std::fabs(term) < 1e-17) break;
    }
    return sum / (x * std::sqrt(kPi));
}

// ---------------------------------------------------------------------------

double k_asymptotic_radius(double nu) { return std::max(18.0, 0.75 * nu * nu + 10.0); }

BesselIKPair<double> bessel_ik_scaled(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("real Bessel functions need x > 0");
    return ik_scaled_impl<double>(nu, x);
}

BesselIKPair<cplx> bessel_ik_scaled(double nu, cplx z) {
    if (z.real() < 0.0) throw DomainError("scaled pair requires Re z >= 0");
    return ik_scaled_impl<cplx>(nu, z);
}

namespace {

bool is_integer(double v) { return v == std::floor(v); }

}  // namespace

double bessel_i_scaled(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("bessel_i requires x > 0");
    if (nu >= 0.0 || is_integer(nu)) return ik_scaled_impl<double>(std::fabs(nu), x).i;
    const double mu = -nu;
    const auto p = ik_scaled_impl<double>(mu, x);
    return p.i + (2.0 / kPi) * std::sin(mu * kPi) * p.k * std::exp(-2.0 * x);
}

double bessel_i(double nu, double x) {
    const double v = bessel_i_scaled(nu, x) * std::exp(x);
    if (!std::isfinite(v)) throw NumericalError("I_nu(x) overflows; use bessel_i_scaled");
    return v;
}

double bessel_k_scaled(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k requires x > 0");
    return ik_scaled_impl<double>(std::fabs(nu), x).k;
}

double bessel_k_real(double nu, double x) {
    const double v = bessel_k_scaled(nu, x) * std::exp(-x);
    if (v == 0.0 || !std::isfinite(v)) throw NumericalError("K_nu(x) out of range; use bessel_k_scaled");
    return v;
}

std::pair<cplx, cplx> bessel_k_pair_scaled(double nu, CutPlanePoint zp) {
    nu = std::fabs(nu);
    if (use_half_integer_form(nu)) return k_half_integer_scaled(nu, zp.value());
    // Half-integer orders are z^{-nu} times an entire function; on the cut the
    // upper-side limit is the principal value.
    if (zp.value().real() < 0.0 && zp.near_cut() && !is_half_integer(nu))
        throw DomainError("argument too close to the branch cut of K_nu");
    return detail::k_pair_scaled_general(nu, zp.value());
}

std::pair<cplx, cplx> detail::k_pair_scaled_general(double nu, cplx z) {
    if (z.real() >= 0.0) {
        const auto p = ik_scaled_impl<cplx>(nu, z);
        return {p.k, p.k_next};
    }
    if (z.imag() == 0.0 && !is_half_integer(nu))
        throw DomainError("K_nu is discontinuous on the negative real axis");
    if (std::abs(z) > k_asymptotic_radius(nu + 1.0))
        return {k_asymptotic_scaled<cplx>(nu, z), k_asymptotic_scaled<cplx>(nu + 1.0, z)};
    // K(z) = e^{-+i pi nu} K(-z) -+ i pi I(-z) for +-Im z > 0
    const cplx w = -z;
    const auto p = ik_scaled_impl<cplx>(nu, w);
    const double sgn = z.imag() >= 0.0 ? 1.0 : -1.0;
    const cplx rot = std::polar(1.0, -sgn * kPi * nu);
    const cplx e2z = std::exp(2.0 * z);
    const cplx ipi(0.0, sgn * kPi);
    const cplx k = rot * e2z * p.k - ipi * p.i;
    const cplx k1 = -rot * e2z * p.k_next - ipi * p.i_next;
    return {k, k1};
}

cplx bessel_k_complex_scaled(double nu, CutPlanePoint z) { return bessel_k_pair_scaled(nu, z).first; }

cplx bessel_k_complex(double nu, CutPlanePoint z) {
    return bessel_k_pair_scaled(nu, z).first * std::exp(-z.value());
}

cplx bessel_k_deriv(double nu, CutPlanePoint zp) {
    nu = std::fabs(nu);
    const cplx z = zp.value();
    const auto p = bessel_k_pair_scaled(nu, zp);
    return (nu / z * p.first - p.second) * std::exp(-z);
}

cplx bessel_i_complex_scaled(double nu, cplx z) {
    if (z.real() < 0.0) throw DomainError("scaled I requires Re z >= 0");
    if (nu >= 0.0 || is_integer(nu)) return ik_scaled_impl<cplx>(std::fabs(nu), z).i;
    const double mu = -nu;
    const auto p = ik_scaled_impl<cplx>(mu, z);
    return p.i + (2.0 / kPi) * std::sin(mu * kPi) * p.k * std::exp(-2.0 * z);
}

cplx bessel_i_complex(double nu, CutPlanePoint zp) {
    const cplx z = zp.value();
    if (z.real() >= 0.0) return bessel_i_complex_scaled(nu, z) * std::exp(z);
    // I_nu(w e^{+-i pi}) = e^{+-i pi nu} I_nu(w)
    const double sgn = z.imag() < 0.0 ? -1.0 : 1.0;
    const cplx w = -z;
    return std::polar(1.0, sgn * kPi * nu) * bessel_i_complex_scaled(nu, w) * std::exp(w);
}

// ---------------------------------------------------------------------------
// Bessel functions of the first and second kind.

namespace {

double j_asymptotic_radius(double nu) { return std::max(25.0, 0.75 * nu * nu + 10.0); }

// Hankel expansion: J = sqrt(2/pi x)(P cos chi - Q sin chi), Y = sqrt(2/pi x)(P sin chi + Q cos chi).
std::pair<double, double> jy_asymptotic(double nu, double x) {
    const double m = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        term *= (m - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        const double at = std::fabs(term);
        if (at > prev) break;
        // sign pattern: k = 1 -> +Q, 2 -> -P, 3 -> -Q, 4 -> +P, ...
        const int r = k % 4;
        if (r == 1) q += term;
        else if (r == 2) p -= term;
        else if (r == 3) q -= term;
        else p += term;
        if (at < 1e-17) break;
        prev = at;
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    const double s = std::sqrt(2.0 / (kPi * x));
    const double c = std::cos(chi);
    const double sn = std::sin(chi);
    return {s * (p * c - q * sn), s * (p * sn + q * c)};
}

BesselJY jy_recurrence(double xnu, double x) {
    constexpr double kXMin = 2.0;
    const int nl = x < kXMin ? static_cast<int>(xnu + 0.5) : std::max(0, static_cast<int>(xnu - x + 1.5));
    const double xmu = xnu - nl;
    const double xmu2 = xmu * xmu;
    const double xi = 1.0 / x;
    const double xi2 = 2.0 * xi;
    const double w = xi2 / kPi;
    int isign = 1;
    double h = xnu * xi;
    if (h < kTiny) h = kTiny;
    double b = xi2 * xnu;
    double d = 0.0;
    double c = h;
    int i = 1;
    for (; i < kMaxIter; ++i) {
        b += xi2;
        d = b - d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b - 1.0 / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = c * d;
        h = del * h;
        if (d < 0.0) isign = -isign;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    if (i >= kMaxIter) throw NumericalError("continued fraction for J'/J did not converge");
    double rjl = isign * 1e-30;
    double rjpl = h * rjl;
    const double rjl1 = rjl;
    const double rjp1 = rjpl;
    double fact = xnu * xi;
    for (int l = nl; l >= 1; --l) {
        const double rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if (rjl == 0.0) rjl = kEps;
    const double f = rjpl / rjl;
    double rjmu, rymu, rymup, ry1;
    if (x < kXMin) {
        const double x2 = 0.5 * x;
        const double pimu = kPi * xmu;
        const double fct = std::fabs(pimu) < 1e-4 ? 1.0 + pimu * pimu / 6.0 : pimu / std::sin(pimu);
        double dd = -std::log(x2);
        double e = xmu * dd;
        const double fact2 = sinh_over(e);
        const TemmeGammas g = temme_gammas(xmu);
        double ff = 2.0 / kPi * fct * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * dd);
        e = std::exp(e);
        double p = e / (g.gampl * kPi);
        double q = 1.0 / (e * kPi * g.gammi);
        const double pimu2 = 0.5 * pimu;
        const double fact3 = std::fabs(pimu2) < 1e-4 ? 1.0 - pimu2 * pimu2 / 6.0 : std::sin(pimu2) / pimu2;
        const double r = kPi * pimu2 * fact3 * fact3;
        double cc = 1.0;
        dd = -x2 * x2;
        double sum = ff + r * q;
        double sum1 = p;
        int k = 1;
        for (; k <= 500; ++k) {
            ff = (k * ff + p + q) / (k * k - xmu2);
            cc *= dd / k;
            p /= (k - xmu);
            q /= (k + xmu);
            const double del = cc * (ff + r * q);
            sum += del;
            const double del1 = cc * p - k * del;
            sum1 += del1;
            if (std::fabs(del) < (1.0 + std::fabs(sum)) * kEps) break;
        }
        if (k > 500) throw NumericalError("Y series hit the 500-term cap");
        rymu = -sum;
        ry1 = -sum1 * xi2;
        rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        double a = 0.25 - xmu2;
        double p = -0.5 * xi;
        double q = 1.0;
        const double br = 2.0 * x;
        double bi = 2.0;
        double fct = a * xi / (p * p + q * q);
        double cr = br + q * fct;
        double ci = bi + p * fct;
        double den = br * br + bi * bi;
        double dr = br / den;
        double di = -bi / den;
        double dlr = cr * dr - ci * di;
        double dli = cr * di + ci * dr;
        double temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        int k = 2;
        for (; k < kMaxIter; ++k) {
            a += 2 * (k - 1);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if (std::fabs(dr) + std::fabs(di) < kTiny) dr = kTiny;
            fct = a / (cr * cr + ci * ci);
            cr = br + cr * fct;
            ci = bi - ci * fct;
            if (std::fabs(cr) + std::fabs(ci) < kTiny) cr = kTiny;
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (std::fabs(dlr - 1.0) + std::fabs(dli) < kEps) break;
        }
        if (k >= kMaxIter) throw NumericalError("Hankel continued fraction did not converge");
        const double gam = (p - f) / q;
        rjmu = std::sqrt(w / ((p - f) * gam + q));
        rjmu = std::copysign(rjmu, rjl);
        rymu = rjmu * gam;
        rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }
    const double scale = rjmu / rjl;
    BesselJY out{};
    out.j = rjl1 * scale;
    out.jp = rjp1 * scale;
    for (int k = 1; k <= nl; ++k) {
        const double rytemp = (xmu + k) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    out.y = rymu;
    out.yp = xnu * xi * rymu - ry1;
    return out;
}

}  // namespace

BesselJY bessel_jy(double nu, double x) {
    if (!(x > 0.0) || nu < 0.0) throw DomainError("bessel_jy requires nu >= 0 and x > 0");
    if (x > j_asymptotic_radius(nu + 1.0)) {
        const auto [j0, y0] = jy_asymptotic(nu, x);
        const auto [j1, y1] = jy_asymptotic(nu + 1.0, x);
        return {j0, y0, nu / x * j0 - j1, nu / x * y0 - y1};
    }
    if (x >= std::max(25.0, 2.0 * (nu + 1.0))) {
        // Hankel at the fractional order, then upward recurrence; stable for both
        // solutions while the order stays below x.
        const int steps = static_cast<int>(nu);
        double mu = nu - steps;
        auto [j0, y0] = jy_asymptotic(mu, x);
        auto [j1, y1] = jy_asymptotic(mu + 1.0, x);
        for (int s = 0; s < steps; ++s) {
            mu += 1.0;
            const double j2 = 2.0 * mu / x * j1 - j0, y2 = 2.0 * mu / x * y1 - y0;
            j0 = j1;
            y0 = y1;
            j1 = j2;
            y1 = y2;
        }
        return {j0, y0, nu / x * j0 - j1, nu / x * y0 - y1};
    }
    return jy_recurrence(nu, x);
}

std::pair<double, double> bessel_j_pair(double nu, double x) {
    if (!(nu > -1.0)) throw DomainError("bessel_j requires nu > -1");
    if (!(x > 0.0)) throw DomainError("bessel_j requires x > 0");
    if (nu >= 0.0) {
        const BesselJY r = bessel_jy(nu, x);
        return {r.j, nu / x * r.j - r.jp};
    }
    // J_{-mu} = cos(mu pi) J_mu - sin(mu pi) Y_mu
    const double mu = -nu;
    const BesselJY r = bessel_jy(mu, x);
    const double jm = std::cos(mu * kPi) * r.j - std::sin(mu * kPi) * r.y;
    const BesselJY r1 = bessel_jy(1.0 - mu, x);
    return {jm, r1.j};
}

double bessel_j(double nu, double x) { return bessel_j_pair(nu, x).first; }

}  // namespace bhit
