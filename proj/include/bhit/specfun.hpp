#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhit {

using cplx = std::complex<double>;

/// Raised when inputs violate a mathematical precondition (pole, regime, cut).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an algorithm exhausts its iteration or accuracy budget.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Angular half-width of the guard band around the negative real axis.
inline constexpr double kCutGuard = 1e-3;

/// A point of the cut plane: nonzero, with the principal argument in (-pi, pi].
/// Points on the negative real axis are representable; whether they are
/// acceptable depends on the order of the function being evaluated.
class CutPlanePoint {
public:
    CutPlanePoint(double re, double im);
    CutPlanePoint(cplx z);  // NOLINT(google-explicit-constructor)

    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }
    cplx value() const { return z_; }
    operator cplx() const { return z_; }  // NOLINT(google-explicit-constructor)

    double arg() const { return std::arg(z_); }
    /// True when |arg z| >= pi - guard.
    bool near_cut(double guard = kCutGuard) const;

private:
    cplx z_;
};

/// Real Bessel index with its classification.
class Index {
public:
    explicit Index(double nu);

    double nu() const { return nu_; }
    double abs_nu() const { return nu_ < 0 ? -nu_ : nu_; }
    /// 2nu is an odd integer, tested with absolute tolerance 1e-12 on 2nu mod 2.
    bool is_half_integer() const { return half_; }
    /// Nearest half-integer when within `tol`, otherwise nu itself.
    Index snapped(double tol = 1e-9) const;

private:
    double nu_;
    bool half_;
};

bool is_half_integer(double nu, double tol = 1e-12);

/// Reverse Bessel polynomial with z^nu K_nu(z) = sqrt(pi/2) e^{-z} psi_nu(z).
/// Coefficients are ascending; they are exact integers up to nu = 57/2,
/// the largest order whose coefficients fit in a signed 128-bit integer.
class PsiPolynomial {
public:
    explicit PsiPolynomial(double nu);

    double order() const { return nu_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    bool exact() const { return !exact_.empty(); }
    /// Exact coefficient k; requires exact().
    __int128 exact_coeff(int k) const;

    double operator()(double z) const;
    cplx operator()(cplx z) const;
    cplx derivative(cplx z) const;

private:
    double nu_;
    std::vector<double> coeffs_;
    std::vector<__int128> exact_;
};

PsiPolynomial psi_polynomial(double nu);

/// Largest half-integer order whose psi coefficients are stored exactly.
inline constexpr double kPsiExactMaxOrder = 28.5;

double gamma_fn(double x);
/// Regularized lower incomplete gamma P(s, x).
double gamma_p(double s, double x);
/// Regularized upper incomplete gamma Q(s, x).
double gamma_q(double s, double x);
/// e^{x^2} erfc(x).
double erfcx(double x);

// Real-argument modified Bessel functions; x > 0, any real order.
double bessel_i(double nu, double x);
/// e^{-x} I_nu(x).
double bessel_i_scaled(double nu, double x);
double bessel_k_real(double nu, double x);
/// e^{x} K_nu(x).
double bessel_k_scaled(double nu, double x);

/// Scaled pair values at order nu >= 0 and nu + 1.
template <class T>
struct BesselIKPair {
    T i;       // e^{-z} I_nu(z)
    T i_next;  // e^{-z} I_{nu+1}(z)
    T k;       // e^{z} K_nu(z)
    T k_next;  // e^{z} K_{nu+1}(z)
};

/// Scaled I and K at orders nu and nu+1 for nu >= 0, x > 0.
BesselIKPair<double> bessel_ik_scaled(double nu, double x);
/// Scaled I and K at orders nu and nu+1 for nu >= 0, Re z >= 0, z != 0.
BesselIKPair<cplx> bessel_ik_scaled(double nu, cplx z);

/// Principal-branch K_nu(z); nu is replaced by |nu|.
cplx bessel_k_complex(double nu, CutPlanePoint z);
/// e^{z} K_nu(z).
cplx bessel_k_complex_scaled(double nu, CutPlanePoint z);
/// K_nu(z) and K_{nu+1}(z), both multiplied by e^{z}; nu >= 0.
std::pair<cplx, cplx> bessel_k_pair_scaled(double nu, CutPlanePoint z);
/// K_nu'(z) = (nu/z) K_nu(z) - K_{nu+1}(z).
cplx bessel_k_deriv(double nu, CutPlanePoint z);

/// Principal-branch I_nu(z) for real nu (negative orders allowed).
cplx bessel_i_complex(double nu, CutPlanePoint z);
/// e^{-z} I_nu(z) for Re z >= 0.
cplx bessel_i_complex_scaled(double nu, cplx z);

/// J_nu(x) for nu > -1, x > 0.
double bessel_j(double nu, double x);

struct BesselJY {
    double j, y, jp, yp;
};
/// J, Y and their derivatives for nu >= 0, x > 0.
BesselJY bessel_jy(double nu, double x);

/// J_nu(x) and J_{nu+1}(x) for nu > -1, x > 0.
std::pair<double, double> bessel_j_pair(double nu, double x);

/// Switch radius between the recurrence path and the large-argument expansion.
double k_asymptotic_radius(double nu);

/// Largest half-integer order evaluated through psi polynomials; beyond it the
/// monomial form loses too much accuracy in the left half-plane.
inline constexpr double kPsiClosedFormMaxOrder = 12.5;

namespace detail {
/// e^{z}K_nu(z), e^{z}K_{nu+1}(z) through recurrence, expansion or continuation,
/// never the psi closed form. nu >= 0; z off the guard band when Re z < 0.
std::pair<cplx, cplx> k_pair_scaled_general(double nu, cplx z);
}  // namespace detail

}  // namespace bhit
