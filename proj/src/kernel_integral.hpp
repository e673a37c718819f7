#pragma once

#include <cmath>
#include <limits>

#include "bhit/hitting.hpp"
#include "bhit/quadrature.hpp"

namespace bhit::detail {

/// Limit of L_{mu,c}(x) / x^{2mu} as x -> 0 for mu > 0.
double l_kernel_small_x_coeff(double mu, double c);

/// L_{mu,c}(x) for x below 1e-100, given log x, from the leading small-argument
/// forms of I_{+-mu}; the neglected terms are O(x^2) relative. Valid for mu < 1/2.
double l_kernel_tiny_x(double mu, double c, double log_x);

/// int_0^X D(x) x^{-power} g(x) dx with D the damped kernel L_{mu,c}(x) e^{-(c-1)x}
/// and X the truncation point of `spec`. The integrand behaves like
/// x^{2mu - power} at the origin, which must exceed -1 (or equal -1 with
/// mu = 0, where D carries a 1/log^2 factor). [0, x1] is mapped so that the
/// transformed integrand is bounded, [x1, 1] is integrated in log x.
template <class T, class G>
quad::Result<T> kernel_integral(double mu, double c, double power, double x1, G&& g, const QuadratureSpec& spec) {
    quad::Result<T> total;
    total.converged = true;
    if (is_half_integer(mu)) return total;
    const double X = spec.truncation_point();
    x1 = std::min(x1, 0.5);
    const double e = 2.0 * mu - power;
    quad::Options opt;
    opt.rel_tol = spec.rel_tol;
    opt.abs_tol = spec.abs_tol / 4.0;
    opt.max_intervals = spec.max_subdivisions;

    auto add = [&total](const quad::Result<T>& r) {
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evaluations += r.evaluations;
        total.converged = total.converged && r.converged;
    };

    if (mu < 0.02 && power == 1.0) {
        // x = exp(-1/y): D(x) x^{-1} dx = D(x) / y^2 dy, and D ~ log c * y^2 at mu = 0.
        const double y1 = -1.0 / std::log(x1);
        auto f = [&](double y) -> T {
            const double x = std::exp(-1.0 / y);
            if (!(x > 1e-100)) return T(l_kernel_tiny_x(mu, c, -1.0 / y) / (y * y)) * g(x);
            return l_kernel_damped(mu, c, x) * std::pow(x, 1.0 - power) / (y * y) * g(x);
        };
        add(quad::integrate<T>(f, 0.0, y1, opt));
    } else if (e < 1.0) {
        // x = y^{1/(1+e)}: x^{-power} D(x) dx = D(x) x^{-2mu} / (1+e) dy.
        const double p = 1.0 + e;
        const double y1 = std::pow(x1, p);
        const double lead = l_kernel_small_x_coeff(mu, c);
        auto f = [&](double y) -> T {
            const double x = std::pow(y, 1.0 / p);
            if (!(x > 1e-250)) return T(lead / p) * g(0.0);
            return l_kernel_damped(mu, c, x) * std::pow(x, -2.0 * mu) / p * g(x);
        };
        add(quad::integrate<T>(f, 0.0, y1, opt));
    } else {
        auto f = [&](double x) -> T { return l_kernel_damped(mu, c, x) * std::pow(x, -power) * g(x); };
        add(quad::integrate<T>(f, 0.0, x1, opt));
    }

    auto flog = [&](double s) -> T {
        const double x = std::exp(s);
        return l_kernel_damped(mu, c, x) * std::pow(x, 1.0 - power) * g(x);
    };
    add(quad::integrate<T>(flog, std::log(x1), 0.0, opt));

    auto fplain = [&](double x) -> T { return l_kernel_damped(mu, c, x) * std::pow(x, -power) * g(x); };
    add(quad::integrate_pieces<T>(fplain, {1.0, std::min(4.0, X), X}, opt));
    return total;
}

}  // namespace bhit::detail
