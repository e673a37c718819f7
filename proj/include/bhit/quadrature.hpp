#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

namespace bhit::quad {

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 2000;
};

template <class T>
struct Result {
    T value{};
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double mag(double v) { return std::fabs(v); }
inline double mag(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// One 15-point Kronrod panel with the 7-point Gauss error estimate.
template <class T, class F>
Segment<T> panel(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T rk = fc * wgk[7];
    T rg = fc * wg[3];
    double resabs = mag(fc) * wgk[7];
    T fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
        rk += (fv1[j] + fv2[j]) * wgk[j];
        resabs += (mag(fv1[j]) + mag(fv2[j])) * wgk[j];
        if (j % 2 == 1) rg += (fv1[j] + fv2[j]) * wg[j / 2];
    }
    const T mean = rk * 0.5;
    double resasc = wgk[7] * mag(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (mag(fv1[j] - mean) + mag(fv2[j] - mean));
    const double ah = std::fabs(h);
    resasc *= ah;
    resabs *= ah;
    double err = mag((rk - rg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
        err = std::max(err, floor);
    return {a, b, rk * h, err};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval.
/// T is double or std::complex<double>.
template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
    Result<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment<T>> heap;
    auto first = detail::panel<T>(f, a, b);
    heap.push(first);
    T total = first.value;
    double err = first.error;
    int intervals = 1;
    out.evaluations = 15;
    while (true) {
        const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::mag(total));
        if (err <= tol) {
            out.converged = true;
            break;
        }
        if (intervals >= opt.max_intervals) break;
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
        heap.pop();
        auto left = detail::panel<T>(f, worst.a, mid);
        auto right = detail::panel<T>(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Recompute from the pieces to shed accumulated update roundoff.
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    out.value = sum;
    out.abs_error = esum;
    return out;
}

/// Sum of integrate() over consecutive breakpoints.
template <class T, class F>
Result<T> integrate_pieces(F&& f, const std::vector<double>& points, const Options& opt = {}) {
    Result<T> out;
    out.converged = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        auto r = integrate<T>(f, points[i], points[i + 1], opt);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    }
    return out;
}

}  // namespace bhit::quad
