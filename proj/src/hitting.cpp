#include "bhit/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "bhit/quadrature.hpp"
#include "kernel_integral.hpp"

namespace bhit {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::FromOrigin: return "from-origin";
        case Regime::Inward: return "inward";
        case Regime::ToOrigin: return "to-origin";
        case Regime::Outward: return "outward";
    }
    return "unknown";
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

HittingQuery::HittingQuery(double a, double b, double nu) : a_(a), b_(b), nu_(Index(nu).snapped()) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(nu))
        throw DomainError("a, b and nu must be finite");
    if (a < 0.0 || b < 0.0) throw DomainError("a and b must be nonnegative: the process lives on [0, inf)");
    if (a == 0.0 && b == 0.0) throw DomainError("a=0 and b=0: the hitting time is identically zero and undefined as a regime");
    const double v = nu_.nu();
    if (a == 0.0) {
        if (!(v > -1.0))
            throw DomainError("a=0 requires ν>−1: origin is not an entrance boundary for ν≤−1 (got ν=" + fmt(v) + ")");
        regime_ = Regime::FromOrigin;
    } else if (b == 0.0) {
        if (!(v < 0.0))
            throw DomainError("b=0 requires ν<0: the origin is never reached for ν≥0 (got ν=" + fmt(v) + ")");
        regime_ = Regime::ToOrigin;
    } else if (a <= b) {
        regime_ = Regime::Inward;
    } else {
        regime_ = Regime::Outward;
    }
}

double HittingQuery::alpha() const {
    if (!(b_ > 0.0)) throw DomainError("a/b needs b > 0");
    return a_ / b_;
}

double HittingQuery::total_mass() const {
    if (trivial()) return 1.0;
    const double v = nu_.nu();
    switch (regime_) {
        case Regime::FromOrigin:
        case Regime::ToOrigin: return 1.0;
        case Regime::Inward: return v > -1.0 ? 1.0 : std::pow(b_ / a_, 2.0 * v);
        case Regime::Outward: return v <= 0.0 ? 1.0 : std::pow(b_ / a_, 2.0 * v);
    }
    return 1.0;
}

double QuadratureSpec::truncation_point() const {
    validate();
    const double d = x_truncation_decay;
    return std::max(2.0, std::log(kPi / (d * abs_tol)) / d);
}

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
    if (!(x_truncation_decay > 0.0) || x_truncation_decay > 2.0)
        throw DomainError("x_truncation_decay must lie in (0, 2], the kernel's guaranteed decay rate");
    if (max_subdivisions < 1) throw DomainError("max_subdivisions must be positive");
}

// ---------------------------------------------------------------------------
// Laplace transforms.

namespace {

double i_scaled(double nu, double x) { return bessel_i_scaled(nu, x); }
cplx i_scaled(double nu, cplx z) { return bessel_i_complex_scaled(nu, z); }
double k_scaled(double nu, double x) { return bessel_k_scaled(nu, x); }
cplx k_scaled(double nu, cplx z) { return bessel_ik_scaled(std::fabs(nu), z).k; }

double principal_sqrt2(double lambda) { return std::sqrt(2.0 * lambda); }
cplx principal_sqrt2(cplx lambda) { return std::sqrt(2.0 * lambda); }

template <class T>
T laplace_impl(const HittingQuery& q, T lambda) {
    if (q.trivial()) return T(1.0);
    const T s = principal_sqrt2(lambda);
    const double a = q.a();
    const double b = q.b();
    const double v = q.nu().nu();
    const double mu = q.nu().abs_nu();
    switch (q.regime()) {
        case Regime::FromOrigin: {
            const T x = b * s;
            return std::pow(x / 2.0, v) * std::exp(-x) / (gamma_fn(v + 1.0) * i_scaled(v, x));
        }
        case Regime::Inward: {
            const double order = v > -1.0 ? v : -v;
            return std::pow(b / a, v) * i_scaled(order, a * s) / i_scaled(order, b * s) * std::exp((a - b) * s);
        }
        case Regime::ToOrigin: {
            const T x = a * s;
            return std::pow(2.0, v + 1.0) * std::pow(x, mu) * k_scaled(mu, x) * std::exp(-x) / gamma_fn(mu);
        }
        case Regime::Outward:
            return std::pow(b / a, v) * k_scaled(mu, a * s) / k_scaled(mu, b * s) * std::exp(-(a - b) * s);
    }
    return T(0.0);
}

}  // namespace

double laplace_hitting(const HittingQuery& q, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("laplace_hitting needs finite lambda > 0");
    return laplace_impl<double>(q, lambda);
}

cplx laplace_hitting(const HittingQuery& q, cplx lambda) {
    if (lambda == cplx(0.0, 0.0)) throw DomainError("laplace_hitting needs lambda != 0");
    if (lambda.imag() == 0.0 && lambda.real() < 0.0)
        throw DomainError("laplace_hitting is continued off the negative real axis only");
    return laplace_impl<cplx>(q, lambda);
}

// ---------------------------------------------------------------------------
// Kernel.

double l_kernel_damped(double mu, double c, double x) {
    if (!(mu >= 0.0)) throw DomainError("l_kernel needs mu >= 0");
    if (!(c > 1.0)) throw DomainError("l_kernel needs c > 1");
    if (!(x > 0.0)) throw DomainError("l_kernel needs x > 0");
    if (is_half_integer(mu)) return 0.0;
    const auto p = bessel_ik_scaled(mu, x);
    const auto pc = bessel_ik_scaled(mu, c * x);
    const double e2 = std::exp(-2.0 * x);
    const double num = std::cos(kPi * mu) * (pc.i * p.k * e2 - p.i * pc.k * std::exp(-2.0 * c * x));
    const double ke = p.k * e2;
    const double den = ke * ke + kPi * kPi * p.i * p.i + 2.0 * kPi * std::sin(kPi * mu) * ke * p.i;
    if (!(den > 0.0)) throw NumericalError("L-kernel denominator lost positivity");
    return num / den;
}

double l_kernel(double mu, double c, double x) {
    const double d = l_kernel_damped(mu, c, x);
    if (d == 0.0) return 0.0;
    return d * std::exp((c - 1.0) * x);
}

double detail::l_kernel_small_x_coeff(double mu, double c) {
    if (mu == 0.0) return 0.0;
    return std::cos(kPi * mu) * std::pow(c, mu) * (1.0 - std::pow(c, -2.0 * mu)) /
           (std::pow(2.0, 2.0 * mu - 1.0) * gamma_fn(mu) * gamma_fn(mu + 1.0));
}

double detail::l_kernel_tiny_x(double mu, double c, double log_x) {
    if (is_half_integer(mu)) return 0.0;
    constexpr double kEulerGamma = 0.57721566490153286061;
    const double lc = std::log(c);
    double ix, icx, kx, kcx;
    if (mu == 0.0) {
        ix = icx = 1.0;
        kx = std::log(2.0) - log_x - kEulerGamma;
        kcx = kx - lc;
    } else {
        // I_{+-mu}(x) ~ (x/2)^{+-mu} / Gamma(1 +- mu); K_mu = pi (I_{-mu} - I_mu) / (2 sin(pi mu)).
        const double l2 = log_x - std::log(2.0);
        if (mu * -l2 > 600.0) return 0.0;
        const double gp = std::tgamma(1.0 + mu);
        const double gm = std::tgamma(1.0 - mu);
        const double s = 2.0 * std::sin(kPi * mu) / kPi;
        ix = std::exp(mu * l2) / gp;
        icx = std::exp(mu * (l2 + lc)) / gp;
        kx = (std::exp(-mu * l2) / gm - ix) / s;
        kcx = (std::exp(-mu * (l2 + lc)) / gm - icx) / s;
    }
    const double num = std::cos(kPi * mu) * (icx * kx - ix * kcx);
    const double den = kx * kx + kPi * kPi * ix * ix + 2.0 * kPi * std::sin(kPi * mu) * kx * ix;
    return num / den;
}

// ---------------------------------------------------------------------------
// Ratio decomposition.

cplx ratio_decomposition(const Index& nu_in, double c, CutPlanePoint wp, const QuadratureSpec& spec) {
    if (!(c > 1.0)) throw DomainError("ratio_decomposition needs c > 1");
    spec.validate();
    const Index nu = nu_in.snapped();
    const double mu = nu.abs_nu();
    const cplx w = wp.value();
    const cplx damp = std::exp(-(c - 1.0) * w);
    cplx out = damp / std::pow(c, mu);

    const auto zs = cached_k_zeros(mu);
    if (zs->count() > 0) {
        const auto weights = zs->residue_weights(c);
        cplx sum = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j) {
            const cplx z = zs->zeros()[j];
            if (std::abs(w - z) <= 1e-12 * std::abs(z)) throw DomainError("w is a zero of K_nu");
            sum += w * weights[j] * std::exp((c - 1.0) * z) / (w - z);
        }
        out -= damp * sum;
    }
    if (!nu.is_half_integer()) {
        const double x1 = std::min(0.5, std::abs(w));
        auto g = [w](double x) { return w / (x + w); };
        const auto r = detail::kernel_integral<cplx>(mu, c, 1.0, x1, g, spec);
        if (!r.converged) throw NumericalError("ratio decomposition kernel integral did not converge");
        out -= damp * r.value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eigenfunction series.

namespace {

// J zero tables shared across calls; the lock is held while a series reads them.
struct JTableCache {
    std::mutex mtx;
    std::map<double, std::unique_ptr<JZeroTable>> tables;
    JZeroTable& get(double nu) {
        auto& p = tables[nu];
        if (!p) p = std::make_unique<JZeroTable>(nu);
        return *p;
    }
};

JTableCache& j_cache() {
    static JTableCache cache;
    return cache;
}

struct SeriesSum {
    double sum = 0.0;
    double tail = 0.0;
    double abs_sum = 0.0;
    int terms = 0;
    bool truncated = false;
};

// sum_k term(k, j_k, J_{order+1}(j_k)) with a geometric tail bound built from
// `envelope(j)`, an upper bound on |term| at zero j.
template <class Term, class Env>
SeriesSum kent_sum(double order, double t, double b, const SeriesOptions& opt, int fixed_terms, Term term,
                   Env envelope) {
    auto& cache = j_cache();
    std::lock_guard<std::mutex> lock(cache.mtx);
    JZeroTable& table = cache.get(order);
    SeriesSum s;
    const double rate = t / (2.0 * b * b);
    const int cap = fixed_terms > 0 ? fixed_terms : opt.max_terms;
    for (int k = 1; k <= cap; ++k) {
        const double j = table.zero(k);
        const double v = term(j, table.j_next_at(k));
        s.sum += v;
        s.abs_sum += std::fabs(v);
        s.terms = k;
        if (fixed_terms > 0) continue;
        const double jn = j + kPi;
        const double env = envelope(j);
        const double r = envelope(jn) / env;
        if (env == 0.0) {
            s.tail = 0.0;
            return s;
        }
        if (r < 1.0) {
            const double bound = env * r / (1.0 - r);
            if (bound < opt.abs_tol || (k > 1 && j * j * rate > 745.0)) {
                s.tail = bound;
                return s;
            }
        }
    }
    if (fixed_terms > 0) {
        const double j = table.zero(cap);
        const double env = envelope(j + kPi);
        const double r = envelope(j + 2.0 * kPi) / std::max(env, std::numeric_limits<double>::min());
        s.tail = r < 1.0 ? env / (1.0 - r) : std::numeric_limits<double>::infinity();
        return s;
    }
    s.truncated = true;
    const double j = table.zero(cap);
    const double env = envelope(j);
    const double r = envelope(j + kPi) / std::max(env, std::numeric_limits<double>::min());
    s.tail = r < 1.0 ? env * r / (1.0 - r) : std::numeric_limits<double>::infinity();
    return s;
}

constexpr double kRound = 4e-16;

}  // namespace

namespace {

SeriesEstimate from_origin_impl(const HittingQuery& q, double t, const SeriesOptions& opt, int fixed) {
    if (q.regime() != Regime::FromOrigin) throw DomainError("series_from_origin needs a=0<b");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and positive");
    const double v = q.nu().nu();
    const double b = q.b();
    const double rate = t / (2.0 * b * b);
    const double log_pref = -(v - 1.0) * std::log(2.0) - std::lgamma(v + 1.0);
    auto term = [&](double j, double jn) { return std::exp(log_pref + (v - 1.0) * std::log(j) - j * j * rate) / jn; };
    // |J_{nu+1}(j)| >= sqrt(2/(pi j)) / 2 on the zeros of J_nu is a safe envelope.
    auto env = [&](double j) {
        return 2.0 * std::sqrt(kPi / 2.0) * std::exp(log_pref + (v - 0.5) * std::log(j) - j * j * rate);
    };
    const SeriesSum s = kent_sum(v, t, b, opt, fixed, term, env);
    SeriesEstimate e;
    e.survival = s.sum;
    e.cdf = 1.0 - s.sum;
    e.error = s.tail + kRound * (s.abs_sum + 1.0);
    e.terms = s.terms;
    e.truncated = s.truncated;
    return e;
}

}  // namespace

SeriesEstimate series_from_origin(const HittingQuery& q, double t, const SeriesOptions& opt) {
    return from_origin_impl(q, t, opt, 0);
}

SeriesEstimate series_inward(const HittingQuery& q, double t, const SeriesOptions& opt) {
    if (q.regime() != Regime::Inward) throw DomainError("series_inward needs 0<a<=b");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and positive");
    SeriesEstimate e;
    if (q.trivial()) {
        e.cdf = 1.0;
        return e;
    }
    const double v = q.nu().nu();
    const double order = v > -1.0 ? v : -v;
    const double a = q.a();
    const double b = q.b();
    const double ratio = a / b;
    const double rate = t / (2.0 * b * b);
    const double pref = 2.0 * std::pow(b / a, v);
    auto term = [&](double j, double jn) { return pref * bessel_j(order, ratio * j) / (j * jn) * std::exp(-j * j * rate); };
    // |J_order(x)| <= 1 and |J_{order+1}(j)| >= sqrt(2/(pi j)) / 2.
    auto env = [&](double j) { return std::fabs(pref) * 2.0 * std::sqrt(kPi / (2.0 * j)) * std::exp(-j * j * rate); };
    const SeriesSum s = kent_sum(order, t, b, opt, 0, term, env);
    const double mass = q.total_mass();
    e.cdf = mass - s.sum;
    e.survival = (1.0 - mass) + s.sum;
    e.error = s.tail + kRound * (s.abs_sum + 1.0);
    e.terms = s.terms;
    e.truncated = s.truncated;
    return e;
}

double cdf_from_origin(const HittingQuery& q, double t, int k_terms) {
    if (k_terms < 0) throw DomainError("k_terms must be nonnegative");
    return from_origin_impl(q, t, {}, k_terms).cdf;
}

double cdf_inward(const HittingQuery& q, double t) { return series_inward(q, t).cdf; }

double cdf_to_origin(const HittingQuery& q, double t) {
    if (q.regime() != Regime::ToOrigin) throw DomainError("cdf_to_origin needs b=0<a");
    if (!(t > 0.0)) throw DomainError("t must be positive");
    const double a = q.a();
    return gamma_q(q.nu().abs_nu(), a * a / (2.0 * t));
}

// ---------------------------------------------------------------------------
// Outward representation.

namespace {

void require_outward(const HittingQuery& q, double t) {
    if (q.regime() != Regime::Outward) throw DomainError("outward formulas need 0<b<a");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and positive");
}

// int_0^inf exp(-v^2/2 - beta v) dv for Re beta > -inf, by quadrature.
cplx gauss_tail(cplx beta, double rel_tol) {
    const double br = beta.real();
    const double v_max = -br + std::sqrt(br * br + 84.0);
    auto f = [beta](double v) { return std::exp(-0.5 * v * v - beta * v); };
    quad::Options o;
    o.rel_tol = rel_tol;
    o.abs_tol = 0.0;
    o.max_intervals = 4000;
    // Split where the integrand has decayed by e^{-1} to resolve both scales.
    const double v1 = std::min(v_max, 1.0 / std::max(1.0, std::abs(beta)));
    auto r = quad::integrate_pieces<cplx>(f, {0.0, v1, v_max}, o);
    if (!r.converged && r.abs_error > 1e-13 * std::abs(r.value))
        throw NumericalError("Gaussian tail quadrature did not converge");
    return r.value;
}

}  // namespace

double psi1(const HittingQuery& q, double t) {
    require_outward(q, t);
    return std::erf((q.a() - q.b()) / std::sqrt(2.0 * t));
}

cplx psi2(const HittingQuery& q, double t, cplx z, const QuadratureSpec& spec) {
    require_outward(q, t);
    if (!(z.real() < 0.0)) throw DomainError("psi2 needs Re z < 0");
    spec.validate();
    const double a = q.a();
    const double b = q.b();
    const double u0 = (a - b) / std::sqrt(t);
    const cplx beta = u0 - z * std::sqrt(t) / b;
    const cplx pre = std::exp(-0.5 * u0 * u0 + z * (a - b) / b);
    return std::sqrt(2.0 / kPi) * pre * gauss_tail(beta, std::min(spec.rel_tol, 1e-14));
}

Estimate psi3(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    require_outward(q, t);
    spec.validate();
    const Index& nu = q.nu();
    if (nu.is_half_integer()) return {0.0, 0.0};
    const double a = q.a();
    const double b = q.b();
    const double u0 = (a - b) / std::sqrt(t);
    const double st = std::sqrt(t) / b;
    const double pre = std::exp(-0.5 * u0 * u0);
    if (pre == 0.0) return {0.0, 0.0};
    auto g = [u0, st, pre](double x) { return pre * erfcx((u0 + x * st) / std::sqrt(2.0)); };
    const double x1 = std::min(0.5, b / std::sqrt(t));
    const auto r = detail::kernel_integral<double>(nu.abs_nu(), a / b, 1.0, x1, g, spec);
    if (!r.converged && r.abs_error > 10.0 * std::max(spec.abs_tol, spec.rel_tol * std::fabs(r.value)))
        throw NumericalError("psi3 quadrature did not converge");
    return {r.value, r.abs_error};
}

OutwardParts outward_parts(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    require_outward(q, t);
    const double a = q.a();
    const double b = q.b();
    const double v = q.nu().nu();
    const double mu = q.nu().abs_nu();
    const double c = b / a;
    const double cv = std::pow(c, v);
    OutwardParts p;
    const double arg = (a - b) / std::sqrt(2.0 * t);
    p.psi1 = std::erf(arg);
    p.erfc_part = std::erfc(arg);

    const auto zs = cached_k_zeros(mu);
    double zero_scale = 0.0;
    if (zs->count() > 0) {
        const auto w = zs->residue_weights(a / b);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const cplx term = w[j] * psi2(q, t, zs->zeros()[j], spec);
            p.zero_sum += term;
            zero_scale += std::abs(term);
        }
        if (std::fabs(p.zero_sum.imag()) > 1e-10 * std::max(zero_scale, 1e-300))
            throw NumericalError("conjugate zero pairs left an imaginary residue");
    }
    const Estimate e3 = psi3(q, t, spec);
    p.psi3 = e3.value;
    const double rest = cv * (p.zero_sum.real() + p.psi3);
    p.cdf = std::pow(c, v + mu) * p.erfc_part - rest;
    if (v <= 0.0) {
        p.survival = p.psi1 + rest;
        p.excess_survival = p.survival;
    } else {
        const double c2 = std::pow(c, 2.0 * v);
        p.excess_survival = c2 * p.psi1 + rest;
        p.survival = (1.0 - c2) + p.excess_survival;
    }
    p.error = cv * e3.error + 1e-15 * (cv * zero_scale + 1.0);
    return p;
}

double cdf_outward(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    return outward_parts(q, t, spec).cdf;
}

double cdf_outward_raw(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    require_outward(q, t);
    spec.validate();
    const double a = q.a();
    const double b = q.b();
    const double v = q.nu().nu();
    const double mu = q.nu().abs_nu();
    const double c = b / a;
    const double d = a - b;
    const auto zs = cached_k_zeros(mu);
    const std::vector<cplx> w = zs->count() > 0 ? zs->residue_weights(a / b) : std::vector<cplx>{};
    const bool half = q.nu().is_half_integer();
    const QuadratureSpec inner{spec.rel_tol, spec.abs_tol * 1e-2, spec.x_truncation_decay, spec.max_subdivisions};

    auto h = [d](double s) { return d / std::sqrt(2.0 * kPi * s * s * s) * std::exp(-d * d / (2.0 * s)); };
    auto integrand = [&](double s) {
        const double hs = h(s);
        if (hs == 0.0) return 0.0;
        double val = std::pow(c, v + mu) * hs;
        const double k = d * std::sqrt(t) / (b * std::sqrt(s));
        cplx zsum = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) zsum += w[j] * std::exp(zs->zeros()[j] * k);
        val -= std::pow(c, v) * hs * zsum.real();
        if (!half) {
            // L e^{-x k} = D e^{-x (k - (a-b)/b)}, and k >= (a-b)/b for s <= t.
            const double damp = k - d / b;
            auto g = [damp](double x) { return std::exp(-damp * x); };
            const auto r = detail::kernel_integral<double>(mu, a / b, 1.0, 0.5, g, inner);
            val -= std::pow(c, v) * hs * r.value;
        }
        return val;
    };
    quad::Options o;
    o.rel_tol = spec.rel_tol;
    o.abs_tol = spec.abs_tol;
    o.max_intervals = spec.max_subdivisions;
    return quad::integrate<double>(integrand, 0.0, t, o).value;
}

// ---------------------------------------------------------------------------
// Dispatch.

Estimate cdf_estimate(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and positive");
    if (q.trivial()) return {1.0, 0.0};
    switch (q.regime()) {
        case Regime::FromOrigin: {
            const auto s = series_from_origin(q, t);
            return {s.cdf, s.error};
        }
        case Regime::Inward: {
            const auto s = series_inward(q, t);
            return {s.cdf, s.error};
        }
        case Regime::ToOrigin: return {cdf_to_origin(q, t), 1e-15};
        case Regime::Outward: {
            const auto p = outward_parts(q, t, spec);
            return {p.cdf, p.error};
        }
    }
    return {};
}

Estimate survival_estimate(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and positive");
    if (q.trivial()) return {0.0, 0.0};
    switch (q.regime()) {
        case Regime::FromOrigin: {
            const auto s = series_from_origin(q, t);
            return {s.survival, s.error};
        }
        case Regime::Inward: {
            const auto s = series_inward(q, t);
            return {s.survival, s.error};
        }
        case Regime::ToOrigin: {
            const double a = q.a();
            return {gamma_p(q.nu().abs_nu(), a * a / (2.0 * t)), 1e-15};
        }
        case Regime::Outward: {
            const auto p = outward_parts(q, t, spec);
            return {p.survival, p.error};
        }
    }
    return {};
}

double cdf(const HittingQuery& q, double t, const QuadratureSpec& spec) { return cdf_estimate(q, t, spec).value; }

double survival(const HittingQuery& q, double t, const QuadratureSpec& spec) {
    return survival_estimate(q, t, spec).value;
}

std::string exact_method_tag(const HittingQuery& q) {
    if (q.trivial()) return "exact-closed-form";
    switch (q.regime()) {
        case Regime::FromOrigin:
        case Regime::Inward: return "exact-series";
        case Regime::ToOrigin: return "exact-closed-form";
        case Regime::Outward: return "exact-outward";
    }
    return "exact";
}

DistributionCurve cdf_curve(const HittingQuery& q, const std::vector<double>& times, const QuadratureSpec& spec) {
    DistributionCurve curve;
    curve.method = exact_method_tag(q);
    curve.total_mass = q.total_mass();
    curve.times = times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("curve times must be strictly increasing");
        const Estimate e = cdf_estimate(q, times[i], spec);
        curve.values.push_back(e.value);
        curve.err_estimates.push_back(e.error);
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Rescaled inversion pairs.

double inv_laplace_p1(double alpha, double t) {
    if (!(alpha > 1.0) || !(t > 0.0)) throw DomainError("inv_laplace_p1 needs alpha > 1 and t > 0");
    const double x = (alpha - 1.0) / std::sqrt(2.0 * t);
    return std::sqrt(2.0 / kPi) * std::exp(-0.5 * x * x) * gauss_tail(cplx(x, 0.0), 1e-14).real();
}

cplx inv_laplace_p2(double alpha, cplx z, double t) {
    if (!(alpha > 1.0) || !(t > 0.0)) throw DomainError("inv_laplace_p2 needs alpha > 1 and t > 0");
    if (!(z.real() < 0.0)) throw DomainError("inv_laplace_p2 needs Re z < 0");
    const double x = (alpha - 1.0) / std::sqrt(2.0 * t);
    const cplx beta = x - z * std::sqrt(2.0 * t);
    return std::sqrt(2.0 / kPi) * std::exp(-0.5 * x * x) * gauss_tail(beta, 1e-14);
}

double exp_moment_tail(int n, double beta, double mu) {
    if (n < 0 || !(mu > 0.0) || !(beta >= 0.0)) throw DomainError("exp_moment_tail needs n >= 0, beta >= 0, mu > 0");
    double sum = 0.0;
    double ratio = 1.0;  // n!/k! beta^k / mu^{n-k+1}, built from k = n downwards
    ratio = 1.0 / mu;
    for (int k = n; k >= 0; --k) {
        sum += ratio * std::pow(beta, k);
        ratio *= static_cast<double>(k) / mu;
    }
    return std::exp(-beta * mu) * sum;
}

}  // namespace bhit
