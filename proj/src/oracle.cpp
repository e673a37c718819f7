#include "bhit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace bhit {

const char* inversion_method_name(InversionMethod m) {
    return m == InversionMethod::Talbot ? "talbot" : "gaver-stehfest";
}

int InversionSpec::nodes() const {
    if (node_count > 0) return node_count;
    return method == InversionMethod::Talbot ? 48 : 16;
}

void InversionSpec::validate() const {
    const int n = nodes();
    if (method == InversionMethod::Talbot && n < 16) throw DomainError("Talbot needs at least 16 nodes");
    if (method == InversionMethod::GaverStehfest && (n % 2 != 0 || n < 2))
        throw DomainError("Gaver-Stehfest needs an even, positive term count");
}

// ---------------------------------------------------------------------------
// Inversion.

double talbot_invert(const ComplexTransform& F, double t, int n) {
    if (!(t > 0.0)) throw DomainError("inversion needs t > 0");
    if (n < 16 || n % 2 != 0) throw DomainError("Talbot needs an even node count of at least 16");
    // Fixed Talbot contour z(th) = n/t (s th cot(a th) + g + i m th) with Weideman's parameters.
    constexpr double s = 0.5017;
    constexpr double al = 0.6407;
    constexpr double g = -0.6122;
    constexpr double m = 0.2645;
    const double scale = n / t;
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double th = -kPi + (k + 0.5) * (2.0 * kPi / n);
        const double sn = std::sin(al * th);
        const double cot = std::cos(al * th) / sn;
        const cplx z = scale * cplx(s * th * cot + g, m * th);
        const cplx dz = scale * cplx(s * cot - s * al * th / (sn * sn), m);
        sum += std::exp(z * t) * F(z) * dz;
    }
    // (1 / 2 pi i) * (2 pi / n) * sum
    return (sum / cplx(0.0, static_cast<double>(n))).real();
}

namespace {

std::vector<double> stehfest_weights(int n) {
    std::vector<long double> fact(2 * n + 2, 1.0L);
    for (int i = 1; i < static_cast<int>(fact.size()); ++i) fact[i] = fact[i - 1] * i;
    const int h = n / 2;
    std::vector<double> v(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
        long double sum = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
            sum += std::pow(static_cast<long double>(j), h) * fact[2 * j] /
                   (fact[h - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k]);
        }
        v[k] = static_cast<double>(((k + h) % 2 == 0 ? 1.0L : -1.0L) * sum);
    }
    return v;
}

}  // namespace

double gaver_stehfest_invert(const RealTransform& F, double t, int n) {
    if (!(t > 0.0)) throw DomainError("inversion needs t > 0");
    if (n < 2 || n % 2 != 0) throw DomainError("Gaver-Stehfest needs an even, positive term count");
    const auto v = stehfest_weights(n);
    const double ln2t = std::log(2.0) / t;
    long double sum = 0.0L;
    for (int k = 1; k <= n; ++k) sum += static_cast<long double>(v[k]) * F(k * ln2t);
    return static_cast<double>(sum * ln2t);
}

InversionResult invert_transform(const HittingQuery& q, const InversionSpec& spec, double t) {
    spec.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("inversion needs finite t > 0");
    InversionResult r;
    r.method = inversion_method_name(spec.method);
    if (q.trivial()) {
        r.value = 1.0;
        return r;
    }
    auto real_f = [&q](double lam) { return laplace_hitting(q, lam) / lam; };
    auto cplx_f = [&q](cplx lam) { return laplace_hitting(q, lam) / lam; };
    if (spec.method == InversionMethod::GaverStehfest) {
        r.value = gaver_stehfest_invert(real_f, t, spec.nodes());
        return r;
    }
    r.value = talbot_invert(cplx_f, t, spec.nodes());
    if (spec.cross_check) {
        const double gs = gaver_stehfest_invert(real_f, t, 16);
        r.error = std::fabs(r.value - gs);
        r.flagged = r.error > 1e-4;
    }
    return r;
}

DistributionCurve invert_curve(const HittingQuery& q, const InversionSpec& spec, const std::vector<double>& times) {
    DistributionCurve c;
    c.method = "oracle-inversion";
    c.total_mass = q.total_mass();
    c.times = times;
    for (double t : times) {
        const auto r = invert_transform(q, spec, t);
        c.values.push_back(r.value);
        c.err_estimates.push_back(r.error);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Monte Carlo.

void McSpec::validate() const {
    if (paths < 1000) throw DomainError("Monte Carlo needs at least 1000 paths");
    if (!(eps > 0.0) || !(dt_min > 0.0) || dt_max < 0.0) throw DomainError("invalid Monte Carlo step rule");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("Monte Carlo needs a finite horizon > 0");
    if (threads < 0) throw DomainError("thread count must be nonnegative");
}

const char* mc_scheme_name(McScheme s) {
    switch (s) {
        case McScheme::GaussianVector: return "gaussian-vector";
        case McScheme::SquaredBesselExact: return "squared-bessel";
        case McScheme::EulerAbsorbed: return "euler-absorbed";
    }
    return "unknown";
}

McScheme mc_scheme_for(const HittingQuery& q) {
    const double dim = 2.0 * q.nu().nu() + 2.0;
    if (dim >= 1.0 - 1e-12 && std::fabs(dim - std::round(dim)) < 1e-12) return McScheme::GaussianVector;
    if (q.nu().nu() > -1.0) return McScheme::SquaredBesselExact;
    return McScheme::EulerAbsorbed;
}

double dkw_band(std::int64_t n, double alpha) {
    if (n <= 0 || !(alpha > 0.0 && alpha < 1.0)) throw DomainError("dkw_band needs n > 0 and alpha in (0, 1)");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double McResult::ecdf(double t) const {
    const auto it = std::upper_bound(hit_times.begin(), hit_times.end(), t);
    return static_cast<double>(it - hit_times.begin()) / static_cast<double>(paths);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kNever = -1.0;

struct PathSim {
    const HittingQuery& q;
    const McSpec& spec;
    McScheme scheme;
    double dt_max;
    int dim;

    // Hitting time of one path, or kNever when censored or absorbed.
    double run(std::uint64_t stream) const {
        std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(stream)));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double a = q.a();
        const double b = q.b();
        const bool down = a > b;
        const double v = q.nu().nu();
        const double delta = 2.0 * v + 2.0;
        const double absorb = 1e-3 * b;
        std::vector<double> x(static_cast<std::size_t>(std::max(dim, 1)), 0.0);
        x[0] = a;
        double r = a;
        double t = 0.0;
        while (t < spec.horizon) {
            double dist = std::fabs(r - b);
            if (scheme == McScheme::EulerAbsorbed) dist = std::min(dist, r);
            const double dt = std::clamp(spec.eps * dist * dist, spec.dt_min, dt_max);
            double r1;
            switch (scheme) {
                case McScheme::GaussianVector: {
                    const double sd = std::sqrt(dt);
                    double s2 = 0.0;
                    for (double& xi : x) {
                        xi += sd * normal(rng);
                        s2 += xi * xi;
                    }
                    r1 = std::sqrt(s2);
                    break;
                }
                case McScheme::SquaredBesselExact: {
                    // Y_{t+dt} = dt * noncentral chi^2 with delta dof and noncentrality Y_t / dt,
                    // sampled as a Poisson mixture of central chi^2 laws.
                    const double lam = r * r / dt;
                    std::int64_t k = 0;
                    if (lam > 0.0) k = std::poisson_distribution<std::int64_t>(0.5 * lam)(rng);
                    const double y = 2.0 * dt * std::gamma_distribution<double>(0.5 * delta + k, 1.0)(rng);
                    r1 = std::sqrt(y);
                    break;
                }
                case McScheme::EulerAbsorbed:
                default: {
                    r1 = r + (2.0 * v + 1.0) / (2.0 * r) * dt + std::sqrt(dt) * normal(rng);
                    if (b > 0.0 && r1 <= absorb) return kNever;
                    if (b == 0.0 && r1 <= 0.0) return t + dt;
                    break;
                }
            }
            const double d0 = std::fabs(r - b);
            const bool crossed = down ? r1 <= b : r1 >= b;
            if (crossed) {
                const double d1 = std::fabs(r1 - b);
                return t + dt * d0 / (d0 + d1);
            }
            if (spec.bridge_correction) {
                const double d1 = std::fabs(r1 - b);
                const double p = std::exp(-2.0 * d0 * d1 / dt);
                if (unif(rng) < p) return t + dt * d0 / (d0 + d1);
            }
            r = r1;
            t += dt;
        }
        return kNever;
    }
};

}  // namespace

McResult simulate_hitting(const HittingQuery& q, const McSpec& spec, const std::vector<double>& times) {
    spec.validate();
    McResult res;
    res.paths = spec.paths;
    res.horizon = spec.horizon;
    res.band = dkw_band(spec.paths);
    res.scheme = mc_scheme_for(q);
    if (q.trivial()) {
        res.hit_times.assign(static_cast<std::size_t>(spec.paths), 0.0);
    } else {
        const int dim = res.scheme == McScheme::GaussianVector
                            ? static_cast<int>(std::lround(2.0 * q.nu().nu() + 2.0))
                            : 1;
        const double dt_max = spec.dt_max > 0.0 ? spec.dt_max : spec.horizon / 100.0;
        const PathSim sim{q, spec, res.scheme, dt_max, dim};
        std::vector<double> out(static_cast<std::size_t>(spec.paths), kNever);
        unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
        workers = std::max(1u, std::min<unsigned>(workers, 64));
        // Path i always draws from stream i, so results do not depend on the worker count.
        auto work = [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = sim.run(static_cast<std::uint64_t>(i));
        };
        if (workers == 1) {
            work(0, spec.paths);
        } else {
            std::vector<std::thread> pool;
            const std::int64_t chunk = (spec.paths + workers - 1) / workers;
            for (unsigned w = 0; w < workers; ++w) {
                const std::int64_t lo = w * chunk;
                const std::int64_t hi = std::min<std::int64_t>(spec.paths, lo + chunk);
                if (lo < hi) pool.emplace_back(work, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
        for (double h : out) {
            if (h >= 0.0 && h <= spec.horizon) res.hit_times.push_back(h);
        }
        std::sort(res.hit_times.begin(), res.hit_times.end());
    }
    res.censored = spec.paths - static_cast<std::int64_t>(res.hit_times.size());
    res.curve.method = "oracle-mc";
    res.curve.total_mass = q.total_mass();
    res.curve.times = times;
    for (double t : times) {
        res.curve.values.push_back(res.ecdf(t));
        res.curve.err_estimates.push_back(res.band);
    }
    return res;
}

double ks_on_grid(const McResult& mc, const std::vector<double>& times, const std::vector<double>& exact) {
    if (times.size() != exact.size()) throw DomainError("grid and exact values differ in length");
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) sup = std::max(sup, std::fabs(mc.ecdf(times[i]) - exact[i]));
    return sup;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw DomainError("log_grid needs 0 < lo <= hi and n >= 1");
    std::vector<double> g(static_cast<std::size_t>(n));
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double l0 = std::log(lo);
    const double step = (std::log(hi) - l0) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(l0 + step * i);
    g.back() = hi;
    return g;
}

}  // namespace bhit
