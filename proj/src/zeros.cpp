#include "bhit/zeros.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <optional>

namespace bhit {

int count_k_zeros(const Index& nu) {
    const double m = nu.abs_nu();
    if (nu.is_half_integer()) return static_cast<int>(std::lround(m - 0.5));
    return 2 * static_cast<int>(std::lround((m - 0.5) / 2.0));
}

// ---------------------------------------------------------------------------

KZeroSet::KZeroSet(Index nu, std::vector<cplx> zeros) : nu_(nu), zeros_(std::move(zeros)) {}

std::vector<cplx> KZeroSet::residue_weights(double alpha) const {
    if (!(alpha > 1.0)) throw DomainError("residue weights need alpha > 1");
    const double mu = nu_.abs_nu();
    std::vector<cplx> w;
    w.reserve(zeros_.size());
    if (nu_.is_half_integer()) {
        const PsiPolynomial p0(mu);
        const PsiPolynomial p1(mu + 1.0);
        for (const cplx& z : zeros_)
            w.push_back(std::exp(-(alpha - 1.0) * z) * p0(alpha * z) / (std::pow(alpha, mu) * p1(z)));
        return w;
    }
    for (const cplx& z : zeros_) {
        const cplx num = bessel_k_pair_scaled(mu, alpha * z).first;
        const cplx den = bessel_k_pair_scaled(mu, z).second;
        w.push_back(num / (z * den) * std::exp(-(alpha - 1.0) * z));
    }
    return w;
}

namespace {

struct ContourHitsZero {};

// z^mu e^{z} K_mu(z): same zeros as K_mu in the cut plane, and bounded near
// the origin, where K_mu alone turns its phase too fast to sample.
cplx k_for_winding(double mu, cplx z) { return std::pow(z, mu) * bessel_k_pair_scaled(mu, z).first; }

// Total phase change of f along the segment z0 -> z1, refined until each
// step turns the phase by less than 0.4 rad.
double phase_along(double mu, cplx z0, cplx z1, cplx f0, cplx f1, int depth) {
    const cplx ratio = f1 / f0;
    const double d = std::arg(ratio);
    const double m = std::abs(ratio);
    if (std::fabs(d) < 0.4 && m > 0.33 && m < 3.0 && depth > 4) return d;
    if (depth > 40) throw ContourHitsZero{};
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = k_for_winding(mu, zm);
    if (!(std::abs(fm) > 0.0) || !std::isfinite(std::abs(fm))) throw ContourHitsZero{};
    return phase_along(mu, z0, zm, f0, fm, depth + 1) + phase_along(mu, zm, z1, fm, f1, depth + 1);
}

struct Rect {
    double x0, x1, y0, y1;
    bool contains(cplx z, double margin) const {
        return z.real() >= x0 - margin && z.real() <= x1 + margin && z.imag() >= y0 - margin &&
               z.imag() <= y1 + margin;
    }
};

int winding(double mu, const Rect& r) {
    const cplx c[4] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    cplx f[4];
    for (int i = 0; i < 4; ++i) {
        f[i] = k_for_winding(mu, c[i]);
        if (!(std::abs(f[i]) > 0.0) || !std::isfinite(std::abs(f[i]))) throw ContourHitsZero{};
    }
    double total = 0.0;
    for (int i = 0; i < 4; ++i) total += phase_along(mu, c[i], c[(i + 1) % 4], f[i], f[(i + 1) % 4], 0);
    const double w = total / (2.0 * kPi);
    const double n = std::round(w);
    if (std::fabs(w - n) > 0.1) throw ContourHitsZero{};
    return static_cast<int>(n);
}

std::optional<cplx> newton_k(double mu, cplx z, double tol) {
    for (int it = 0; it < 50; ++it) {
        if (z.real() >= 0.0 || std::fabs(std::arg(z)) > kPi - kCutGuard) return std::nullopt;
        const auto [k, k1] = bessel_k_pair_scaled(mu, z);
        const cplx dz = k / (mu / z * k - k1);
        z -= dz;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        if (std::abs(dz) < tol * std::abs(z)) return z;
    }
    return std::nullopt;
}

void locate(double mu, const Rect& r, int count, double tol, std::vector<cplx>& out, int depth) {
    if (count <= 0) return;
    if (depth > 60) throw NumericalError("K_nu zero isolation did not terminate");
    if (count == 1) {
        const cplx centre(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
        const double size = std::max(r.x1 - r.x0, r.y1 - r.y0);
        if (auto z = newton_k(mu, centre, tol); z && r.contains(*z, 1e-9 * size)) {
            out.push_back(*z);
            return;
        }
    }
    const bool split_x = (r.x1 - r.x0) >= (r.y1 - r.y0);
    for (double frac : {0.5, 0.4637, 0.5389, 0.4129, 0.5871}) {
        Rect a = r;
        Rect b = r;
        if (split_x) {
            const double s = r.x0 + frac * (r.x1 - r.x0);
            a.x1 = s;
            b.x0 = s;
        } else {
            const double s = r.y0 + frac * (r.y1 - r.y0);
            a.y1 = s;
            b.y0 = s;
        }
        int ca, cb;
        try {
            ca = winding(mu, a);
            cb = winding(mu, b);
        } catch (const ContourHitsZero&) {
            continue;
        }
        if (ca + cb != count || ca < 0 || cb < 0) continue;
        locate(mu, a, ca, tol, out, depth + 1);
        locate(mu, b, cb, tol, out, depth + 1);
        return;
    }
    throw NumericalError("could not split a K_nu zero search rectangle cleanly");
}

std::vector<cplx> general_upper_zeros(double mu, int want, double tol);
bool distinct(const std::vector<cplx>& z);
std::vector<cplx> with_conjugates(std::vector<cplx> upper, const std::vector<cplx>& real);

// Newton on K_mu through the continuation path, which stays well conditioned
// where the monomial form of psi does not.
cplx polish_complex_zero(double mu, cplx z, double tol) {
    for (int it = 0; it < 50; ++it) {
        const auto [k, k1] = detail::k_pair_scaled_general(mu, z);
        const cplx dz = k / (mu / z * k - k1);
        z -= dz;
        if (std::abs(dz) < tol * std::abs(z)) return z;
    }
    throw NumericalError("Newton polish of a K_nu zero did not converge");
}

// A real zero -x of K_mu (odd psi degree) solves pi I_mu(x) = K_mu(x).
double polish_real_zero(double mu, double x, double tol) {
    for (int it = 0; it < 50; ++it) {
        const auto p = bessel_ik_scaled(mu, x);
        const double e = std::exp(-2.0 * x);
        const double h = kPi * p.i - p.k * e;
        const double dh = kPi * (p.i_next + mu / x * p.i) - (mu / x * p.k - p.k_next) * e;
        const double dx = h / dh;
        x -= dx;
        if (std::fabs(dx) < tol * x) return x;
    }
    throw NumericalError("Newton polish of a real K_nu zero did not converge");
}

std::vector<cplx> half_integer_zeros(double mu, double tol) {
    const PsiPolynomial p(mu);
    const int n = p.degree();
    if (n == 0) return {};
    // Roots of psi(s y) / s^n, monic in y, with s = n for conditioning.
    const double s = std::max(1.0, static_cast<double>(n));
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p.coeffs()[i] * std::pow(s, i - n);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver failed");
    std::vector<cplx> roots;
    for (int i = 0; i < n; ++i) roots.push_back(s * cplx(es.eigenvalues()[i]));
    for (cplx& z : roots) {
        if (std::fabs(z.imag()) <= 1e-6 * std::abs(z)) z = cplx(-polish_real_zero(mu, -z.real(), tol), 0.0);
        else z = polish_complex_zero(mu, z, tol);
    }
    std::vector<cplx> upper;
    std::vector<cplx> real;
    for (const cplx& z : roots) {
        if (z.imag() == 0.0) real.push_back(z);
        else if (z.imag() > 0.0) upper.push_back(z);
    }
    const std::size_t want = static_cast<std::size_t>(n / 2);
    if (upper.size() != want || real.size() != static_cast<std::size_t>(n % 2) || !distinct(roots))
        upper = general_upper_zeros(mu, static_cast<int>(want), tol);
    if (real.size() != static_cast<std::size_t>(n % 2)) throw NumericalError("missing real K_nu zero");
    return with_conjugates(std::move(upper), real);
}

std::vector<cplx> general_upper_zeros(double mu, int want, double tol) {
    double radius = mu + 2.0;
    for (int attempt = 0; attempt < 4; ++attempt, radius *= 1.5) {
        const double guard = std::tan(kCutGuard) * 1.01;
        const Rect r{-radius, -1e-6, guard * radius, radius};
        int got;
        try {
            got = winding(mu, r);
        } catch (const ContourHitsZero&) {
            continue;
        }
        if (got != want) continue;
        std::vector<cplx> upper;
        locate(mu, r, want, tol, upper, 0);
        for (const cplx& z : upper) {
            if (std::fabs(std::arg(z)) > kPi - kCutGuard)
                throw DomainError("a K_nu zero lies inside the branch-cut guard band");
        }
        return upper;
    }
    throw NumericalError("K_nu zero count mismatch after expanding the search region");
}

bool distinct(const std::vector<cplx>& z) {
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (std::abs(z[i] - z[j]) <= 1e-8 * std::abs(z[i])) return false;
    return true;
}

std::vector<cplx> with_conjugates(std::vector<cplx> upper, const std::vector<cplx>& real) {
    std::sort(upper.begin(), upper.end(), [](cplx a, cplx b) { return a.imag() > b.imag(); });
    std::vector<cplx> out;
    for (const cplx& z : upper) {
        out.push_back(z);
        out.push_back(std::conj(z));
    }
    out.insert(out.end(), real.begin(), real.end());
    return out;
}

}  // namespace

KZeroSet find_k_zeros(const Index& nu, double tol) {
    const Index m(nu.abs_nu());
    const int n = count_k_zeros(m);
    if (n == 0) return KZeroSet(m, {});
    std::vector<cplx> z = m.is_half_integer()
                              ? half_integer_zeros(m.nu(), tol)
                              : with_conjugates(general_upper_zeros(m.nu(), n / 2, tol), {});
    if (!distinct(z)) throw NumericalError("K_nu zeros are not distinct");
    if (static_cast<int>(z.size()) != n) throw NumericalError("K_nu zero count mismatch");
    return KZeroSet(m, std::move(z));
}

std::shared_ptr<const KZeroSet> cached_k_zeros(double nu) {
    const double abs_nu = std::fabs(nu);
    using Entry = std::shared_future<std::shared_ptr<const KZeroSet>>;
    static std::mutex mtx;
    static std::map<double, Entry> cache;
    std::unique_lock<std::mutex> lock(mtx);
    if (auto it = cache.find(abs_nu); it != cache.end()) {
        Entry e = it->second;
        lock.unlock();
        return e.get();
    }
    std::promise<std::shared_ptr<const KZeroSet>> promise;
    Entry e = promise.get_future().share();
    cache.emplace(abs_nu, e);
    lock.unlock();
    // Computed outside the lock; concurrent callers for this key wait on the future.
    try {
        promise.set_value(std::make_shared<const KZeroSet>(find_k_zeros(Index(abs_nu))));
    } catch (...) {
        promise.set_exception(std::current_exception());
    }
    return e.get();
}

// ---------------------------------------------------------------------------

JZeroTable::JZeroTable(double nu) : nu_(nu) {
    if (!(nu > -1.0)) throw DomainError("J zero tables need nu > -1");
}

namespace {

double mcmahon(double nu, int k) {
    const double beta = (k + 0.5 * nu - 0.25) * kPi;
    const double m = 4.0 * nu * nu;
    const double e8 = 8.0 * beta;
    return beta - (m - 1.0) / e8 - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * e8 * e8 * e8);
}

// Safeguarded Newton inside a sign-change bracket.
std::pair<double, double> refine_j_zero(double nu, double lo, double hi, double flo, double guess) {
    double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const auto [j, j1] = bessel_j_pair(nu, x);
        if (j == 0.0) return {x, j1};
        if ((j > 0.0) == (flo > 0.0)) lo = x;
        else hi = x;
        const double dj = nu / x * j - j1;
        double nx = x - j / dj;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::fabs(nx - x) <= 4e-16 * x || hi - lo <= 4e-16 * x) {
            return {nx, bessel_j_pair(nu, nx).second};
        }
        x = nx;
    }
    throw NumericalError("J_nu zero refinement did not converge");
}

}  // namespace

void JZeroTable::extend_to(int k_max) {
    while (static_cast<int>(zeros_.size()) < k_max) {
        const int k = static_cast<int>(zeros_.size()) + 1;
        const double guess = mcmahon(nu_, k);
        double lo, flo, hi;
        bool bracketed = false;
        const double start = zeros_.empty() ? 1e-4 : zeros_.back() + 2.5;
        if (k > 5 && guess - 0.2 > start) {
            lo = guess - 0.2;
            hi = guess + 0.2;
            flo = bessel_j(nu_, lo);
            bracketed = (flo > 0.0) != (bessel_j(nu_, hi) > 0.0);
        }
        if (!bracketed) {
            lo = start;
            flo = bessel_j(nu_, lo);
            for (int step = 0; step < 100000; ++step) {
                hi = lo + std::min(0.25, 0.5 * lo);
                const double fhi = bessel_j(nu_, hi);
                if ((fhi > 0.0) != (flo > 0.0)) {
                    bracketed = true;
                    break;
                }
                lo = hi;
                flo = fhi;
            }
            if (!bracketed) throw NumericalError("no sign change found for the next J_nu zero");
        }
        const auto [z, j1] = refine_j_zero(nu_, lo, hi, flo, guess);
        zeros_.push_back(z);
        j_next_.push_back(j1);
    }
}

double JZeroTable::zero(int k) {
    if (k < 1) throw DomainError("J zeros are indexed from 1");
    extend_to(k);
    return zeros_[static_cast<std::size_t>(k - 1)];
}

double JZeroTable::j_next_at(int k) {
    if (k < 1) throw DomainError("J zeros are indexed from 1");
    extend_to(k);
    return j_next_[static_cast<std::size_t>(k - 1)];
}

JZeroTable find_j_zeros(double nu, int k_max) {
    if (k_max < 1) throw DomainError("k_max must be positive");
    JZeroTable t(nu);
    t.extend_to(k_max);
    return t;
}

}  // namespace bhit
