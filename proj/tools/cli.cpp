#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bhit/hitting.hpp"
#include "bhit/oracle.hpp"
#include "bhit/verify.hpp"
#include "bhit/zeros.hpp"

namespace bhit::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// Locale-independent, 15 significant digits.
std::string fmt15(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

// The value a reader of the CSV would recover, so both formats agree.
json jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(fmt15(v).c_str(), nullptr);
}

struct QueryArgs {
    double nu = kUnset;
    double a = kUnset;
    double b = kUnset;

    void add(CLI::App* app) {
        app->add_option("--nu", nu, "Bessel index (any real)")->required();
        app->add_option("--a", a, "Start level a >= 0")->required();
        app->add_option("--b", b, "Target level b >= 0")->required();
    }
    HittingQuery query() const { return HittingQuery(a, b, nu); }
};

struct GridArgs {
    std::vector<double> t;
    double tmin = kUnset;
    double tmax = kUnset;
    int count = 30;
    std::string scale = "log";

    void add(CLI::App* app, const char* name = "--t") {
        app->add_option(name, t, "Explicit evaluation points (overrides the grid flags)")->delimiter(',');
        app->add_option("--tmin", tmin, "Grid start (default 0.01 d^2, d the distance to cover)");
        app->add_option("--tmax", tmax, "Grid end (default 100 d^2)");
        app->add_option("--count", count, "Grid size")->capture_default_str();
        app->add_option("--scale", scale, "Grid spacing")->check(CLI::IsMember({"lin", "log"}))->capture_default_str();
    }

    std::vector<double> build(std::optional<HittingQuery> q) const {
        if (!t.empty()) {
            for (double x : t) {
                if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("evaluation points must be finite and positive");
            }
            return t;
        }
        if (count < 1) throw DomainError("grid count must be at least 1");
        double lo = tmin, hi = tmax;
        if (q && (std::isnan(lo) || std::isnan(hi))) {
            const auto def = default_time_grid(*q, 2);
            if (std::isnan(lo)) lo = def.front();
            if (std::isnan(hi)) hi = def.back();
        }
        if (std::isnan(lo) || std::isnan(hi)) throw DomainError("grid needs --tmin and --tmax");
        if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw DomainError("grid needs 0 < tmin <= tmax < inf");
        if (count == 1) return {lo};
        if (scale == "log") return log_grid(lo, hi, count);
        std::vector<double> g(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
        return g;
    }
};

struct OutputArgs {
    std::string format = "csv";
    std::string output;

    void add(CLI::App* app) {
        app->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        app->add_option("-o,--output", output,
                        "Write to this file instead of standard output; relative paths resolve against "
                        "$BHIT_OUTPUT_DIR when it is set");
    }
};

struct McArgs {
    std::int64_t paths = 100000;
    std::uint64_t seed = 20240601;
    double eps = 0.02;
    int threads = 0;

    void add(CLI::App* app) {
        app->add_option("--paths", paths, "Monte Carlo path count")->capture_default_str();
        app->add_option("--seed", seed, "Monte Carlo seed")->capture_default_str();
        app->add_option("--eps", eps, "Monte Carlo step factor: dt = eps * distance^2")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
    }
    McSpec spec(double horizon) const {
        McSpec s;
        s.paths = paths;
        s.seed = seed;
        s.eps = eps;
        s.threads = threads;
        s.horizon = horizon;
        return s;
    }
};

struct TolArgs {
    double rel_tol = QuadratureSpec{}.rel_tol;
    double abs_tol = QuadratureSpec{}.abs_tol;
    std::string inversion = "talbot";
    int nodes = 0;

    void add(CLI::App* app) {
        app->add_option("--rel-tol", rel_tol, "Quadrature relative tolerance")->capture_default_str();
        app->add_option("--abs-tol", abs_tol, "Quadrature absolute tolerance")->capture_default_str();
        app->add_option("--inversion", inversion, "Inversion method for --method inversion")
            ->check(CLI::IsMember({"talbot", "gaver-stehfest"}))
            ->capture_default_str();
        app->add_option("--nodes", nodes, "Inversion nodes (0: 48 Talbot nodes or 16 Gaver-Stehfest terms)")
            ->capture_default_str();
    }
    QuadratureSpec quadrature() const {
        QuadratureSpec s;
        s.rel_tol = rel_tol;
        s.abs_tol = abs_tol;
        s.validate();
        return s;
    }
    InversionSpec inversion_spec() const {
        InversionSpec s;
        s.method = inversion == "talbot" ? InversionMethod::Talbot : InversionMethod::GaverStehfest;
        s.node_count = nodes;
        s.validate();
        return s;
    }
};

// Opens the destination chosen by OutputArgs.
class Sink {
public:
    Sink(const OutputArgs& o, std::ostream& fallback) : out_(&fallback) {
        if (o.output.empty()) return;
        std::filesystem::path p(o.output);
        if (p.is_relative()) {
            if (const char* dir = std::getenv("BHIT_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
        }
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        file_.open(p);
        if (!file_) throw DomainError("cannot open output file " + p.string());
        out_ = &file_;
    }
    std::ostream& operator*() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

json query_json(const HittingQuery& q) {
    return {{"nu", jnum(q.nu().nu())}, {"a", jnum(q.a())}, {"b", jnum(q.b())}, {"regime", regime_name(q.regime())},
            {"total_mass", jnum(q.total_mass())}};
}

struct Row {
    double x, value, err;
    std::string method;
};

void write_rows(std::ostream& os, const OutputArgs& o, const char* xname, const std::vector<Row>& rows,
                const json& meta) {
    if (o.format == "csv") {
        os << xname << ",value,err_estimate,method\n";
        for (const auto& r : rows) os << fmt15(r.x) << ',' << fmt15(r.value) << ',' << fmt15(r.err) << ',' << r.method << '\n';
        return;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{xname, jnum(r.x)}, {"value", jnum(r.value)}, {"err_estimate", jnum(r.err)}, {"method", r.method}});
    }
    json doc = meta;
    doc["columns"] = {xname, "value", "err_estimate", "method"};
    doc["rows"] = arr;
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

struct DistArgs {
    QueryArgs q;
    GridArgs grid;
    OutputArgs out;
    TolArgs tol;
    McArgs mc;
    std::string method = "exact";
};

void add_dist(CLI::App* sub, DistArgs& d) {
    d.q.add(sub);
    d.grid.add(sub);
    d.out.add(sub);
    d.tol.add(sub);
    d.mc.add(sub);
    sub->add_option("--method", d.method, "Evaluation route")
        ->check(CLI::IsMember({"exact", "inversion", "mc"}))
        ->capture_default_str();
}

int cmd_dist(const DistArgs& d, bool survival_fn, std::ostream& out) {
    const HittingQuery q = d.q.query();
    const auto times = d.grid.build(q);
    std::vector<Row> rows;
    if (d.method == "exact") {
        const auto spec = d.tol.quadrature();
        const std::string tag = exact_method_tag(q);
        for (double t : times) {
            const Estimate e = survival_fn ? survival_estimate(q, t, spec) : cdf_estimate(q, t, spec);
            rows.push_back({t, e.value, e.error, tag});
        }
    } else if (d.method == "inversion") {
        const auto spec = d.tol.inversion_spec();
        for (double t : times) {
            const auto r = invert_transform(q, spec, t);
            rows.push_back({t, survival_fn ? 1.0 - r.value : r.value, r.error, "oracle-inversion"});
        }
    } else {
        double horizon = 0.0;
        for (double t : times) horizon = std::max(horizon, t);
        const McResult res = simulate_hitting(q, d.mc.spec(horizon), {});
        for (double t : times) {
            const double f = res.ecdf(t);
            rows.push_back({t, survival_fn ? 1.0 - f : f, res.band, "oracle-mc"});
        }
    }
    Sink sink(d.out, out);
    write_rows(*sink, d.out, "t", rows, {{"query", query_json(q)}, {"function", survival_fn ? "survival" : "cdf"}});
    return kOk;
}

struct LaplaceArgs {
    QueryArgs q;
    std::vector<double> lambda;
    OutputArgs out;
};

int cmd_laplace(const LaplaceArgs& l, std::ostream& out) {
    const HittingQuery q = l.q.query();
    std::vector<Row> rows;
    for (double lam : l.lambda) {
        if (!(lam > 0.0) || !std::isfinite(lam)) throw DomainError("lambda must be finite and positive");
        rows.push_back({lam, laplace_hitting(q, lam), 0.0, "exact-laplace"});
    }
    Sink sink(l.out, out);
    write_rows(*sink, l.out, "lambda", rows, {{"query", query_json(q)}, {"function", "laplace"}});
    return kOk;
}

struct ZerosArgs {
    double nu = kUnset;
    OutputArgs out;
    bool as_json = false;
    bool as_csv = false;
};

int cmd_zeros(ZerosArgs z, std::ostream& out) {
    if (z.as_json) z.out.format = "json";
    if (z.as_csv) z.out.format = "csv";
    if (!std::isfinite(z.nu)) throw DomainError("nu must be finite");
    const auto zs = cached_k_zeros(std::fabs(z.nu));
    Sink sink(z.out, out);
    std::ostream& os = *sink;
    if (z.out.format == "csv") {
        os << "j,re,im\n";
        for (int j = 0; j < zs->count(); ++j) {
            const cplx w = zs->zeros()[static_cast<std::size_t>(j)];
            os << j + 1 << ',' << fmt15(w.real()) << ',' << fmt15(w.imag()) << '\n';
        }
        return kOk;
    }
    json arr = json::array();
    for (const cplx& w : zs->zeros()) arr.push_back({{"re", jnum(w.real())}, {"im", jnum(w.imag())}});
    os << json{{"nu", jnum(z.nu)}, {"count", zs->count()}, {"zeros", arr}}.dump(2) << '\n';
    return kOk;
}

struct TailArgs {
    QueryArgs q;
    GridArgs grid;
    OutputArgs out;
    bool coefficients = false;
};

int cmd_tail(const TailArgs& ta, std::ostream& out) {
    const HittingQuery q = ta.q.query();
    Sink sink(ta.out, out);
    std::ostream& os = *sink;
    if (ta.coefficients) {
        const TailCoefficients tc = tail_coefficients(q);
        struct Coef {
            std::string name;
            int m;
            double value;
        };
        std::vector<Coef> cs;
        if (tc.has_sigma) {
            cs.push_back({"sigma1", -1, tc.sigma1});
            cs.push_back({"sigma2", -1, tc.sigma2});
        }
        for (const auto& [m, v] : tc.beta1) cs.push_back({"beta1", m, v});
        for (const auto& [m, v] : tc.beta2) cs.push_back({"beta2", m, v});
        for (const auto& [m, v] : tc.beta3) cs.push_back({"beta3", m, v});
        if (ta.out.format == "csv") {
            os << "name,m,value\n";
            for (const auto& c : cs) os << c.name << ',' << (c.m < 0 ? std::string() : std::to_string(c.m)) << ',' << fmt15(c.value) << '\n';
        } else {
            json arr = json::array();
            for (const auto& c : cs) {
                arr.push_back({{"name", c.name}, {"m", c.m < 0 ? json(nullptr) : json(c.m)}, {"value", jnum(c.value)}});
            }
            os << json{{"query", query_json(q)}, {"m_max", tc.m_max}, {"coefficients", arr}}.dump(2) << '\n';
        }
        return kOk;
    }
    GridArgs g = ta.grid;
    if (g.t.empty() && std::isnan(g.tmin) && std::isnan(g.tmax)) {
        g.tmin = 1e2;
        g.tmax = 1e6;
        g.count = std::min(g.count, 5);
    }
    std::vector<Row> rows;
    for (double t : g.build(q)) {
        const double asym = tail_asymptotic(q, t);
        rows.push_back({t, asym, std::fabs(survival(q, t) - asym), "tail-asymptotic"});
    }
    write_rows(os, ta.out, "t", rows, {{"query", query_json(q)}, {"function", "tail-asymptotic"}});
    return kOk;
}

struct VerifyArgs {
    std::string cell;
    double nu = kUnset, a = kUnset, b = kUnset;
    std::vector<int> criteria;
    GridArgs grid;
    OutputArgs out;
    McArgs mc;
};

void write_cells(std::ostream& os, const std::string& format, const std::vector<CellReport>& cells) {
    if (format == "csv") {
        os << "cell,method,sup_gap,budget,pass\n";
        for (const auto& c : cells) {
            os << c.cell << ',' << c.method << ',' << fmt15(c.sup_gap) << ',' << fmt15(c.budget) << ','
               << (c.pass ? "pass" : "fail") << '\n';
        }
        return;
    }
    json arr = json::array();
    for (const auto& c : cells) {
        arr.push_back({{"cell", c.cell}, {"method", c.method}, {"sup_gap", jnum(c.sup_gap)}, {"budget", jnum(c.budget)},
                       {"pass", c.pass}, {"note", c.note}});
    }
    os << json{{"columns", {"cell", "method", "sup_gap", "budget", "pass"}}, {"rows", arr}}.dump(2) << '\n';
}

int cmd_verify(const VerifyArgs& v, std::ostream& out, std::ostream& err) {
    const bool has_query = !std::isnan(v.nu) || !std::isnan(v.a) || !std::isnan(v.b);
    std::vector<CellReport> cells;
    if (!v.cell.empty() || has_query) {
        if (std::isnan(v.nu) || std::isnan(v.a) || std::isnan(v.b)) throw DomainError("a verify cell needs --nu, --a and --b");
        if (!v.criteria.empty()) throw DomainError("--criteria selects acceptance criteria and cannot be combined with a cell");
        const HittingQuery q(v.a, v.b, v.nu);
        if (!v.cell.empty() && v.cell != regime_name(q.regime())) {
            throw DomainError("--cell " + v.cell + " does not match (a, b): a=" + fmt15(v.a) + ", b=" + fmt15(v.b) +
                              " is the " + regime_name(q.regime()) + " regime");
        }
        VerifyCellOptions opt;
        opt.mc_paths = v.mc.paths;
        opt.seed = v.mc.seed;
        opt.threads = v.mc.threads;
        if (!v.grid.t.empty() || !std::isnan(v.grid.tmin) || !std::isnan(v.grid.tmax)) opt.times = v.grid.build(q);
        cells = verify_cell(q, opt);
    } else {
        AcceptanceOptions opt;
        opt.only = v.criteria;
        opt.mc_paths = v.mc.paths;
        opt.seed = v.mc.seed;
        opt.threads = v.mc.threads;
        for (const auto& r : run_acceptance(opt)) {
            err << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << '\n';
            cells.insert(cells.end(), r.cells.begin(), r.cells.end());
        }
    }
    Sink sink(v.out, out);
    write_cells(*sink, v.out.format, cells);
    for (const auto& c : cells) {
        if (!c.pass) return kVerifyFailed;
    }
    return kOk;
}

struct SimArgs {
    QueryArgs q;
    GridArgs grid;
    OutputArgs out;
    McArgs mc;
    double horizon = 0.0;
};

int cmd_simulate(const SimArgs& s, std::ostream& out) {
    const HittingQuery q = s.q.query();
    const auto times = s.grid.build(q);
    double horizon = s.horizon;
    if (!(horizon > 0.0)) {
        for (double t : times) horizon = std::max(horizon, t);
    }
    const McResult res = simulate_hitting(q, s.mc.spec(horizon), times);
    std::vector<Row> rows;
    for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({times[i], res.curve.values[i], res.band, "oracle-mc"});
    json meta{{"query", query_json(q)},
              {"function", "cdf"},
              {"scheme", mc_scheme_name(res.scheme)},
              {"paths", res.paths},
              {"censored", res.censored},
              {"horizon", jnum(res.horizon)}};
    Sink sink(s.out, out);
    write_rows(*sink, s.out, "t", rows, meta);
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"First hitting times of Bessel processes: distribution functions, Laplace transforms, "
                 "Macdonald zeros, tail asymptotics and oracle verification.",
                 "bhit"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 1 domain error, 2 numerical failure, 3 verification failed.\n"
               "Environment: BHIT_OUTPUT_DIR is the base directory for relative --output paths.");

    DistArgs cdf_args, surv_args;
    auto* cdf_cmd = app.add_subcommand("cdf", "P(tau <= t) on a time grid");
    add_dist(cdf_cmd, cdf_args);
    auto* surv_cmd = app.add_subcommand("survival", "P(tau > t) on a time grid");
    add_dist(surv_cmd, surv_args);

    LaplaceArgs lap;
    auto* lap_cmd = app.add_subcommand("laplace", "E[exp(-lambda tau)]");
    lap.q.add(lap_cmd);
    lap_cmd->add_option("--lambda", lap.lambda, "Transform arguments")->required()->delimiter(',');
    lap.out.add(lap_cmd);

    ZerosArgs zer;
    auto* zer_cmd = app.add_subcommand("zeros", "Zeros of the Macdonald function K_nu");
    zer_cmd->add_option("--nu", zer.nu, "Order")->required();
    zer.out.add(zer_cmd);
    zer_cmd->add_flag("--json", zer.as_json, "Same as --format json");
    zer_cmd->add_flag("--csv", zer.as_csv, "Same as --format csv");

    TailArgs tail;
    auto* tail_cmd = app.add_subcommand("tail", "Large-time survival asymptotics (outward regime)");
    tail.q.add(tail_cmd);
    tail.grid.add(tail_cmd);
    tail.out.add(tail_cmd);
    tail_cmd->add_flag("--coefficients", tail.coefficients, "Print the sigma and beta coefficients instead");

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand(
        "verify", "Concordance report. Without a cell, runs the acceptance criteria and exits 0 iff all pass");
    ver_cmd->add_option("--cell", ver.cell, "Regime of the single cell to verify")
        ->check(CLI::IsMember({"from-origin", "inward", "to-origin", "outward"}));
    ver_cmd->add_option("--nu", ver.nu, "Bessel index of the cell");
    ver_cmd->add_option("--a", ver.a, "Start level of the cell");
    ver_cmd->add_option("--b", ver.b, "Target level of the cell");
    ver_cmd->add_option("--criteria", ver.criteria, "Subset of acceptance criteria 1..9")->delimiter(',');
    ver.grid.add(ver_cmd);
    ver.out.add(ver_cmd);
    ver.mc.add(ver_cmd);

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo empirical CDF with its DKW band");
    sim.q.add(sim_cmd);
    sim.grid.add(sim_cmd);
    sim.out.add(sim_cmd);
    sim.mc.add(sim_cmd);
    sim_cmd->add_option("--horizon", sim.horizon, "Censoring time (default: largest grid time)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*cdf_cmd) return cmd_dist(cdf_args, false, out);
        if (*surv_cmd) return cmd_dist(surv_args, true, out);
        if (*lap_cmd) return cmd_laplace(lap, out);
        if (*zer_cmd) return cmd_zeros(zer, out);
        if (*tail_cmd) return cmd_tail(tail, out);
        if (*ver_cmd) return cmd_verify(ver, out, err);
        if (*sim_cmd) return cmd_simulate(sim, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kOk;
}

}  // namespace bhit::cli
