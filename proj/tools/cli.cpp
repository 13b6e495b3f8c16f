#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hls/extremals.hpp"
#include "hls/optimize.hpp"
#include "hls/parallel.hpp"
#include "hls/verify.hpp"

namespace hls::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------- output

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

std::string csv_cell(const json& v) {
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_cell(t.columns[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
}

// non-finite doubles become null (JSON has no inf/nan)
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json table_json(const Table& t) {
    json a = json::array();
    for (const auto& row : t.rows) {
        json o = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = row[i];
        a.push_back(o);
    }
    return a;
}

// ---------------------------------------------------------------- settings

// flags > JSON config file > defaults
class Settings {
public:
    void load(const std::string& path) {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw UsageError("cannot read config file '" + path + "'");
        try {
            cfg_ = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError("config file '" + path + "': " + e.what());
        }
        if (!cfg_.is_object()) throw UsageError("config file must hold a JSON object");
    }

    template <class T>
    T get(const CLI::Option* opt, const T& flag_value, const char* key, const T& def) const {
        if (opt && opt->count() > 0) return flag_value;
        if (cfg_.contains(key)) {
            try {
                return cfg_.at(key).get<T>();
            } catch (const json::exception&) {
                throw UsageError(std::string("config key '") + key + "' has the wrong type");
            }
        }
        return def;
    }
    bool has(const CLI::Option* opt, const char* key) const { return (opt && opt->count() > 0) || cfg_.contains(key); }

private:
    json cfg_ = json::object();
};

struct Global {
    int n = 3;
    double alpha = 2;
    double p = 0, q = 0;
    std::string config, out, format = "csv";
    std::uint64_t seed = 7;
    int threads = 0;
    bool timing = false;
    CLI::Option *o_n{}, *o_alpha{}, *o_p{}, *o_q{}, *o_out{}, *o_format{}, *o_seed{}, *o_threads{}, *o_timing{};
};

struct Resolved {
    int n;
    double alpha;
    std::optional<double> p, q;
    std::string out, format;
    std::uint64_t seed;
    bool timing;
};

Resolved resolve(const Global& g, const Settings& s) {
    Resolved r;
    r.n = s.get(g.o_n, g.n, "n", 3);
    r.alpha = s.get(g.o_alpha, g.alpha, "alpha", 2.0);
    if (s.has(g.o_p, "p")) r.p = s.get(g.o_p, g.p, "p", 0.0);
    if (s.has(g.o_q, "q")) r.q = s.get(g.o_q, g.q, "q", 0.0);
    r.out = s.get(g.o_out, g.out, "out", std::string());
    r.format = s.get(g.o_format, g.format, "format", std::string("csv"));
    if (r.format != "csv" && r.format != "json") throw UsageError("--format must be csv or json");
    r.seed = s.get(g.o_seed, g.seed, "seed", std::uint64_t{7});
    r.timing = s.get(g.o_timing, g.timing, "timing", false);

    int threads = s.get(g.o_threads, g.threads, "threads", 0);
    if (!s.has(g.o_threads, "threads")) {
        if (const char* env = std::getenv("HLS_THREADS"); env && *env) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (*end != '\0' || v < 1) throw UsageError("HLS_THREADS must be a positive integer");
            threads = static_cast<int>(v);
        }
    }
    if (threads < 0) throw UsageError("--threads must be positive");
    if (threads > 0) set_threads(threads);
    return r;
}

ExponentConfig exponents_of(const Resolved& r) {
    if (r.q && !r.p) throw UsageError("--q needs --p");
    if (r.p && r.q) return general_config(r.n, r.alpha, *r.p, *r.q);
    if (r.p) return derive_exponents(r.n, r.alpha, *r.p);
    return critical_config(r.n, r.alpha);
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw UsageError("cannot write '" + path + "'");
        os_ = &file_;
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

void emit(const Resolved& r, std::ostream& fallback, const Table& t, json extra = json::object()) {
    Output o(r.out, fallback);
    if (r.format == "json") {
        extra["rows"] = table_json(t);
        o.stream() << extra.dump(2) << "\n";
    } else {
        write_csv(o.stream(), t);
    }
}

// ---------------------------------------------------------------- constant

struct ConstantOpts {
    std::string method = "all";
    int level = 24, radial = 16;
    double tol = 1e-6;
    CLI::Option *o_method{}, *o_level{}, *o_radial{}, *o_tol{};
};

struct Estimate {
    std::string method;
    double value = 0, est_error = 0, wall_ms = 0;
};

Estimate optimize_estimate(const ExponentConfig& cfg, int level, int radial, double tol, std::uint64_t seed) {
    auto run_at = [&](int lv, int ro) {
        auto S = build_sphere_mesh(cfg.n, lv);
        IntegralOperator op(S, build_ball_quadrature(cfg.n, ro, lv), cfg);
        OptimizeOptions opt;
        opt.tol = tol;
        return find_extremal(random_positive_field(S, seed), cfg, op, opt).constant_estimate;
    };
    double v = run_at(level, radial);
    double c = run_at(std::max(2, level / 2), std::max(2, radial / 2));
    return {"optimize", v, std::abs(v - c), 0};
}

int cmd_constant(const Resolved& r, const Settings& s, const ConstantOpts& co, std::ostream& out) {
    const std::string method = s.get(co.o_method, co.method, "method", std::string("all"));
    if (method != "closed_form" && method != "quadrature" && method != "optimize" && method != "all")
        throw UsageError("--method must be closed_form, quadrature, optimize or all");
    const bool alpha2 = std::abs(r.alpha - 2.0) < 1e-12;
    if (method == "closed_form" && !alpha2) throw UsageError("closed_form is only available for alpha = 2");
    // per-method defaults: the quadrature route is cheap at any n, the optimizer
    // applies dense operators once n >= 4
    const int q_level = s.get(co.o_level, co.level, "level", 24);
    const int q_radial = s.get(co.o_radial, co.radial, "radial_order", 16);
    const int o_level = s.get(co.o_level, co.level, "level", r.n <= 3 ? 16 : 8);
    const int o_radial = s.get(co.o_radial, co.radial, "radial_order", r.n <= 3 ? 12 : 8);
    const double tol = s.get(co.o_tol, co.tol, "tol", 1e-6);
    const ExponentConfig cfg = exponents_of(r);

    std::vector<Estimate> est;
    auto timed = [&](auto fn) {
        auto t0 = Clock::now();
        Estimate e = fn();
        e.wall_ms = ms_since(t0);
        est.push_back(e);
    };
    if ((method == "closed_form" || method == "all") && alpha2)
        timed([&] { return Estimate{"closed_form", closed_form_constant_alpha2(r.n), 0.0, 0}; });
    if (method == "quadrature" || method == "all")
        timed([&] {
            auto q = quadrature_constant(r.n, r.alpha, build_ball_quadrature(r.n, q_radial, q_level),
                                         build_sphere_mesh(r.n, q_level));
            return Estimate{"quadrature", q.value, q.est_error, 0};
        });
    if (method == "optimize" || method == "all")
        timed([&] { return optimize_estimate(cfg, o_level, o_radial, tol, r.seed); });

    Table t{{"n", "alpha", "method", "value", "est_error"}, {}};
    if (r.timing) t.columns.push_back("wall_ms");
    for (const auto& e : est) {
        std::vector<json> row{r.n, r.alpha, e.method, num(e.value), num(e.est_error)};
        if (r.timing) row.push_back(e.wall_ms);
        t.rows.push_back(row);
    }
    json extra = json::object();
    if (method == "all") {
        json spreads = json::array();
        for (std::size_t i = 0; i < est.size(); ++i)
            for (std::size_t j = i + 1; j < est.size(); ++j) {
                double sp = std::abs(est[i].value - est[j].value) / std::max(est[i].value, est[j].value);
                spreads.push_back({{"a", est[i].method}, {"b", est[j].method}, {"rel_spread", num(sp)}});
                if (r.format == "csv") {
                    std::vector<json> row{r.n, r.alpha, "spread:" + est[i].method + "-" + est[j].method, num(sp),
                                          nullptr};
                    if (r.timing) row.push_back(nullptr);
                    t.rows.push_back(row);
                }
            }
        extra["spreads"] = spreads;
    }
    emit(r, out, t, extra);
    return kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeCliOpts {
    int level = 16, radial = 12, max_iter = 200;
    double tol = 1e-6;
    std::string init = "random", summary;
    bool force = false, no_recenter = false;
    CLI::Option *o_level{}, *o_radial{}, *o_max_iter{}, *o_tol{}, *o_init{}, *o_summary{}, *o_force{}, *o_norec{};
};

int cmd_optimize(const Resolved& r, const Settings& s, const OptimizeCliOpts& oo, std::ostream& out,
                 std::ostream& err) {
    const int level = s.get(oo.o_level, oo.level, "level", r.n <= 3 ? 16 : 8);
    const int radial = s.get(oo.o_radial, oo.radial, "radial_order", r.n <= 3 ? 12 : 8);
    const std::string init = s.get(oo.o_init, oo.init, "init", std::string("random"));
    if (init != "random" && init != "constant") throw UsageError("--init must be random or constant");
    OptimizeOptions opt;
    opt.tol = s.get(oo.o_tol, oo.tol, "tol", 1e-6);
    opt.max_iter = s.get(oo.o_max_iter, oo.max_iter, "max_iter", 200);
    opt.force = s.get(oo.o_force, oo.force, "force", false);
    opt.recenter = !s.get(oo.o_norec, oo.no_recenter, "no_recenter", false);
    const std::string summary_path = s.get(oo.o_summary, oo.summary, "summary", std::string());
    const ExponentConfig cfg = exponents_of(r);

    auto S = build_sphere_mesh(r.n, level);
    IntegralOperator op(S, build_ball_quadrature(r.n, radial, level), cfg);
    ScalarField f0 = init == "random" ? random_positive_field(S, r.seed) : ScalarField::constant(S, 1.0);

    Table t{{"iter", "ratio", "step_residual"}, {}};
    if (r.timing) t.columns.push_back("wall_ms");
    auto t0 = Clock::now();
    opt.on_iteration = [&](const IterationRecord& rec) {
        std::vector<json> row{rec.iter, num(rec.ratio), num(rec.step_residual)};
        if (r.timing) row.push_back(ms_since(t0));
        t.rows.push_back(row);
    };
    ExtremalResult res = find_extremal(f0, cfg, op, opt);

    json summary = {{"constant_estimate", num(res.constant_estimate)},
                    {"iterations", res.history.size()},
                    {"converged", res.converged},
                    {"n", r.n},
                    {"alpha", r.alpha},
                    {"seed", r.seed}};
    if (std::abs(r.alpha - 2.0) < 1e-12 && r.n >= 3) summary["closed_form"] = closed_form_constant_alpha2(r.n);

    if (r.format == "json") {
        Output o(r.out, out);
        o.stream() << json{{"iterations", table_json(t)}, {"summary", summary}}.dump(2) << "\n";
    } else {
        {
            Output o(r.out, out);
            write_csv(o.stream(), t);
        }
        if (!summary_path.empty()) {
            Output o(summary_path, err);
            o.stream() << summary.dump(2) << "\n";
        } else {
            err << summary.dump() << "\n";
        }
    }
    return res.converged ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
    std::string mode = "alpha";
    std::vector<double> alphas{1.25, 1.5, 1.75}, lambdas{0.5, 1.0, 2.0, 5.0};
    int level = 24, radial = 16;
    double extent = 4, h = 0.25, depth = 8;
    CLI::Option *o_mode{}, *o_alphas{}, *o_lambdas{}, *o_level{}, *o_radial{}, *o_extent{}, *o_h{}, *o_depth{};
};

int cmd_sweep(const Resolved& r, const Settings& s, const SweepOpts& so, std::ostream& out) {
    const std::string mode = s.get(so.o_mode, so.mode, "mode", std::string("alpha"));
    if (mode == "alpha") {
        auto alphas = s.get(so.o_alphas, so.alphas, "alphas", std::vector<double>{1.25, 1.5, 1.75});
        if (alphas.empty()) throw UsageError("empty alpha list");
        const int level = s.get(so.o_level, so.level, "level", 24);
        const int radial = s.get(so.o_radial, so.radial, "radial_order", 16);
        auto S = build_sphere_mesh(r.n, level);
        auto B = build_ball_quadrature(r.n, radial, level);
        Table t{{"n", "alpha", "value", "est_error"}, {}};
        if (r.timing) t.columns.push_back("wall_ms");
        for (double a : alphas) {
            auto t0 = Clock::now();
            auto q = quadrature_constant(r.n, a, B, S);
            std::vector<json> row{r.n, a, num(q.value), num(q.est_error)};
            if (r.timing) row.push_back(ms_since(t0));
            t.rows.push_back(row);
        }
        emit(r, out, t);
        return kOk;
    }
    if (mode != "scaling") throw UsageError("--mode must be alpha or scaling");
    auto lambdas = s.get(so.o_lambdas, so.lambdas, "lambdas", std::vector<double>{0.5, 1.0, 2.0, 5.0});
    if (lambdas.empty()) throw UsageError("empty lambda list");
    ScalingGrid grid;
    grid.extent = s.get(so.o_extent, so.extent, "extent", grid.extent);
    grid.h = s.get(so.o_h, so.h, "spacing", grid.h);
    grid.depth = s.get(so.o_depth, so.depth, "depth", grid.depth);
    const ExponentConfig cfg = exponents_of(r);
    auto sw = scaling_sweep(cfg, BubbleParams{1.0, 1.0, Point(r.n - 1)}, lambdas, grid);
    Table t{{"lambda", "ratio"}, {}};
    for (std::size_t i = 0; i < sw.lambdas.size(); ++i) t.rows.push_back({sw.lambdas[i], num(sw.ratios[i])});
    if (r.format == "json") {
        emit(r, out, t, {{"fitted_exponent", num(sw.fitted_exponent)}, {"analytic_exponent", scaling_exponent(cfg)}});
    } else {
        t.rows.push_back({"fitted_exponent", num(sw.fitted_exponent)});
        emit(r, out, t);
    }
    return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyCliOpts {
    std::vector<std::string> names;
    bool all = false;
    double tol = 0;
    int refinement = 0;
    CLI::Option *o_names{}, *o_all{}, *o_tol{}, *o_ref{};
};

int cmd_verify(const Resolved& r, const Settings& s, const VerifyCliOpts& vo, std::ostream& out) {
    auto names = s.get(vo.o_names, vo.names, "checks", std::vector<std::string>{});
    const bool all = s.get(vo.o_all, vo.all, "all", false);
    if (all || names.empty()) names = check_names();
    for (const auto& nm : names)
        if (!is_check_name(nm)) throw UsageError("unknown check '" + nm + "'");
    VerifyOptions opt;
    opt.seed = r.seed;
    opt.refinement = s.get(vo.o_ref, vo.refinement, "refinement", 0);
    if (s.has(vo.o_tol, "tol")) opt.tol = s.get(vo.o_tol, vo.tol, "tol", 0.0);

    bool ok = true;
    json checks = json::array();
    Table t{{"check", "pass", "residual", "tolerance", "refinement", "seed"}, {}};
    if (r.timing) t.columns.push_back("wall_ms");
    for (const auto& nm : names) {
        auto t0 = Clock::now();
        CheckResult c = run_check(nm, opt);
        double ms = ms_since(t0);
        ok = ok && c.pass;
        json j = to_json(c);
        j["residual"] = num(c.residual);
        if (r.timing) j["wall_ms"] = ms;
        checks.push_back(j);
        std::vector<json> row{c.check, c.pass, num(c.residual), c.tolerance, c.refinement, c.seed};
        if (r.timing) row.push_back(ms);
        t.rows.push_back(row);
    }
    Output o(r.out, out);
    if (r.format == "json")
        o.stream() << json{{"pass", ok}, {"checks", checks}}.dump(2) << "\n";
    else
        write_csv(o.stream(), t);
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sharp HLS inequality on the upper half space: constants, extremals, checks", "hls"};
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    g.o_n = app.add_option("--n", g.n, "dimension n");
    g.o_alpha = app.add_option("--alpha", g.alpha, "order alpha, 1 < alpha < n");
    g.o_p = app.add_option("--p", g.p, "boundary exponent (default: critical)");
    g.o_q = app.add_option("--q", g.q, "volume exponent off the HLS line (needs --p)");
    app.add_option("--config", g.config, "JSON config file (flags take precedence)");
    g.o_seed = app.add_option("--seed", g.seed, "random seed");
    g.o_threads = app.add_option("--threads", g.threads, "worker threads (fallback: HLS_THREADS)");
    g.o_out = app.add_option("--out", g.out, "output path (default: stdout)");
    g.o_format = app.add_option("--format", g.format, "csv or json");
    g.o_timing = app.add_flag("--timing", g.timing, "add wall_ms columns (not reproducible)");

    ConstantOpts co;
    auto* c_constant = app.add_subcommand("constant", "sharp constant by closed form / quadrature / optimization");
    co.o_method = c_constant->add_option("--method", co.method, "closed_form, quadrature, optimize or all");
    co.o_level = c_constant->add_option("--level", co.level, "sphere mesh level");
    co.o_radial = c_constant->add_option("--radial-order", co.radial, "radial Gauss order of the ball rule");
    co.o_tol = c_constant->add_option("--tol", co.tol, "optimizer tolerance");

    OptimizeCliOpts oo;
    auto* c_opt = app.add_subcommand("optimize", "Euler-Lagrange fixed-point iteration on the ball");
    oo.o_level = c_opt->add_option("--level", oo.level, "sphere mesh level");
    oo.o_radial = c_opt->add_option("--radial-order", oo.radial, "radial Gauss order");
    oo.o_tol = c_opt->add_option("--tol", oo.tol, "stopping tolerance");
    oo.o_max_iter = c_opt->add_option("--max-iter", oo.max_iter, "iteration cap");
    oo.o_init = c_opt->add_option("--init", oo.init, "random or constant");
    oo.o_summary = c_opt->add_option("--summary", oo.summary, "path for the JSON summary (csv format)");
    oo.o_force = c_opt->add_flag("--force", oo.force, "allow non-critical exponents");
    oo.o_norec = c_opt->add_flag("--no-recenter", oo.no_recenter, "disable conformal recentering");

    SweepOpts so;
    auto* c_sweep = app.add_subcommand("sweep", "alpha table of constants or lambda scaling sweep");
    so.o_mode = c_sweep->add_option("--mode", so.mode, "alpha or scaling");
    so.o_alphas = c_sweep->add_option("--alphas", so.alphas, "alpha list")->delimiter(',');
    so.o_lambdas = c_sweep->add_option("--lambdas", so.lambdas, "lambda list")->delimiter(',');
    so.o_level = c_sweep->add_option("--level", so.level, "sphere mesh level (alpha mode)");
    so.o_radial = c_sweep->add_option("--radial-order", so.radial, "radial Gauss order (alpha mode)");
    so.o_extent = c_sweep->add_option("--extent", so.extent, "half-space box half-width at lambda = 1");
    so.o_h = c_sweep->add_option("--spacing", so.h, "grid spacing at lambda = 1");
    so.o_depth = c_sweep->add_option("--depth", so.depth, "volume depth at lambda = 1");

    VerifyCliOpts vo;
    auto* c_verify = app.add_subcommand("verify", "run named checks (all by default)");
    vo.o_names = c_verify->add_option("checks", vo.names, "check names");
    vo.o_all = c_verify->add_flag("--all", vo.all, "run every check");
    vo.o_tol = c_verify->add_option("--tol", vo.tol, "override every check tolerance");
    vo.o_ref = c_verify->add_option("--refinement", vo.refinement, "refinement level");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        Settings s;
        s.load(g.config);
        Resolved r = resolve(g, s);
        if (c_constant->parsed()) return cmd_constant(r, s, co, out);
        if (c_opt->parsed()) return cmd_optimize(r, s, oo, out, err);
        if (c_sweep->parsed()) return cmd_sweep(r, s, so, out);
        return cmd_verify(r, s, vo, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << "\n";
        return kCheckFailed;
    }
}

}  // namespace hls::cli
