#include "hls/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hls/extremals.hpp"
#include "hls/optimize.hpp"
#include "hls/sampling.hpp"
#include "hls/special.hpp"

namespace hls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_int(double x, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// point uniformly distributed in the unit ball of R^n (rejection)
Point random_in_ball(Rng& rng, int n, double radius) {
    for (;;) {
        Point x(n);
        for (int m = 0; m < n; ++m) x[m] = rng.uniform(-1.0, 1.0);
        if (x.norm2() < 1.0) return radius * x;
    }
}

Point random_direction(Rng& rng, int n) {
    for (;;) {
        Point x(n);
        for (int m = 0; m < n; ++m) x[m] = rng.normal();
        double r = x.norm();
        if (r > 1e-8) return (1.0 / r) * x;
    }
}

}  // namespace

// ---------------------------------------------------------------- harmonic

HarmonicResult check_harmonic_extension(const FieldFn& f, double h, const ExponentConfig& cfg, double extent) {
    if (std::abs(cfg.alpha - 2.0) > 1e-12) throw UnsupportedError("harmonic extension check: alpha = 2 only");
    const int n = cfg.n;
    if (n != 3) throw UnsupportedError("harmonic extension check: n = 3 only");
    auto G = build_halfspace_grids(n, extent, h, 4 * h);
    IntegralOperator op(G.boundary, G.volume, cfg);
    ScalarField fb = ScalarField::from_function(G.boundary, f);
    HarmonicResult r;
    const double finf = lp_norm(fb, kInf);
    if (finf == 0.0) return r;
    const double c = riesz_normalization(n, 2.0);

    const std::vector<Point> xs = {Point{0.0, 0.0}, Point{0.5, 0.25}, Point{-1.0, 0.75}, Point{1.5, -1.0}};
    for (const Point& xp : xs) {
        for (double z : {1.0, 1.5, 2.0}) {
            Point x{xp[0], xp[1], z};
            double lap = -2.0 * n * op.direct_sum(fb, x);
            for (int m = 0; m < n; ++m) {
                Point e(n);
                e[m] = h;
                lap += op.direct_sum(fb, x + e) + op.direct_sum(fb, x - e);
            }
            r.max_interior_laplacian = std::max(r.max_interior_laplacian, std::abs(lap / (h * h) / c));
        }
    }

    // columns: the boundary nodes nearest the sample points
    const auto& L = *G.boundary->halfspace();
    double flux_sum = 0;
    int flux_count = 0;
    for (const Point& xp : xs) {
        std::size_t j = 0;
        for (int m = n - 2; m >= 0; --m) {
            int k = static_cast<int>(std::floor((xp[m] + extent) / h));
            k = std::clamp(k, 0, L.per_axis - 1);
            j = j * L.per_axis + k;
        }
        // one-sided second order, step h/2 (all three heights get the near-field correction)
        const double dz = 0.5 * h;
        double u0 = op.evaluate_column(fb, j, 0.0), u1 = op.evaluate_column(fb, j, dz),
               u2 = op.evaluate_column(fb, j, 2 * dz);
        double d = (-3 * u0 + 4 * u1 - u2) / (2 * dz);
        double fj = fb[j];
        r.neumann_residual = std::max(r.neumann_residual, std::abs(d / (0.5 * c) + fj) / finf);
        r.neumann_residual_stated = std::max(r.neumann_residual_stated, std::abs(d / c + fj) / finf);
        if (fj > 1e-3 * finf) {
            flux_sum += -d / fj;
            ++flux_count;
        }
    }
    r.flux_constant = flux_count ? flux_sum / flux_count : 0.0;
    return r;
}

// ------------------------------------------------------------------- trace

namespace {

double trace_f(const Point& x, const Point& a) {
    double s = dist2(x, a);
    return s < 1 ? pow_int(1 - s, 4) : 0.0;
}

double trace_laplacian(const Point& x, const Point& a) {
    const int n = x.dim();
    double s = dist2(x, a);
    if (s >= 1) return 0.0;
    return -8.0 * n * pow_int(1 - s, 3) + 48.0 * s * pow_int(1 - s, 2);
}

// int over the upper half of B_1(0) of Delta f(y) |x - y|^{-1}, polar about the boundary point x
double trace_integral_polar(const Point& x, int n_theta, int n_phi, int n_radial) {
    const Point a(3);
    auto gt = gauss_legendre(n_theta, 0.0, 1.0);
    auto gr = gauss_legendre(n_radial, 0.0, 1.0);
    double total = 0;
    for (int i = 0; i < n_theta; ++i) {
        double t = gt.x[i], s = std::sqrt(1 - t * t);
        for (int k = 0; k < n_phi; ++k) {
            double phi = 2.0 * kPi * (k + 0.5) / n_phi;
            Point w{s * std::cos(phi), s * std::sin(phi), t};
            double b = dot(x, w), rho_exit = -b + std::sqrt(b * b - x.norm2() + 1.0);
            double part = 0;
            // rho^{n-1} |x-y|^{2-n} = rho for n = 3
            for (int m = 0; m < n_radial; ++m) {
                double rho = rho_exit * gr.x[m];
                part += gr.w[m] * rho * trace_laplacian(x + rho * w, a);
            }
            total += gt.w[i] * (2.0 * kPi / n_phi) * rho_exit * part;
        }
    }
    return total;
}

}  // namespace

double check_trace_representation(TraceVariant v, int samples, std::uint64_t seed, int refinement) {
    const int n = 3;
    const double C = n * unit_ball_volume(n) / 2.0;
    const double pref = 1.0 / ((2.0 - n) * C);
    const int scale = 1 << std::max(refinement, 0);
    Halton hal(2, seed);
    double worst = 0;
    if (v == TraceVariant::Interior) {
        const Point a{0.0, 0.0, 2.0};
        auto B = build_ball_quadrature(n, 16 * scale, 24 * scale, 1.0, a);
        for (int k = 0; k < samples; ++k) {
            auto u = hal.next();
            double r = 2.0 * std::sqrt(u[0]), ang = 2.0 * kPi * u[1];
            Point x{r * std::cos(ang), r * std::sin(ang), 0.0};
            double I = 0;
            for (std::size_t i = 0; i < B->size(); ++i) {
                Point y = B->point(i);
                I += B->weight(i) * trace_laplacian(y, a) / dist(x, y);
            }
            worst = std::max(worst, std::abs(trace_f(x, a) - pref * I));
        }
        return worst;
    }
    const Point a(3);
    for (int k = 0; k < samples; ++k) {
        auto u = hal.next();
        double r = 0.9 * std::sqrt(u[0]), ang = 2.0 * kPi * u[1];
        Point x{r * std::cos(ang), r * std::sin(ang), 0.0};
        double I = trace_integral_polar(x, 8 * scale, 16 * scale, 6);
        worst = std::max(worst, std::abs(trace_f(x, a) - pref * I));
    }
    return worst;
}

// ----------------------------------------------------------------- log-HLS

namespace {

ScalarField unit_mass(ScalarField f) {
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) m += f.grid()->weight(i) * f[i];
    if (!(m > 0)) throw DomainError("density with zero mass");
    for (double& v : f.mutable_values()) v /= m;
    return f;
}

// mixture of 1-3 Gaussian bumps, lowered by a random baseline and clipped at 0
ScalarField random_density(const GridPtr& g, Rng& rng, bool on_sphere) {
    const int n = g->dim();
    int k = 1 + std::min(2, static_cast<int>(3 * rng.uniform()));
    std::vector<Point> c;
    std::vector<double> s, a;
    for (int j = 0; j < k; ++j) {
        c.push_back(on_sphere ? random_direction(rng, n) : random_in_ball(rng, n, 0.8));
        s.push_back(rng.uniform(0.15, 0.6));
        a.push_back(rng.uniform(0.2, 1.0));
    }
    const double base = rng.uniform(0.0, 0.3);
    std::vector<double> v(g->size());
    double vmax = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Point x = g->point(i);
        for (int j = 0; j < k; ++j) v[i] += a[j] * std::exp(-dist2(x, c[j]) / (2 * s[j] * s[j]));
        vmax = std::max(vmax, v[i]);
    }
    for (double& x : v) x = std::max(x - base * vmax, 0.0);
    return unit_mass(ScalarField(g, std::move(v)));
}

ScalarField bump_at(const GridPtr& g, const Point& c, double width) {
    return unit_mass(ScalarField::from_function(g, [&](const Point& x) {
        return std::exp(-dist2(x, c) / (2 * width * width));
    }));
}

double slack(const LogFunctional& L) { return L.rhs - L.lhs; }

}  // namespace

LogHlsResult check_log_hls(int n, int trials, std::uint64_t seed, const LogHlsResolution& res) {
    if (trials < 0) throw ValidationError("log-HLS check: trials must be >= 0");
    auto S = build_sphere_mesh(n, res.sphere_level);
    auto B = build_ball_quadrature(n, res.radial_order, res.sphere_level);
    IntegralOperator op(S, B, n, Kernel::log());
    LogHlsResult out;

    auto U = log_functional(unit_mass(ScalarField::constant(S, 1.0)), unit_mass(ScalarField::constant(B, 1.0)), op);
    out.uniform_slack = slack(U);
    out.min_slack = out.uniform_slack;
    out.min_slack_stated = U.rhs - U.lhs_stated;

    Rng rng(seed);
    for (int k = 0; k < trials; ++k) {
        ScalarField F = random_density(S, rng, true);
        ScalarField G = random_density(B, rng, false);
        auto L = log_functional(F, G, op);
        out.min_slack = std::min(out.min_slack, slack(L));
        out.min_slack_stated = std::min(out.min_slack_stated, L.rhs - L.lhs_stated);
    }

    Point pole(n), inner(n);
    pole[n - 1] = 1.0;
    inner[n - 1] = 1.0;
    out.widths = {0.8, 0.5, 0.35, 0.25};
    for (double w : out.widths)
        out.concentration_slack.push_back(slack(log_functional(bump_at(S, pole, w), bump_at(B, inner, w), op)));
    bool up = true, down = true;
    for (std::size_t i = 1; i < out.concentration_slack.size(); ++i) {
        up = up && out.concentration_slack[i] > out.concentration_slack[i - 1];
        down = down && out.concentration_slack[i] < out.concentration_slack[i - 1];
    }
    out.trend = up ? 1 : (down ? -1 : 0);
    return out;
}

// ------------------------------------------------------------------- Young

YoungResult check_young(double p, double q, double r, int trials, std::uint64_t seed, const HalfSpaceGrids& grids,
                        double tol) {
    if (!(p >= 1) || !(q >= 1) || !(r >= 1)) throw ValidationError("Young check: exponents must be >= 1");
    const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
    if (std::abs(1.0 / p + 1.0 / q - 1.0 - inv_r) > 1e-12)
        throw ValidationError("Young check: exponents must satisfy 1/p + 1/q = 1 + 1/r");
    const auto* L = grids.volume ? grids.volume->halfspace() : nullptr;
    if (!L) throw ValidationError("Young check: needs half-space grids with a volume");
    const int n = grids.volume->dim();

    auto profile = [](double r2) { return std::exp(-std::sqrt(r2)); };
    LatticeConvolution conv(grids, profile);
    // lattice norms of g over all differences x - y_k
    const double wb = std::pow(L->h, n - 1);
    const std::size_t per_level = conv.table().size() / conv.levels();
    double gq = 0, gtq = 0;
    for (int i = 0; i < conv.levels(); ++i)
        for (std::size_t d = 0; d < per_level; ++d)
            gq += wb * L->height_weights[i] * std::pow(conv.table()[i * per_level + d], q);
    const int W = conv.width(), N = L->per_axis;
    for (std::size_t d = 0; d < per_level; ++d) {
        double r2 = 0;
        std::size_t rem = d;
        for (int m = 0; m < n - 1; ++m) {
            double o = static_cast<double>(static_cast<int>(rem % W) - (N - 1)) * L->h;
            r2 += o * o;
            rem /= W;
        }
        gtq += wb * std::pow(profile(r2), q);
    }
    const double g_norm = std::pow(gq, 1.0 / q), gt_norm = std::pow(gtq, 1.0 / q);
    const double qr = q * inv_r;
    const double g_factor = std::pow(g_norm, qr) * std::pow(gt_norm, 1.0 - qr);

    YoungResult out;
    out.holds = true;
    Rng rng(seed);
    auto take = [&](double lhs, double rhs) {
        double ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0);
        if (ratio >= out.max_ratio) out.lhs = lhs, out.rhs = rhs, out.max_ratio = ratio;
        if (!(lhs <= rhs * (1 + tol))) out.holds = false;
    };
    for (int k = 0; k < trials; ++k) {
        std::vector<double> h(grids.boundary->size());
        for (double& x : h) x = rng.uniform();
        ScalarField hf(grids.boundary, h);
        ScalarField gh(grids.volume, conv.apply(h));
        take(lp_norm(gh, r), lp_norm(hf, p) * g_factor);
    }
    if (trials == 0) take(0.0, 0.0);
    return out;
}

// --------------------------------------------------------- symmetrization

SymmetrizationResult check_symmetrization(const ScalarField& f, const ExponentConfig& cfg, const IntegralOperator& op,
                                          double tol) {
    SymmetrizationResult r;
    r.ratio_f = operator_ratio(f, cfg, op);
    r.ratio_fstar = operator_ratio(rearrange_decreasing(f), cfg, op);
    r.improved = r.ratio_fstar >= r.ratio_f * (1 - tol);
    return r;
}

}  // namespace hls
