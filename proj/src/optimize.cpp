#include "hls/optimize.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hls/conformal.hpp"
#include "hls/sampling.hpp"
#include "hls/special.hpp"

namespace hls {

namespace {

void check_positive(const ScalarField& f, const char* what) {
    for (double v : f.values())
        if (!(v > 0) || !std::isfinite(v)) throw DomainError(std::string(what) + ": field must be positive and finite");
}

ScalarField normalized(ScalarField f, double p) {
    double nrm = lp_norm(f, p);
    if (!(nrm > 0) || !std::isfinite(nrm)) throw ConvergenceError("field norm is zero or not finite");
    for (double& v : f.mutable_values()) v /= nrm;
    return f;
}

double diff_norm(const ScalarField& a, const ScalarField& b, double p) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return lp_norm(ScalarField(a.grid(), std::move(d)), p);
}

// ||d - P d||_p with P the weighted L^2 projection onto span{f x_j}: the
// tangent of the conformal orbit at a (near-)centred field. What is left is
// the part of the step that is not a slide along the orbit.
double orbit_quotient_norm(const ScalarField& next, const ScalarField& f, double p) {
    const auto& G = *f.grid();
    const int n = G.dim();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        d[i] = next[i] - f[i];
        Point x = G.point(i);
        const double w = G.weight(i);
        for (int j = 0; j < n; ++j) {
            b(j) += w * f[i] * x[j] * d[i];
            for (int k = 0; k < n; ++k) A(j, k) += w * f[i] * f[i] * x[j] * x[k];
        }
    }
    Eigen::VectorXd c = A.ldlt().solve(b);
    for (std::size_t i = 0; i < f.size(); ++i) {
        Point x = G.point(i);
        for (int j = 0; j < n; ++j) d[i] -= c(j) * f[i] * x[j];
    }
    return lp_norm(ScalarField(f.grid(), std::move(d)), p);
}

}  // namespace

ScalarField euler_lagrange_step(const ScalarField& f, const ExponentConfig& cfg, const IntegralOperator& op) {
    check_positive(f, "euler_lagrange_step");
    ScalarField Ef = op.extend(f);
    for (double& v : Ef.mutable_values()) {
        if (!(v > 0)) throw ConvergenceError("euler_lagrange_step: nonpositive extension value");
        v = std::pow(v, cfg.q - 1.0);
    }
    ScalarField g = op.restrict(Ef);
    for (double& v : g.mutable_values()) {
        if (!(v > 0)) throw ConvergenceError("euler_lagrange_step: nonpositive restriction value");
        v = std::pow(v, 1.0 / (cfg.p - 1.0));
    }
    return normalized(std::move(g), cfg.p);
}

ScalarField random_positive_field(const GridPtr& grid, std::uint64_t seed, double lo, double hi) {
    if (!(lo > 0) || !(hi >= lo)) throw ValidationError("random field: need 0 < lo <= hi");
    Rng rng(seed);
    std::vector<double> v(grid->size());
    for (double& x : v) x = rng.uniform(lo, hi);
    return ScalarField(grid, std::move(v));
}

Point weighted_barycenter(const ScalarField& f, double p) {
    const auto& G = *f.grid();
    Point b(G.dim());
    double mass = 0;
    for (std::size_t i = 0; i < G.size(); ++i) {
        double m = G.weight(i) * std::pow(std::abs(f[i]), p);
        b = b + m * G.point(i);
        mass += m;
    }
    if (!(mass > 0)) throw DomainError("barycenter of a zero field");
    return (1.0 / mass) * b;
}

double interpolate_sphere(const ScalarField& f, const Point& x) {
    const SphereLayout* S = f.grid()->sphere();
    if (!S) throw ValidationError("interpolate_sphere: field must live on a sphere mesh");
    const int n = f.grid()->dim();
    if (n != 2 && n != 3) throw UnsupportedError("interpolate_sphere: n = 2 or 3");
    const int M = S->n_phi;
    const double phi = std::atan2(x[1], x[0]);
    // azimuth nodes sit at 2 pi (k + 1/2) / M
    double u = phi / (2.0 * kPi) * M - 0.5;
    u -= M * std::floor(u / M);
    int k0 = static_cast<int>(std::floor(u)) % M;
    int k1 = (k0 + 1) % M;
    double s = u - std::floor(u);
    auto ring = [&](int a) { return (1 - s) * f[a * M + k0] + s * f[a * M + k1]; };
    if (n == 2) return ring(0);

    const double t = std::clamp(x[2] / x.norm(), -1.0, 1.0);
    const int A = S->n_outer;
    std::vector<double> nodes(A);
    for (int a = 0; a < A; ++a) nodes[a] = S->unit_nodes[a * M][2];
    if (t <= nodes.front()) return ring(0);
    if (t >= nodes.back()) return ring(A - 1);
    int a = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin()) - 1;
    double r = (t - nodes[a]) / (nodes[a + 1] - nodes[a]);
    return (1 - r) * ring(a) + r * ring(a + 1);
}

ScalarField recenter(const ScalarField& f, const ExponentConfig& cfg) {
    const auto& G = *f.grid();
    const SphereLayout* S = G.sphere();
    if (!S || std::abs(S->radius - 1.0) > 1e-14 || S->center.norm() > 0)
        throw ValidationError("recenter: field must live on the unit sphere");
    const int n = G.dim();
    const double p = cfg.p;
    std::vector<double> m(G.size());
    double mass = 0;
    for (std::size_t i = 0; i < G.size(); ++i) mass += (m[i] = G.weight(i) * std::pow(f[i], p));

    // barycenter of the pulled-back measure: sum m phi_{-a}(y)
    auto B = [&](const Point& a) {
        Point na = -1.0 * a, s(n);
        for (std::size_t i = 0; i < G.size(); ++i) s = s + m[i] * ball_automorphism(na, G.point(i));
        return (1.0 / mass) * s;
    };
    Point a(n);
    const double slope = 2.0 * (1.0 - 1.0 / n);  // dB/da at a = 0 for the uniform measure
    for (int it = 0; it < 500; ++it) {
        Point b = B(a);
        if (b.norm() < 1e-12) break;
        a = a - (0.5 / slope) * b;
        if (a.norm() > 0.98) a = (0.98 / a.norm()) * a;
    }
    const double k = cfg.bubble_power();
    std::vector<double> g(G.size());
    for (std::size_t i = 0; i < G.size(); ++i) {
        Point x = G.point(i);
        g[i] = std::pow(ball_automorphism_factor(a, x), k) * interpolate_sphere(f, ball_automorphism(a, x));
    }
    return ScalarField(f.grid(), std::move(g));
}

ScalarField pull_back_to_halfspace(const ScalarField& f, const ExponentConfig& cfg, const GridPtr& boundary) {
    const int n = cfg.n;
    if (boundary->kind() != DomainKind::HalfSpaceBoundary || boundary->dim() != n)
        throw ValidationError("pull_back_to_halfspace: needs a half-space boundary grid");
    KelvinMap m = halfspace_ball_map(n, 2.0, cfg.boundary_weight());
    const Point shift = image_ball_center(m);
    return ScalarField::from_function(boundary, [&](const Point& y) {
        Point z = kelvin_point(m, y) - shift;
        return std::pow(m.lambda / dist(y, m.center), m.mu) * interpolate_sphere(f, z);
    });
}

ExtremalResult find_extremal(const ScalarField& init, const ExponentConfig& cfg, const IntegralOperator& op,
                             const OptimizeOptions& opt) {
    if (!opt.force && !is_critical(cfg, 1e-10))
        throw ValidationError("find_extremal: exponents are not critical (use force to override)");
    if (!(opt.tol > 0) || opt.max_iter < 1) throw ValidationError("find_extremal: need tol > 0 and max_iter >= 1");
    check_positive(init, "find_extremal");
    const bool can_recenter = opt.recenter && op.boundary()->sphere() && op.boundary()->dim() <= 3;

    ExtremalResult res{normalized(init, cfg.p), {}, false, 0};
    double prev_ratio = NAN;
    for (int k = 0; k < opt.max_iter; ++k) {
        IterationRecord rec;
        rec.iter = k;
        rec.ratio = operator_ratio(res.f, cfg, op);
        if (!std::isfinite(rec.ratio)) {
            std::string dump;
            for (const auto& h : res.history) dump += " " + std::to_string(h.ratio);
            throw ConvergenceError("find_extremal: ratio diverged at iteration " + std::to_string(k) +
                                   "; history:" + dump);
        }
        ScalarField next = euler_lagrange_step(res.f, cfg, op);
        rec.raw_step_residual = diff_norm(next, res.f, cfg.p);
        rec.step_residual = can_recenter ? orbit_quotient_norm(next, res.f, cfg.p) : rec.raw_step_residual;
        const bool done = std::isfinite(prev_ratio) && std::abs(rec.ratio - prev_ratio) < opt.tol &&
                          rec.step_residual <= 10.0 * opt.tol;
        prev_ratio = rec.ratio;
        if (done) {
            res.history.push_back(rec);
            if (opt.on_iteration) opt.on_iteration(rec);
            res.converged = true;
            break;
        }
        if (can_recenter && weighted_barycenter(next, cfg.p).norm() > opt.recenter_threshold) {
            next = normalized(recenter(next, cfg), cfg.p);
            rec.recentered = true;
            prev_ratio = NAN;  // the ratio jumps with the interpolation
        }
        res.history.push_back(rec);
        if (opt.on_iteration) opt.on_iteration(rec);
        res.f = std::move(next);
    }
    res.constant_estimate = res.history.back().ratio;
    return res;
}

ScalingSweep scaling_sweep(const ExponentConfig& cfg, const BubbleParams& params, const std::vector<double>& lambdas,
                           const ScalingGrid& grid, const RegularizationSchedule& reg) {
    validate(params);
    ScalingSweep out;
    for (double lam : lambdas) {
        if (!(lam > 0)) throw ValidationError("scaling sweep: lambdas must be positive");
        auto G = build_halfspace_grids(cfg.n, lam * grid.extent, lam * grid.h, lam * grid.depth);
        IntegralOperator op(G.boundary, G.volume, cfg, reg);
        ScalarField f = ScalarField::from_function(G.boundary, [&](const Point& y) {
            return bubble_value(params, cfg, (1.0 / lam) * y);
        });
        double r = operator_ratio(f, cfg, op);
        if (std::isfinite(r) && r > 0) {
            out.lambdas.push_back(lam);
            out.ratios.push_back(r);
        }
    }
    const std::size_t m = out.lambdas.size();
    if (m < 2) throw ValidationError("scaling sweep: fewer than 2 valid points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::log(out.lambdas[i]), y = std::log(out.ratios[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    double den = m * sxx - sx * sx;
    if (!(den > 0)) throw ValidationError("scaling sweep: lambdas must not all coincide");
    out.fitted_exponent = (m * sxy - sx * sy) / den;
    return out;
}

}  // namespace hls
