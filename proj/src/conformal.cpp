#include "hls/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "hls/operators.hpp"
#include "hls/sampling.hpp"
#include "hls/special.hpp"

namespace hls {

void validate(const KelvinMap& m) {
    if (!(m.lambda > 0)) throw ValidationError("Kelvin map: lambda must be positive");
    if (m.center.dim() < 2) throw ValidationError("Kelvin map: center must be a point of R^n, n >= 2");
}

Point kelvin_point(const KelvinMap& m, const Point& xi) {
    validate(m);
    Point d = xi - m.center;
    double r2 = d.norm2();
    if (r2 == 0.0) throw DomainError("kelvin_point: point is the inversion center");
    return m.center + (m.lambda * m.lambda / r2) * d;
}

double kelvin_field_value(const KelvinMap& m, const FieldFn& f, const Point& xi) {
    Point y = kelvin_point(m, xi);
    return std::pow(m.lambda / dist(xi, m.center), m.mu) * f(y);
}

KelvinMap halfspace_ball_map(int n, double lambda, double mu, const Point& x0p) {
    KelvinMap m;
    m.center = Point(n);
    for (int i = 0; i < n - 1 && i < x0p.dim(); ++i) m.center[i] = x0p[i];
    m.center[n - 1] = -lambda;
    m.lambda = lambda;
    m.mu = mu;
    validate(m);
    return m;
}

Point image_ball_center(const KelvinMap& m) {
    Point c = m.center;
    c[c.dim() - 1] += 0.5 * m.lambda;
    return c;
}

double image_ball_radius(const KelvinMap& m) { return 0.5 * m.lambda; }

NormPair norm_invariance_check(const FieldFn& f, const KelvinMap& m, const ExponentConfig& cfg,
                               const NormResolution& res) {
    validate(m);
    if (!is_critical(cfg, 1e-10)) throw ValidationError("norm invariance holds only at critical exponents");
    if (std::abs(m.mu - cfg.boundary_weight()) > 1e-12)
        throw ValidationError("norm invariance: boundary L^p needs mu = n + alpha - 2");
    const int n = cfg.n;
    if (m.center.dim() != n || std::abs(m.center.last() + m.lambda) > 1e-12 * m.lambda)
        throw ValidationError("norm invariance: map must be centred at (x0', -lambda)");

    NormPair out;
    auto B = build_halfspace_boundary(n, res.extent, res.h);
    out.halfspace = lp_norm(ScalarField::from_function(B, f), cfg.p);
    auto S = build_sphere_mesh(n, res.sphere_level, image_ball_radius(m), image_ball_center(m));
    out.ball = lp_norm(ScalarField::from_function(S, [&](const Point& z) {
        Point y = kelvin_point(m, z);
        y[n - 1] = 0.0;  // the image sphere lands on the boundary plane
        return std::pow(m.lambda / dist(z, m.center), m.mu) * f(y);
    }), cfg.p);
    return out;
}

double p_kernel(const Point& x, double lambda, const Point& xi, const Point& eta, const ExponentConfig& cfg) {
    if (!(lambda > 0)) throw ValidationError("p_kernel: lambda must be positive");
    const double tol = 1e-12 * lambda;
    double rx = dist(xi, x), re = dist(eta, x);
    if (rx < lambda - tol || re < lambda - tol) throw DomainError("p_kernel: points must lie outside the inversion ball");
    if (dist2(xi, eta) == 0.0) throw DomainError("p_kernel: xi = eta");
    KelvinMap m{x, lambda, 0.0};
    Point xs = kelvin_point(m, xi);
    const double b = cfg.beta();
    double v = std::pow(dist(xi, eta), -b) - std::pow(lambda / rx, b) * std::pow(dist(xs, eta), -b);
    // on the inversion sphere the two terms coincide
    if (std::abs(rx - lambda) <= tol) return 0.0;
    return v;
}

Point ball_automorphism(const Point& a, const Point& x) {
    double a2 = a.norm2();
    Point d = x - a;
    double den = 1.0 - 2.0 * dot(x, a) + a2 * x.norm2();
    return (1.0 / den) * ((1.0 - a2) * d - d.norm2() * a);
}

double ball_automorphism_factor(const Point& a, const Point& x) {
    double a2 = a.norm2();
    return (1.0 - a2) / (1.0 - 2.0 * dot(x, a) + a2 * x.norm2());
}

double polar_halfspace_integral(const Point& c, double beta, const FieldFn& F, const PolarResolution& res,
                                const Point* excl_center, double excl_radius, const Point* focus) {
    const int n = c.dim();
    if (n != 2 && n != 3) throw UnsupportedError("polar quadrature: n = 2 or 3");
    if (excl_center && dist(c, *excl_center) <= excl_radius)
        throw DomainError("polar quadrature: center lies in the excluded ball");

    std::vector<Point> dirs;
    std::vector<double> dw;
    if (n == 3) {
        auto gt = gauss_legendre(res.n_theta, 0.0, 1.0);
        for (int a = 0; a < res.n_theta; ++a) {
            double t = gt.x[a], s = std::sqrt(1.0 - t * t);
            for (int k = 0; k < res.n_phi; ++k) {
                double phi = 2.0 * kPi * (k + 0.5) / res.n_phi;
                dirs.push_back(Point{s * std::cos(phi), s * std::sin(phi), t});
                dw.push_back(gt.w[a] * 2.0 * kPi / res.n_phi);
            }
        }
    } else {
        auto gt = gauss_legendre(res.n_theta, 0.0, kPi);
        for (int a = 0; a < res.n_theta; ++a) {
            dirs.push_back(Point{std::cos(gt.x[a]), std::sin(gt.x[a])});
            dw.push_back(gt.w[a]);
        }
    }
    const auto gu = gauss_legendre(res.n_radial, 0.0, 1.0);
    const double p = n - 1 - beta;  // radial weight rho^{n-1} |rho|^{-beta}

    auto finite = [&](const Point& w, double len) {
        // rho = len u^2 softens the rho^{n-1-beta} endpoint
        double s = 0;
        for (int k = 0; k < res.n_radial; ++k) {
            double u = gu.x[k], rho = len * u * u;
            s += gu.w[k] * 2.0 * len * u * std::pow(rho, p) * F(c + rho * w);
        }
        return s;
    };
    auto tail = [&](const Point& w, double start) {
        double s = 0;
        for (int k = 0; k < res.n_radial; ++k) {
            double u = gu.x[k], q = u / (1.0 - u);
            double rho = start + res.scale * q * q;
            double jac = res.scale * 2.0 * u / std::pow(1.0 - u, 3);
            s += gu.w[k] * jac * std::pow(rho, p) * F(c + rho * w);
        }
        return s;
    };

    double total = 0;
    for (std::size_t a = 0; a < dirs.size(); ++a) {
        const Point& w = dirs[a];
        double part;
        bool split = false;
        double r1 = 0, r2 = 0;
        if (excl_center) {
            Point dc = c - *excl_center;
            double b = dot(w, dc), cc = dc.norm2() - excl_radius * excl_radius;
            double disc = b * b - cc;
            if (disc > 0 && -b > 0) {
                double sq = std::sqrt(disc);
                r1 = -b - sq;
                r2 = -b + sq;
                split = true;
            }
        }
        if (split) {
            part = finite(w, r1) + tail(w, r2);
        } else if (focus) {
            // break at the closest approach to the focus, where F may be rough
            double b = dot(w, *focus - c);
            part = b > 0 ? finite(w, b) + tail(w, b) : tail(w, 0.0);
        } else {
            part = tail(w, 0.0);
        }
        total += dw[a] * part;
    }
    return total;
}

KelvinPair bubble_pair(const ExponentConfig& cfg, double d, const Point& y0p, const PolarResolution& res) {
    const int n = cfg.n;
    const double b = cfg.beta(), kappa = cfg.kappa;
    KelvinPair pr;
    pr.v = [n, d, b, y0p](const Point& x) {
        double r2 = 0;
        for (int i = 0; i < n - 1; ++i) {
            double o = y0p.dim() > i ? y0p[i] : 0.0;
            r2 += (x[i] - o) * (x[i] - o);
        }
        double z = x[n - 1] + d;
        return std::pow(r2 + z * z, -0.5 * b);
    };
    FieldFn v = pr.v;
    pr.u = [v, b, kappa, res](const Point& xi) {
        return polar_halfspace_integral(xi, b, [&](const Point& eta) { return std::pow(v(eta), kappa); }, res);
    };
    return pr;
}

namespace {

// boundary samples xi with |xi' - x'| in [rmin, rmax] (Halton in annulus coordinates)
std::vector<Point> boundary_annulus(int n, const Point& x, double rmin, double rmax, int count, std::uint64_t seed) {
    Halton hal(2, seed);
    std::vector<Point> out;
    for (int k = 0; k < count; ++k) {
        auto h = hal.next();
        double r = rmin + (rmax - rmin) * h[0];
        Point xi(n);
        if (n == 2) {
            xi[0] = x[0] + (h[1] < 0.5 ? -r : r);
        } else {
            double a = 2.0 * kPi * h[1];
            xi[0] = x[0] + r * std::cos(a);
            xi[1] = x[1] + r * std::sin(a);
        }
        out.push_back(xi);
    }
    return out;
}

}  // namespace

KelvinResidual kelvin_identity_residual(const KelvinPair& uv, const KelvinMap& m, const ExponentConfig& cfg,
                                        const PolarResolution& res, int samples, std::uint64_t seed,
                                        double tau1_shift) {
    validate(m);
    const int n = cfg.n;
    if (m.center.dim() != n || std::abs(m.center.last()) > 1e-14)
        throw ValidationError("Kelvin identities: the center must lie on the boundary");
    const double lam = m.lambda, b = cfg.beta(), kappa = cfg.kappa, tau1 = cfg.tau1 + tau1_shift;
    const Point& x = m.center;
    PolarResolution fine = res;
    fine.scale = std::min(res.scale, lam);

    auto weight = [&](const Point& eta) { return lam / dist(eta, x); };
    auto v_kelvin = [&](const Point& eta) { return std::pow(weight(eta), m.mu) * uv.v(kelvin_point(m, eta)); };
    auto u_kelvin = [&](const Point& xi) {
        Point y = kelvin_point(m, xi);
        y[n - 1] = 0.0;
        return std::pow(weight(xi), m.mu) * uv.u(y);
    };
    // the transformed density of the right-hand sides
    auto rhs_density = [&](const Point& eta) {
        return std::pow(weight(eta), tau1) * std::pow(v_kelvin(eta), kappa);
    };

    KelvinResidual out;
    out.seed = seed;
    out.sample_count = samples;

    for (const Point& xi : boundary_annulus(n, x, 0.3 * lam, 3.0 * lam, samples, seed)) {
        double L = u_kelvin(xi);
        double R = polar_halfspace_integral(xi, b, rhs_density, fine, nullptr, 0.0, &x);
        out.res_K1 = std::max(out.res_K1, std::abs(L - R) / std::abs(L));
    }

    for (const Point& xi : boundary_annulus(n, x, 1.5 * lam, 4.0 * lam, samples, seed + 1)) {
        double uk = u_kelvin(xi), u = uv.u(xi);
        const double rx = dist(xi, x);
        const Point xs = kelvin_point(m, xi);
        // P / |xi - eta|^{-beta} times the bracket
        auto density = [&](const Point& eta) {
            double ratio = std::pow(lam / rx, b) * std::pow(dist(xi, eta) / dist(xs, eta), b);
            return (1.0 - ratio) * (rhs_density(eta) - std::pow(uv.v(eta), kappa));
        };
        double R = polar_halfspace_integral(xi, b, density, fine, &x, lam);
        out.res_K3 = std::max(out.res_K3, std::abs((uk - u) - R) / (std::abs(uk) + std::abs(u)));
    }
    return out;
}

nlohmann::json residual_report(const KelvinResidual& r, const KelvinMap& m, const ExponentConfig& cfg) {
    nlohmann::json a = {{"identity", "K1"},       {"lambda", m.lambda},          {"n", cfg.n},
                        {"alpha", cfg.alpha},     {"max_rel_residual", r.res_K1}, {"sample_count", r.sample_count},
                        {"seed", r.seed}};
    nlohmann::json b = a;
    b["identity"] = "K3";
    b["max_rel_residual"] = r.res_K3;
    return nlohmann::json::array({a, b});
}

}  // namespace hls
