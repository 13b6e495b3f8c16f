#include "hls/extremals.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "hls/special.hpp"

namespace hls {

void validate(const BubbleParams& b) {
    if (!(b.c > 0)) throw ValidationError("bubble: amplitude c must be positive");
    if (!(b.d > 0)) throw ValidationError("bubble: width d must be positive");
}

double bubble_value(const BubbleParams& b, const ExponentConfig& cfg, const Point& y) {
    const int m = cfg.n - 1;
    if (y.dim() != m && y.dim() != cfg.n) throw ValidationError("bubble_value: point dimension mismatch");
    if (y.dim() == cfg.n && std::abs(y.last()) > 1e-12) throw DomainError("bubble_value: point is not on the boundary");
    double r2 = 0;
    for (int i = 0; i < m; ++i) {
        double c0 = b.y0.dim() > i ? b.y0[i] : 0.0;
        r2 += (y[i] - c0) * (y[i] - c0);
    }
    return b.c * std::pow(r2 + b.d * b.d, -cfg.bubble_power());
}

double closed_form_constant_alpha2(int n) {
    if (n < 3) throw UnsupportedError("closed form constant needs n >= 3");
    const double wn = unit_ball_volume(n);
    return std::pow(n, (n - 2.0) / (2.0 * (n - 1))) * std::pow(wn, 1.0 - 1.0 / n - 1.0 / (2.0 * (n - 1)));
}

namespace {

const SphereLayout& sphere_layout(const GridPtr& sphere) {
    const auto* S = sphere ? sphere->sphere() : nullptr;
    if (!S) throw ValidationError("expected a sphere mesh");
    return *S;
}

double interior_radius(const Point& xi, const SphereLayout& S) {
    double r = dist(xi, S.center);
    if (!(r < S.radius * (1 - 1e-14))) throw DomainError("sphere potential: point is not inside the sphere");
    return r;
}

}  // namespace

double sphere_potential(const Point& xi, const ExponentConfig& cfg, const GridPtr& sphere,
                        const RegularizationSchedule& reg) {
    const auto& S = sphere_layout(sphere);
    double r = interior_radius(xi, S);
    Kernel k = Kernel::riesz(cfg.beta(), reg);
    if (k.exact()) return shell_potential(k, cfg.n, S.radius, r / S.radius);
    double s = 0;
    for (std::size_t i = 0; i < sphere->size(); ++i) s += sphere->weight(i) * k(dist2(xi, sphere->point(i)));
    return s;
}

double sphere_potential_mesh(const Point& xi, const ExponentConfig& cfg, const GridPtr& sphere) {
    interior_radius(xi, sphere_layout(sphere));
    double s = 0;
    for (std::size_t i = 0; i < sphere->size(); ++i)
        s += sphere->weight(i) * std::pow(dist2(xi, sphere->point(i)), -0.5 * cfg.beta());
    return s;
}

double quadrature_constant_value(int n, double alpha, const GridPtr& ball, const GridPtr& sphere,
                                 const RegularizationSchedule& reg) {
    const auto cfg = critical_config(n, alpha);
    const auto* B = ball ? ball->ball() : nullptr;
    const auto& S = sphere_layout(sphere);
    if (!B) throw ValidationError("quadrature constant: expected a ball quadrature");
    if (ball->dim() != n || sphere->dim() != n) throw ValidationError("quadrature constant: dimension mismatch");
    if (std::abs(B->sphere.radius - 1.0) > 1e-14 || std::abs(S.radius - 1.0) > 1e-14)
        throw ValidationError("quadrature constant: unit ball and sphere required");

    // inner potential at every ball node
    std::vector<double> phi(ball->size());
    Kernel k = Kernel::riesz(cfg.beta(), reg);
    if (k.exact()) {
        // equals the near-field corrected extension of the constant 1, which is
        // the shell potential at each radial node
        const std::size_t n_ang = B->sphere.unit_nodes.size();
        for (std::size_t i = 0; i < B->radial_nodes.size(); ++i) {
            double v = shell_potential(k, n, 1.0, B->radial_nodes[i]);
            std::fill(phi.begin() + i * n_ang, phi.begin() + (i + 1) * n_ang, v);
        }
    } else {
        IntegralOperator op(sphere, ball, cfg, reg);
        auto e = op.extend(ScalarField::constant(sphere, 1.0));
        std::copy(e.values().begin(), e.values().end(), phi.begin());
    }
    // power sum in log space so alpha close to n does not overflow
    double lmax = -1e300;
    for (double v : phi) lmax = std::max(lmax, std::log(v));
    double s = 0;
    for (std::size_t x = 0; x < phi.size(); ++x) s += ball->weight(x) * std::exp(cfg.q * (std::log(phi[x]) - lmax));
    const double log_outer = lmax + std::log(s) / cfg.q;
    const double area = sphere->total_weight();
    return std::exp(-(n + alpha - 2.0) / (2.0 * (n - 1)) * std::log(area) + log_outer);
}

QuadratureConstant quadrature_constant(int n, double alpha, const GridPtr& ball, const GridPtr& sphere,
                                       const RegularizationSchedule& reg) {
    QuadratureConstant r;
    r.value = quadrature_constant_value(n, alpha, ball, sphere, reg);
    const auto* B = ball->ball();
    int order = static_cast<int>(B->radial_nodes.size());
    int level = sphere->sphere()->level;
    auto cb = build_ball_quadrature(n, std::max(1, order / 2), std::max(1, level / 2));
    auto cs = build_sphere_mesh(n, std::max(1, level / 2));
    r.coarse_value = quadrature_constant_value(n, alpha, cb, cs, reg);
    r.est_error = std::abs(r.value - r.coarse_value);
    r.converged = r.est_error <= 1e-3 * std::abs(r.value);
    return r;
}

double euler_lagrange_amplitude(const ExponentConfig& cfg, const IntegralOperator& ball_op) {
    const auto& S = ball_op.boundary();
    auto e = ball_op.extend(ScalarField::constant(S, 1.0));
    auto& ev = e.mutable_values();
    for (double& v : ev) v = std::pow(v, cfg.q - 1.0);
    auto r = ball_op.restrict(e);
    double mean = 0;
    for (std::size_t i = 0; i < r.size(); ++i) mean += S->weight(i) * r[i];
    mean /= S->total_weight();
    return std::pow(mean, -1.0 / (cfg.q - cfg.p));
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct FitData {
    int m = 0;  // n-1
    double gamma = 0;
    std::vector<Point> y;
    std::vector<double> w, f;
    double fnorm2 = 0;
};

// model in log space: ln c - gamma ln(|y-y0|^2 + d^2); theta = (ln c, ln d, y0)
void log_model(const FitData& D, const Vec& th, std::size_t k, double& lb, double* grad) {
    const double d2 = std::exp(2 * th[1]);
    double r2 = 0;
    for (int i = 0; i < D.m; ++i) r2 += (D.y[k][i] - th[2 + i]) * (D.y[k][i] - th[2 + i]);
    const double den = r2 + d2;
    lb = th[0] - D.gamma * std::log(den);
    grad[0] = 1.0;
    grad[1] = -D.gamma * 2.0 * d2 / den;
    for (int i = 0; i < D.m; ++i) grad[2 + i] = 2.0 * D.gamma * (D.y[k][i] - th[2 + i]) / den;
}

// residual r and Jacobian J; linear=false fits logs, linear=true fits values
void residuals(const FitData& D, const Vec& th, bool linear, Vec& r, Mat& J) {
    const std::size_t K = D.f.size();
    r.resize(K);
    J.resize(K, th.size());
    const double scale = linear ? 1.0 / std::sqrt(D.fnorm2) : 1.0;
    for (std::size_t k = 0; k < K; ++k) {
        double lb, grad[2 + kMaxDim];
        log_model(D, th, k, lb, grad);
        for (Eigen::Index i = 0; i < th.size(); ++i) J(k, i) = grad[i];
        const double sw = std::sqrt(D.w[k]);
        if (linear) {
            double b = std::exp(lb);
            r[k] = sw * (b - D.f[k]) * scale;
            J.row(k) *= sw * b * scale;
        } else {
            r[k] = sw * (lb - std::log(D.f[k]));
            J.row(k) *= sw;
        }
    }
}

int levenberg_marquardt(const FitData& D, Vec& th, bool linear) {
    Vec r;
    Mat J;
    residuals(D, th, linear, r, J);
    double cost = 0.5 * r.squaredNorm();
    double mu = 1e-3;
    int it = 0;
    for (; it < 500; ++it) {
        Mat A = J.transpose() * J;
        Vec g = J.transpose() * r;
        if (g.cwiseAbs().maxCoeff() < 1e-15 * std::max(1.0, cost)) break;
        bool accepted = false;
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            Mat Ad = A;
            for (int i = 0; i < A.rows(); ++i) Ad(i, i) += mu * std::max(A(i, i), 1e-12);
            Vec step = Ad.ldlt().solve(-g);
            Vec trial = th + step;
            if (!trial.allFinite()) { mu *= 10; continue; }
            Vec rt;
            Mat Jt;
            residuals(D, trial, linear, rt, Jt);
            double ct = 0.5 * rt.squaredNorm();
            if (std::isfinite(ct) && ct <= cost) {
                double drop = cost - ct;
                th = trial;
                r = rt;
                J = Jt;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
                if (drop <= 1e-16 * std::max(cost, 1e-300) || step.norm() < 1e-14 * (1 + th.norm())) {
                    cost = ct;
                    return it + 1;
                }
                cost = ct;
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted) break;  // no descent direction left: at a minimum
    }
    return it;
}

}  // namespace

BubbleFit bubble_fit(const ScalarField& f, const ExponentConfig& cfg) {
    const auto& g = *f.grid();
    if (g.kind() != DomainKind::HalfSpaceBoundary) throw ValidationError("bubble_fit: needs a half-space boundary field");
    FitData D;
    D.m = cfg.n - 1;
    D.gamma = cfg.bubble_power();
    std::size_t imax = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!(f[k] > 0)) throw ValidationError("bubble_fit: field must be positive");
        Point y(D.m);
        for (int i = 0; i < D.m; ++i) y[i] = g.coord(k, i);
        D.y.push_back(y);
        D.w.push_back(g.weight(k));
        D.f.push_back(f[k]);
        D.fnorm2 += g.weight(k) * f[k] * f[k];
        if (f[k] > f[imax]) imax = k;
    }
    // start: peak cell for y0, half-maximum radius for d
    const double fmax = f[imax];
    double best = 1e300, rhalf = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        double gap = std::abs(std::log(f[k] / fmax) - std::log(0.5));
        if (gap < best) {
            best = gap;
            rhalf = dist(D.y[k], D.y[imax]);
        }
    }
    double d0 = rhalf > 0 ? rhalf / std::sqrt(std::pow(2.0, 1.0 / D.gamma) - 1.0) : 1.0;
    Vec th(2 + D.m);
    th[0] = std::log(fmax) + 2.0 * D.gamma * std::log(d0);
    th[1] = std::log(d0);
    for (int i = 0; i < D.m; ++i) th[2 + i] = D.y[imax][i];

    BubbleFit out;
    out.iterations = levenberg_marquardt(D, th, false);
    out.iterations += levenberg_marquardt(D, th, true);
    if (!th.allFinite() || std::abs(th[1]) > 50) {
        std::ostringstream os;
        os << "bubble_fit diverged after " << out.iterations << " iterations: ln c=" << th[0] << " ln d=" << th[1];
        throw ConvergenceError(os.str());
    }
    out.params.c = std::exp(th[0]);
    out.params.d = std::exp(th[1]);
    out.params.y0 = Point(D.m);
    for (int i = 0; i < D.m; ++i) out.params.y0[i] = th[2 + i];
    double num = 0;
    for (std::size_t k = 0; k < D.f.size(); ++k) {
        double b = bubble_value(out.params, cfg, D.y[k]);
        num += D.w[k] * (D.f[k] - b) * (D.f[k] - b);
    }
    out.rel_residual = std::sqrt(num / D.fnorm2);
    return out;
}

}  // namespace hls
