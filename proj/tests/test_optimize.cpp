#include <doctest.h>

#include <cmath>

#include "hls/extremals.hpp"
#include "hls/optimize.hpp"
#include "hls/special.hpp"

using namespace hls;

namespace {
struct BallPair {
    GridPtr S, B;
    IntegralOperator op;
    BallPair(const ExponentConfig& cfg, int level, int radial)
        : S(build_sphere_mesh(cfg.n, level)), B(build_ball_quadrature(cfg.n, radial, level)), op(S, B, cfg) {}
};
}  // namespace

TEST_CASE("constant is a fixed point") {
    auto cfg = critical_config(3, 2.0);
    BallPair bp(cfg, 12, 8);
    auto g = euler_lagrange_step(ScalarField::constant(bp.S, 2.0), cfg, bp.op);
    CHECK(lp_norm(g, cfg.p) == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(std::abs(g[i] - g[0]) < 1e-10 * g[0]);

    auto r = find_extremal(ScalarField::constant(bp.S, 1.0), cfg, bp.op);
    CHECK(r.converged);
    CHECK(r.history.size() <= 2);
    const double cf = closed_form_constant_alpha2(3);
    CHECK(std::abs(r.constant_estimate - cf) / cf < 1e-8);
}

TEST_CASE("random start converges to the closed form") {
    auto cfg = critical_config(3, 2.0);
    BallPair bp(cfg, 16, 12);
    int calls = 0;
    OptimizeOptions opt;
    opt.on_iteration = [&](const IterationRecord&) { ++calls; };
    auto r = find_extremal(random_positive_field(bp.S, 7), cfg, bp.op, opt);
    const double cf = closed_form_constant_alpha2(3);
    CHECK(r.converged);
    CHECK(calls == static_cast<int>(r.history.size()));
    CHECK(std::abs(r.constant_estimate - cf) / cf < 0.02);
    for (const auto& h : r.history) CHECK(h.ratio <= 1.02 * cf);
    CHECK(r.history.back().step_residual <= 10 * opt.tol);

    // the maximizer pulls back to a half-space bubble
    auto fit = bubble_fit(pull_back_to_halfspace(r.f, cfg, build_halfspace_boundary(3, 8.0, 0.125)), cfg);
    CHECK(fit.rel_residual <= 0.05);
}

TEST_CASE("alpha = 1.5: optimizer agrees with the quadrature formula") {
    auto cfg = critical_config(3, 1.5);
    BallPair bp(cfg, 16, 12);
    auto r = find_extremal(random_positive_field(bp.S, 3), cfg, bp.op);
    double q = quadrature_constant_value(3, 1.5, build_ball_quadrature(3, 16, 24), build_sphere_mesh(3, 24));
    CHECK(r.converged);
    CHECK(std::abs(r.constant_estimate - q) / q < 0.02);
}

TEST_CASE("guards") {
    auto sub = general_config(3, 2.0, 4.0 / 3, 4.0);
    BallPair bp(sub, 8, 6);
    auto f = ScalarField::constant(bp.S, 1.0);
    CHECK_THROWS_AS(find_extremal(f, sub, bp.op), ValidationError);
    OptimizeOptions forced;
    forced.force = true;
    forced.max_iter = 3;
    CHECK_NOTHROW(find_extremal(f, sub, bp.op, forced));

    auto cfg = critical_config(3, 2.0);
    BallPair ok(cfg, 8, 6);
    CHECK_THROWS_AS(find_extremal(ScalarField::constant(ok.S, -1.0), cfg, ok.op), DomainError);
    OptimizeOptions bad;
    bad.tol = 0;
    CHECK_THROWS_AS(find_extremal(ScalarField::constant(ok.S, 1.0), cfg, ok.op, bad), ValidationError);
}

TEST_CASE("random fields are seeded") {
    auto S = build_sphere_mesh(3, 8);
    auto a = random_positive_field(S, 42), b = random_positive_field(S, 42), c = random_positive_field(S, 43);
    bool same = true, differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a[i] == b[i];
        differ = differ || a[i] != c[i];
        CHECK(a[i] >= 0.2);
        CHECK(a[i] <= 1.0);
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("recentering") {
    auto cfg = critical_config(3, 2.0);
    auto S = build_sphere_mesh(3, 24);
    CHECK(weighted_barycenter(ScalarField::constant(S, 1.0), cfg.p).norm() < 1e-14);

    // interpolation reproduces nodes and smooth fields
    auto lin = ScalarField::from_function(S, [](const Point& z) { return 2 + z[0] + 0.5 * z[2]; });
    CHECK(interpolate_sphere(lin, S->point(17)) == doctest::Approx(lin[17]).epsilon(1e-12));
    Point d{0.36, -0.48, 0.8};
    CHECK(std::abs(interpolate_sphere(lin, d) - (2 + 0.36 + 0.4)) < 1e-2);

    // a field concentrated toward +z
    auto f = ScalarField::from_function(S, [](const Point& z) { return std::exp(1.2 * z[2]); });
    CHECK(weighted_barycenter(f, cfg.p)[2] > 0.25);
    auto g = recenter(f, cfg);
    CHECK(weighted_barycenter(g, cfg.p).norm() < 0.05);
    CHECK(std::abs(lp_norm(g, cfg.p) - lp_norm(f, cfg.p)) / lp_norm(f, cfg.p) < 0.01);
}

TEST_CASE("pull back of the constant is a bubble") {
    auto cfg = critical_config(3, 2.0);
    auto S = build_sphere_mesh(3, 16);
    auto G = build_halfspace_boundary(3, 6.0, 0.25);
    auto h = pull_back_to_halfspace(ScalarField::constant(S, 1.0), cfg, G);
    // (2 / |y - (0,0,-2)|)^3 = 8 (|y'|^2 + 4)^{-3/2}
    BubbleParams b{8, 2, Point{0.0, 0.0}};
    for (std::size_t i = 0; i < G->size(); i += 37) CHECK(h[i] == doctest::Approx(bubble_value(b, cfg, G->point(i))).epsilon(1e-12));
}

TEST_CASE("scaling sweeps") {
    std::vector<double> lambdas{0.5, 1.0, 2.0, 5.0};
    BubbleParams b{1, 1, Point{0.0, 0.0}};
    auto crit = scaling_sweep(critical_config(3, 2.0), b, lambdas);
    CHECK(crit.ratios.size() == 4);
    CHECK(std::abs(crit.fitted_exponent) <= 0.02);
    auto sub = general_config(3, 2.0, 4.0 / 3, 4.0);
    auto s = scaling_sweep(sub, b, lambdas);
    CHECK(std::abs(s.fitted_exponent - scaling_exponent(sub)) <= 0.03);
    CHECK_THROWS(scaling_sweep(sub, b, {}));
}
