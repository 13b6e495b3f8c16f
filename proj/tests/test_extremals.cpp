#include <doctest.h>

#include <cmath>

#include "hls/extremals.hpp"
#include "hls/sampling.hpp"
#include "hls/special.hpp"

using namespace hls;

TEST_CASE("bubble values") {
    auto cfg = critical_config(3, 2.0);
    BubbleParams b{1, 1, Point{0.0, 0.0}};
    CHECK(bubble_value(b, cfg, Point{0.0, 0.0, 0.0}) == 1.0);
    CHECK(bubble_value(b, cfg, Point{1.0, 0.0, 0.0}) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
    CHECK(bubble_value(b, cfg, Point{0.0, 1.0}) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
    // value |y|^{n+alpha-2} -> c
    BubbleParams b2{2.5, 0.7, Point{0.0, 0.0}};
    double v = bubble_value(b2, cfg, Point{1e3, 0.0, 0.0}) * 1e9;
    CHECK(std::abs(v - 2.5) / 2.5 < 1e-5);
    CHECK_THROWS_AS(validate(BubbleParams{1, 0, Point{0.0, 0.0}}), ValidationError);
}

TEST_CASE("closed form constants") {
    // independent evaluation of n^{(n-2)/(2(n-1))} (n w_n)^{...}: spelled out for n = 3, 4
    CHECK(closed_form_constant_alpha2(3) == doctest::Approx(std::pow(3.0, 0.25) * std::pow(4 * kPi / 3, 5.0 / 12)).epsilon(1e-14));
    CHECK(closed_form_constant_alpha2(3) == doctest::Approx(2.3907).epsilon(1e-4));
    CHECK(closed_form_constant_alpha2(4) == doctest::Approx(std::cbrt(4.0) * std::pow(kPi * kPi / 2, 7.0 / 12)).epsilon(1e-14));
    CHECK(closed_form_constant_alpha2(4) == doctest::Approx(4.028).epsilon(1e-3));
    CHECK_THROWS_AS(closed_form_constant_alpha2(2), UnsupportedError);
}

TEST_CASE("sphere potential: mean value property") {
    auto cfg = critical_config(3, 2.0);
    auto S = build_sphere_mesh(3, 24);
    CHECK(std::abs(sphere_potential_mesh(Point{0, 0, 0}, cfg, S) - 4 * kPi) < 1e-12);
    CHECK(std::abs(sphere_potential(Point{0, 0, 0}, cfg, S) - 4 * kPi) < 1e-10);
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        Point xi{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        CHECK(std::abs(sphere_potential(xi, cfg, S) - 4 * kPi) / (4 * kPi) < 1e-4);
    }
    // alpha = 1.5 is not harmonic: values spread
    auto c15 = critical_config(3, 1.5);
    double a = sphere_potential(Point{0, 0, 0}, c15, S), b = sphere_potential(Point{0, 0, 0.8}, c15, S);
    CHECK(std::abs(a - b) / a > 0.05);
    CHECK_THROWS_AS(sphere_potential(Point{0, 0, 1}, cfg, S), DomainError);
    CHECK_THROWS_AS(sphere_potential(Point{0, 2, 0}, cfg, S), DomainError);
}

TEST_CASE("quadrature constant") {
    auto q3 = quadrature_constant(3, 2.0, build_ball_quadrature(3, 16, 24), build_sphere_mesh(3, 24));
    double cf3 = closed_form_constant_alpha2(3);
    CHECK(std::abs(q3.value - cf3) / cf3 < 5e-3);
    CHECK(q3.converged);
    CHECK(q3.est_error >= 0);

    auto q4 = quadrature_constant(4, 2.0, build_ball_quadrature(4, 12, 16), build_sphere_mesh(4, 16));
    double cf4 = closed_form_constant_alpha2(4);
    CHECK(std::abs(q4.value - cf4) / cf4 < 5e-3);

    // near the alpha -> 1 endpoint the value is finite and carries an error estimate
    auto q12 = quadrature_constant(3, 1.2, build_ball_quadrature(3, 12, 16), build_sphere_mesh(3, 16));
    CHECK(std::isfinite(q12.value));
    CHECK(std::isfinite(q12.est_error));
}

TEST_CASE("euler-lagrange amplitude") {
    auto cfg = critical_config(3, 2.0);
    auto S = build_sphere_mesh(3, 12);
    IntegralOperator op(S, build_ball_quadrature(3, 8, 12), cfg);
    double a = euler_lagrange_amplitude(cfg, op);
    auto e = op.extend(ScalarField::constant(S, a));
    for (auto& v : e.mutable_values()) v = std::pow(v, cfg.q - 1);
    auto r = op.restrict(e);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r[i] - std::pow(a, cfg.p - 1)) < 1e-8 * std::pow(a, cfg.p - 1));
}

TEST_CASE("bubble fit") {
    auto cfg = critical_config(3, 2.0);
    auto G = build_halfspace_boundary(3, 6.0, 0.125);
    BubbleParams truth{1.7, 0.8, Point{0.4, -0.3}};
    auto f = ScalarField::from_function(G, [&](const Point& y) { return bubble_value(truth, cfg, y); });
    auto fit = bubble_fit(f, cfg);
    CHECK(fit.rel_residual <= 1e-10);
    CHECK(std::abs(fit.params.c - truth.c) < 1e-6);
    CHECK(std::abs(fit.params.d - truth.d) < 1e-6);
    CHECK(std::abs(fit.params.y0[0] - truth.y0[0]) < 1e-6);
    CHECK(std::abs(fit.params.y0[1] - truth.y0[1]) < 1e-6);

    Rng rng(8);
    auto noisy = ScalarField::from_function(G, [&](const Point& y) {
        return bubble_value(truth, cfg, y) * (1 + 0.01 * (2 * rng.uniform() - 1) * std::sqrt(3.0));
    });
    auto nf = bubble_fit(noisy, cfg);
    CHECK(nf.rel_residual > 2e-3);
    CHECK(nf.rel_residual < 2e-2);
    CHECK(std::abs(nf.params.c - truth.c) / truth.c < 0.05);
    CHECK(std::abs(nf.params.d - truth.d) / truth.d < 0.05);

    BubbleParams l{1, 0.6, Point{-2.0, 0.0}}, r{1, 0.6, Point{2.0, 0.0}};
    auto two = ScalarField::from_function(G, [&](const Point& y) { return bubble_value(l, cfg, y) + bubble_value(r, cfg, y); });
    CHECK(bubble_fit(two, cfg).rel_residual >= 0.10);

    auto neg = ScalarField::constant(G, -1.0);
    CHECK_THROWS_AS(bubble_fit(neg, cfg), ValidationError);
}
