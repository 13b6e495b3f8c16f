#include <doctest.h>

#include <cmath>

#include "hls/conformal.hpp"
#include "hls/extremals.hpp"
#include "hls/sampling.hpp"
#include "hls/special.hpp"

using namespace hls;

TEST_CASE("kelvin point") {
    KelvinMap m{Point{0, 0, 0}, 1.0, 0.0};
    Point y = kelvin_point(m, Point{2, 0, 0});
    CHECK(y[0] == 0.5);
    CHECK(y[1] == 0.0);
    CHECK(y[2] == 0.0);
    // the inversion sphere is fixed
    KelvinMap m2{Point{1, -1, 0}, 2.0, 1.0};
    Point on{1.0, -1.0 + 2.0 * std::cos(0.3), 2.0 * std::sin(0.3)};
    CHECK(dist(kelvin_point(m2, on), on) < 1e-14);
    CHECK_THROWS_AS(kelvin_point(m2, Point{1, -1, 0}), DomainError);
    CHECK_THROWS_AS(kelvin_point(KelvinMap{Point{0, 0, 0}, 0.0, 0.0}, on), ValidationError);
}

TEST_CASE("kelvin algebra on random pairs") {
    Rng rng(21);
    for (int k = 0; k < 2000; ++k) {
        Point x{rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0};
        double lam = rng.uniform(0.2, 3);
        KelvinMap m{x, lam, 1.0};
        Point xi{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 5)};
        Point eta{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 5)};
        Point xs = kelvin_point(m, xi), es = kelvin_point(m, eta);
        CHECK(dist(kelvin_point(m, xs), xi) <= 1e-12 * std::max(1.0, xi.norm()));
        // |xi* - eta*| = lambda^2 |xi - eta| / (|xi - x| |eta - x|)
        double want = lam * lam * dist(xi, eta) / (dist(xi, x) * dist(eta, x));
        CHECK(std::abs(dist(xs, es) - want) <= 1e-12 * want);
    }
}

TEST_CASE("kelvin field value") {
    KelvinMap m{Point{0, 0, 0}, 1.5, 0.0};
    auto one = [](const Point&) { return 1.0; };
    CHECK(kelvin_field_value(m, one, Point{0.3, 2, 1}) == 1.0);
    m.mu = 2.0;
    // (1.5 / 3)^2 * f(xi*)
    CHECK(kelvin_field_value(m, one, Point{3, 0, 0}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("volume jacobian") {
    // int_{B_1(c)} (lambda/|xi|)^{2n} dxi = |image ball|, image radius r / (|c|^2 - r^2) = 1/8
    auto B = build_ball_quadrature(3, 16, 24, 1.0, Point{0, 0, 3});
    double s = 0;
    for (std::size_t i = 0; i < B->size(); ++i) s += B->weight(i) * std::pow(B->point(i).norm2(), -3.0);
    double want = 4 * kPi / 3 / 512;
    CHECK(std::abs(s - want) / want < 1e-10);
}

TEST_CASE("half-space to ball map") {
    auto m = halfspace_ball_map(3, 2.0, 3.0, Point{0.5, -1.0});
    CHECK(m.center[2] == -2.0);
    Point c = image_ball_center(m);
    CHECK(c[2] == -1.0);
    CHECK(image_ball_radius(m) == 1.0);
    Rng rng(2);
    for (int k = 0; k < 50; ++k) {
        Point y{rng.uniform(-10, 10), rng.uniform(-10, 10), 0.0};
        CHECK(std::abs(dist(kelvin_point(m, y), c) - 1.0) < 1e-12);
    }
}

TEST_CASE("norm invariance") {
    auto cfg = critical_config(3, 2.0);
    auto m = halfspace_ball_map(3, 2.0, cfg.boundary_weight());
    BubbleParams b{1, 1, Point{0.0, 0.0}};
    auto f = [&](const Point& y) { return bubble_value(b, cfg, y); };
    auto r = norm_invariance_check(f, m, cfg);
    CHECK(std::abs(r.halfspace - r.ball) / r.ball < 0.01);

    auto z = norm_invariance_check([](const Point&) { return 0.0; }, m, cfg);
    CHECK(z.halfspace == 0.0);
    CHECK(z.ball == 0.0);

    auto r3 = norm_invariance_check([&](const Point& y) { return 3 * f(y); }, m, cfg);
    CHECK(r3.halfspace == doctest::Approx(3 * r.halfspace).epsilon(1e-13));
    CHECK(r3.ball == doctest::Approx(3 * r.ball).epsilon(1e-13));

    CHECK_THROWS_AS(norm_invariance_check(f, m, general_config(3, 2.0, 4.0 / 3, 4.0)), ValidationError);
    CHECK_THROWS_AS(norm_invariance_check(f, halfspace_ball_map(3, 2.0, 1.0), cfg), ValidationError);
}

TEST_CASE("P kernel") {
    auto cfg = critical_config(3, 2.0);
    Point x{0, 0, 0}, xi{2, 0, 0}, eta{0, 0, 3};
    double want = 1 / std::sqrt(13.0) - 0.5 / std::sqrt(9.25);
    CHECK(p_kernel(x, 1.0, xi, eta, cfg) == doctest::Approx(want).epsilon(1e-14));
    CHECK(want > 0);
    Point on{0, 1, 0};
    CHECK(std::abs(p_kernel(x, 1.0, on, eta, cfg)) < 1e-15);
    CHECK_THROWS_AS(p_kernel(x, 1.0, Point{0.5, 0, 0}, eta, cfg), DomainError);
}

TEST_CASE("ball automorphism") {
    Point a{0.3, -0.2, 0.4};
    CHECK(ball_automorphism(a, a).norm() < 1e-15);
    Rng rng(4);
    for (int k = 0; k < 20; ++k) {
        Point d{rng.normal(), rng.normal(), rng.normal()};
        d *= 1.0 / d.norm();
        CHECK(std::abs(ball_automorphism(a, d).norm() - 1.0) < 1e-14);
        CHECK(ball_automorphism_factor(a, d) > 0);
    }
    // total surface measure is preserved by the conformal factor squared (n = 3)
    auto S = build_sphere_mesh(3, 24);
    double s = 0;
    for (std::size_t i = 0; i < S->size(); ++i) s += S->weight(i) * std::pow(ball_automorphism_factor(a, S->point(i)), 2);
    CHECK(std::abs(s - 4 * kPi) / (4 * kPi) < 1e-8);
}

TEST_CASE("polar half-space integral") {
    // int_{R^3_+} e^{-|eta|^2} / |eta| = 2 pi int_0^inf e^{-r^2} r dr = pi
    auto F = [](const Point& e) { return std::exp(-e.norm2()); };
    double v = polar_halfspace_integral(Point{0, 0, 0}, 1.0, F, PolarResolution{});
    CHECK(std::abs(v - kPi) / kPi < 1e-6);
    // excluding B_1((0,0,3)): subtract the ball part by a ball rule
    Point e{0, 0, 3};
    auto B = build_ball_quadrature(3, 24, 32, 1.0, e);
    double inside = 0;
    for (std::size_t i = 0; i < B->size(); ++i) inside += B->weight(i) * F(B->point(i)) / B->point(i).norm();
    double w = polar_halfspace_integral(Point{0, 0, 0}, 1.0, F, PolarResolution{}, &e, 1.0);
    CHECK(std::abs(w - (kPi - inside)) / w < 1e-5);
}

TEST_CASE("kelvin identities for the bubble pair") {
    auto cfg = critical_config(3, 2.0);
    PolarResolution res;
    auto uv = bubble_pair(cfg, 1.0, Point{0.0, 0.0}, res);
    KelvinMap m{Point{0.3, 0.1, 0.0}, 1.0, cfg.beta()};
    auto r = kelvin_identity_residual(uv, m, cfg, res, 6, 7);
    CHECK(r.sample_count == 6);
    CHECK(r.res_K1 <= 0.02);
    CHECK(r.res_K3 <= 0.02);

    auto bad = kelvin_identity_residual(uv, m, cfg, res, 6, 7, 0.5);
    CHECK(std::max(bad.res_K1, bad.res_K3) >= 10 * std::max(r.res_K1, r.res_K3));

    auto rep = residual_report(r, m, cfg);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0]["identity"] == "K1");
    CHECK(rep[1]["max_rel_residual"].get<double>() == r.res_K3);
}
