#include <doctest.h>

#include <cmath>

#include "hls/extremals.hpp"
#include "hls/special.hpp"
#include "hls/verify.hpp"

using namespace hls;

TEST_CASE("harmonic extension of the bubble") {
    auto cfg = critical_config(3, 2.0);
    BubbleParams b{1, 1, Point{0.0, 0.0}};
    auto f = [&](const Point& y) { return bubble_value(b, cfg, y); };
    auto coarse = check_harmonic_extension(f, 0.25, cfg), fine = check_harmonic_extension(f, 0.125, cfg);
    double order = std::log2(coarse.max_interior_laplacian / fine.max_interior_laplacian);
    CHECK(order >= 1.8);
    CHECK(fine.neumann_residual < coarse.neumann_residual);
    CHECK(fine.neumann_residual < 0.01);
    // flux constant is c(3,2)/2 = 2 pi
    CHECK(std::abs(fine.flux_constant - 2 * kPi) / (2 * kPi) < 0.01);

    auto zero = check_harmonic_extension([](const Point&) { return 0.0; }, 0.25, cfg);
    CHECK(zero.max_interior_laplacian == 0.0);
    CHECK(zero.neumann_residual == 0.0);

    CHECK_THROWS_AS(check_harmonic_extension(f, 0.25, critical_config(3, 1.5)), UnsupportedError);
}

TEST_CASE("trace representation") {
    CHECK(check_trace_representation(TraceVariant::Interior, 10, 7) <= 0.01);
    CHECK(check_trace_representation(TraceVariant::Boundary, 10, 7) <= 0.01);
}

TEST_CASE("log-HLS suite") {
    auto r = check_log_hls(3, 20, 7);
    CHECK(r.min_slack >= -1e-3);
    CHECK(r.uniform_slack >= 0);
    CHECK(r.min_slack_stated < r.min_slack);
    CHECK(r.widths.size() == r.concentration_slack.size());
}

TEST_CASE("young inequality") {
    auto G = build_halfspace_grids(3, 3.0, 0.25, 4.0);
    for (auto [p, q, r] : {std::tuple{2.0, 2.0, HUGE_VAL}, std::tuple{4.0 / 3, 4.0 / 3, 2.0}, std::tuple{1.5, 1.2, 2.0}}) {
        auto y = check_young(p, q, r, 5, 3, G);
        CHECK(y.holds);
        CHECK(y.max_ratio <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS(check_young(2.0, 2.0, 2.0, 1, 1, G), ValidationError);
}

TEST_CASE("symmetrization") {
    auto cfg = critical_config(3, 2.0);
    auto G = build_halfspace_grids(3, 3.0, 0.25, 6.0);
    IntegralOperator op(G.boundary, G.volume, cfg);
    auto bump = [](const Point& y, double cx, double w) {
        return std::exp(-((y[0] - cx) * (y[0] - cx) + y[1] * y[1]) / (2 * w * w));
    };
    auto radial = check_symmetrization(ScalarField::from_function(G.boundary, [&](const Point& y) { return bump(y, 0, 0.7); }), cfg, op);
    CHECK(std::abs(radial.ratio_fstar - radial.ratio_f) <= 1e-10 * radial.ratio_f);
    CHECK(radial.improved);
    auto two = check_symmetrization(ScalarField::from_function(G.boundary, [&](const Point& y) {
        return bump(y, -1.2, 0.4) + bump(y, 1.2, 0.4);
    }), cfg, op);
    CHECK(two.ratio_fstar > two.ratio_f);
    CHECK(two.improved);
}

TEST_CASE("check registry") {
    const auto& names = check_names();
    CHECK(names.size() == 12);
    CHECK(is_check_name("mean_value"));
    CHECK_FALSE(is_check_name("nope"));
    CHECK_THROWS_AS(run_check("nope"), ValidationError);

    auto r = run_check("exponents");
    CHECK(r.pass);
    CHECK(r.seed == 7);
    auto j = to_json(r);
    for (const char* k : {"check", "pass", "residual", "tolerance", "refinement", "seed", "details"}) CHECK(j.contains(k));

    VerifyOptions zero;
    zero.tol = 0.0;
    CHECK_FALSE(run_check("exponents", zero).pass);
}
