#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hls/discretization.hpp"
#include "hls/operators.hpp"
#include "hls/sampling.hpp"
#include "hls/special.hpp"

using namespace hls;

namespace {
double integrate(const GridPtr& g, const std::function<double(const Point&)>& fn) {
    double s = 0;
    for (std::size_t i = 0; i < g->size(); ++i) s += g->weight(i) * fn(g->point(i));
    return s;
}
}  // namespace

TEST_CASE("sphere mesh moments") {
    auto S = build_sphere_mesh(3, 16);
    CHECK(S->kind() == DomainKind::Sphere);
    CHECK(S->size() == 16u * 32u);
    CHECK(std::abs(S->total_weight() - 4 * kPi) < 1e-12);
    CHECK(std::abs(integrate(S, [](const Point& z) { return z[2]; })) < 1e-12);
    CHECK(std::abs(integrate(S, [](const Point& z) { return z[2] * z[2]; }) - 4 * kPi / 3) < 1e-12);
    // degree-8 polynomial: exact for level 16
    CHECK(std::abs(integrate(S, [](const Point& z) { return std::pow(z[0], 8); }) - 4 * kPi / 9) < 1e-12);

    auto C = build_sphere_mesh(2, 40, 2.0);
    CHECK(std::abs(C->total_weight() - 4 * kPi) < 1e-12);  // circumference 2 pi r

    auto S4 = build_sphere_mesh(4, 12);
    CHECK(std::abs(S4->total_weight() - unit_sphere_area(4)) < 1e-11);

    // radius and centre
    auto Sc = build_sphere_mesh(3, 12, 0.5, Point{1.0, 0.0, -2.0});
    CHECK(std::abs(Sc->total_weight() - kPi) < 1e-12);
    for (std::size_t i = 0; i < Sc->size(); ++i) CHECK(std::abs(dist(Sc->point(i), Point{1.0, 0.0, -2.0}) - 0.5) < 1e-13);
}

TEST_CASE("sphere mesh errors") {
    CHECK_THROWS(build_sphere_mesh(1, 8));
    CHECK_THROWS(build_sphere_mesh(3, 0));
}

TEST_CASE("ball quadrature moments") {
    auto B = build_ball_quadrature(3, 12, 16);
    CHECK(std::abs(B->total_weight() - 4 * kPi / 3) < 1e-10);
    CHECK(std::abs(integrate(B, [](const Point& x) { return x.norm2(); }) - 4 * kPi / 5) < 1e-12);
    CHECK(std::abs(integrate(B, [](const Point& x) { return x[0]; })) < 1e-12);
    auto B2 = build_ball_quadrature(3, 12, 16, 2.0);
    CHECK(std::abs(B2->total_weight() - 32 * kPi / 3) < 1e-10);
}

TEST_CASE("half-space grids") {
    auto G = build_halfspace_grids(3, 4.0, 0.25, 4.0);
    CHECK(std::abs(G.boundary->total_weight() - 64.0) < 1e-10);
    CHECK(std::abs(G.volume->total_weight() - 256.0) < 1e-10);
    // volume heights lie in (0, H] and are graded toward 0
    const auto* hs = G.volume->halfspace();
    REQUIRE(hs != nullptr);
    CHECK(hs->heights.front() > 0);
    CHECK(hs->heights.back() <= 4.0);
    CHECK(hs->height_weights.front() < hs->height_weights.back());

    double gauss = integrate(G.boundary, [](const Point& y) { return std::exp(-y.norm2()); });
    CHECK(std::abs(gauss - kPi) / kPi < 0.01);

    CHECK_THROWS(build_halfspace_grids(3, 4.0, 0.0, 4.0));
    CHECK_THROWS(build_halfspace_grids(3, 4.0, 0.01, 4.0, 1000));  // node cap
}

TEST_CASE("moments converge under h-refinement") {
    // boundary midpoint rule on a smooth non-separable integrand
    auto f = [](const Point& y) { return 1.0 / (1.0 + y.norm2()) / (1.0 + y.norm2()); };
    auto g1 = build_halfspace_boundary(3, 4.0, 0.25), g2 = build_halfspace_boundary(3, 4.0, 0.125),
         g3 = build_halfspace_boundary(3, 4.0, 0.0625);
    double v1 = integrate(g1, f), v2 = integrate(g2, f), v3 = integrate(g3, f);
    CHECK(std::abs(v1 - v2) / std::abs(v2 - v3) > 3.5);  // at least quadratic
}

TEST_CASE("rearrangement") {
    auto B = build_halfspace_boundary(3, 3.0, 0.25);
    auto c = ScalarField::constant(B, 2.5);
    auto cs = rearrange_decreasing(c);
    for (std::size_t i = 0; i < cs.size(); ++i) CHECK(cs[i] == 2.5);

    auto bump = [](const Point& y, double cx) { return std::exp(-((y[0] - cx) * (y[0] - cx) + y[1] * y[1])); };
    Rng rng(3);
    auto f = ScalarField::from_function(B, [&](const Point& y) { return bump(y, -1.5) + 0.7 * bump(y, 1.5) - 0.1 * rng.uniform(); });
    auto fs = rearrange_decreasing(f);

    // same multiset of |values|
    std::vector<double> a(f.size()), b(fs.values().begin(), fs.values().end());
    for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    for (double p : {1.0, 2.0, 4.0 / 3.0, 6.0}) {
        auto af = ScalarField(B, a);
        CHECK(std::abs(lp_norm(fs, p) - lp_norm(af, p)) <= 1e-14 * lp_norm(af, p));
    }

    // oracle scan: values non-increasing in distance from the origin
    std::vector<std::size_t> idx(B->size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return B->point(i).norm2() < B->point(j).norm2();
    });
    for (std::size_t k = 1; k < idx.size(); ++k) {
        double r0 = B->point(idx[k - 1]).norm2(), r1 = B->point(idx[k]).norm2();
        if (r1 > r0 + 1e-12) CHECK(fs[idx[k]] <= fs[idx[k - 1]]);
    }

    auto fss = rearrange_decreasing(fs);
    for (std::size_t i = 0; i < fs.size(); ++i) CHECK(fss[i] == fs[i]);

    // non-uniform weights are rejected
    CHECK_THROWS_AS(rearrange_decreasing(ScalarField::constant(build_sphere_mesh(3, 8), 1.0)), UnsupportedError);
}

TEST_CASE("field csv") {
    auto S = build_sphere_mesh(2, 4);
    std::ostringstream os;
    write_field_csv(os, ScalarField::constant(S, 1.0));
    std::string s = os.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(S->size()) + 1);
    CHECK(s.rfind("x1,x2,w,value\n", 0) == 0);
}
