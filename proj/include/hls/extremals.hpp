#pragma once

#include "hls/discretization.hpp"
#include "hls/exponents.hpp"
#include "hls/operators.hpp"

namespace hls {

// c (|y - y0|^2 + d^2)^{-(n+alpha-2)/2}, y0 in R^{n-1}
struct BubbleParams {
    double c = 1;
    double d = 1;
    Point y0;
};

void validate(const BubbleParams& b);
// y is a boundary point (dim n, last coordinate 0) or a point of R^{n-1}
double bubble_value(const BubbleParams& b, const ExponentConfig& cfg, const Point& y);

double closed_form_constant_alpha2(int n);

// Kernel integral over the sphere mesh seen from an interior point. Exact
// schedule: zonal reduction (adaptive in the polar angle); mollified
// schedule: mesh sum with the regularized kernel.
double sphere_potential(const Point& xi, const ExponentConfig& cfg, const GridPtr& sphere,
                        const RegularizationSchedule& reg = {});
// plain mesh sum with the exact kernel
double sphere_potential_mesh(const Point& xi, const ExponentConfig& cfg, const GridPtr& sphere);

struct QuadratureConstant {
    double value = 0;
    double est_error = 0;     // |value - value on the half-resolution pair|
    double coarse_value = 0;
    bool converged = true;    // est_error below the flag threshold
};
// (n w_n)^{-(n+a-2)/(2(n-1))} (int_{B_1} Phi^{2n/(n-a)})^{(n-a)/(2n)} on the unit ball
QuadratureConstant quadrature_constant(int n, double alpha, const GridPtr& ball, const GridPtr& sphere,
                                       const RegularizationSchedule& reg = {});
double quadrature_constant_value(int n, double alpha, const GridPtr& ball, const GridPtr& sphere,
                                 const RegularizationSchedule& reg = {});

// Amplitude a with f = a solving the Euler-Lagrange equation on the ball grid
// pair (f^{p-1} = R((E f)^{q-1})).
double euler_lagrange_amplitude(const ExponentConfig& cfg, const IntegralOperator& ball_op);

struct BubbleFit {
    BubbleParams params;
    double rel_residual = 0;  // sqrt(sum w (f-b)^2 / sum w f^2)
    int iterations = 0;
};
BubbleFit bubble_fit(const ScalarField& f, const ExponentConfig& cfg);

}  // namespace hls
