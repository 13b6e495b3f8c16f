#pragma once

#include <cstdint>
#include <functional>

#include <json.hpp>

#include "hls/discretization.hpp"
#include "hls/exponents.hpp"

namespace hls {

using FieldFn = std::function<double(const Point&)>;

struct KelvinMap {
    Point center;
    double lambda = 1;
    double mu = 0;
};

void validate(const KelvinMap& m);
Point kelvin_point(const KelvinMap& m, const Point& xi);
double kelvin_field_value(const KelvinMap& m, const FieldFn& f, const Point& xi);

// Map with center (x0', -lambda); the boundary plane goes to the sphere
// of radius lambda/2 about (x0', -lambda/2).
KelvinMap halfspace_ball_map(int n, double lambda, double mu, const Point& x0p = {});
Point image_ball_center(const KelvinMap& m);
double image_ball_radius(const KelvinMap& m);

struct NormResolution {
    double extent = 16;  // half-space box half-width
    double h = 0.125;
    int sphere_level = 32;
};
struct NormPair {
    double halfspace = 0;
    double ball = 0;
};
// ||f||_{L^p(boundary)} on a truncated grid vs ||f_{mu,x0,lambda}||_{L^p} on
// the image sphere; critical exponents and mu = n + alpha - 2 only.
NormPair norm_invariance_check(const FieldFn& f, const KelvinMap& m, const ExponentConfig& cfg,
                               const NormResolution& res = {});

double p_kernel(const Point& x, double lambda, const Point& xi, const Point& eta, const ExponentConfig& cfg);

// Ball automorphism sending a to 0, and its conformal factor |phi_a'(x)|.
Point ball_automorphism(const Point& a, const Point& x);
double ball_automorphism_factor(const Point& a, const Point& x);

// Polar quadrature over the upper half space centred at a boundary point,
// optionally excluding a ball: int F(eta) |c - eta|^{-beta} d eta.
// Rays are split at their closest approach to `focus` when given.
struct PolarResolution {
    int n_theta = 16;  // Gauss nodes in cos(theta) (n=3) or theta (n=2)
    int n_phi = 32;    // uniform azimuths (n=3)
    int n_radial = 48;
    double scale = 1;  // length scale of the integrand
    PolarResolution refined() const { return {2 * n_theta, 2 * n_phi, 2 * n_radial, scale}; }
};
double polar_halfspace_integral(const Point& c, double beta, const FieldFn& F, const PolarResolution& res,
                                const Point* excl_center = nullptr, double excl_radius = 0,
                                const Point* focus = nullptr);

struct KelvinPair {
    FieldFn u;  // boundary
    FieldFn v;  // volume
};
// v = (|x' - y0|^2 + (x_n + d)^2)^{-(n-alpha)/2}, u = R(v^kappa) by polar quadrature.
// For alpha = 2 this v is proportional to E_2 of the boundary bubble.
KelvinPair bubble_pair(const ExponentConfig& cfg, double d, const Point& y0p, const PolarResolution& res);

struct KelvinResidual {
    double res_K1 = 0;
    double res_K3 = 0;
    int sample_count = 0;
    std::uint64_t seed = 0;
};
// tau1_shift perturbs tau1 in the right-hand sides (negative control).
KelvinResidual kelvin_identity_residual(const KelvinPair& uv, const KelvinMap& m, const ExponentConfig& cfg,
                                        const PolarResolution& res, int samples, std::uint64_t seed,
                                        double tau1_shift = 0.0);

nlohmann::json residual_report(const KelvinResidual& r, const KelvinMap& m, const ExponentConfig& cfg);

}  // namespace hls
