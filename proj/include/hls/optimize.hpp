#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hls/discretization.hpp"
#include "hls/exponents.hpp"
#include "hls/extremals.hpp"
#include "hls/operators.hpp"

namespace hls {

// f' = [R((E f)^{q-1})]^{1/(p-1)}, normalized to ||f'||_p = 1
ScalarField euler_lagrange_step(const ScalarField& f, const ExponentConfig& cfg, const IntegralOperator& op);

struct IterationRecord {
    int iter = 0;
    double ratio = 0;
    // ||f_{k+1} - f_k||_p with the slide along the conformal orbit projected
    // out (unit-sphere grids, n <= 3); equal to raw_step_residual otherwise
    double step_residual = 0;
    double raw_step_residual = 0;
    bool recentered = false;
};

struct OptimizeOptions {
    double tol = 1e-6;
    int max_iter = 200;
    bool force = false;              // allow non-critical exponents
    bool recenter = true;
    double recenter_threshold = 0.25;  // |barycenter| that triggers a recentering
    std::function<void(const IterationRecord&)> on_iteration;
};

struct ExtremalResult {
    ScalarField f;
    std::vector<IterationRecord> history;
    bool converged = false;
    double constant_estimate = 0;
};

ExtremalResult find_extremal(const ScalarField& init, const ExponentConfig& cfg, const IntegralOperator& op,
                             const OptimizeOptions& opt = {});

// uniform in [lo, hi] per node
ScalarField random_positive_field(const GridPtr& grid, std::uint64_t seed, double lo = 0.2, double hi = 1.0);

// barycenter of f^p dS on a sphere grid centred at the origin
Point weighted_barycenter(const ScalarField& f, double p);
// Conformal image of a unit-sphere field (n = 2, 3) whose f^p barycenter is
// the origin; the L^p norm is preserved up to interpolation error.
ScalarField recenter(const ScalarField& f, const ExponentConfig& cfg);
// linear interpolation of a unit-sphere field (n = 2, 3) at a direction
double interpolate_sphere(const ScalarField& f, const Point& x);

// Half-space field whose Kelvin image (center (0', -2), lambda = 2, weight
// n + alpha - 2) on the unit sphere about (0', -1) is f.
ScalarField pull_back_to_halfspace(const ScalarField& f, const ExponentConfig& cfg, const GridPtr& boundary);

struct ScalingGrid {
    double extent = 4;
    double h = 0.25;
    double depth = 8;
};
struct ScalingSweep {
    std::vector<double> lambdas;
    std::vector<double> ratios;
    double fitted_exponent = 0;
};
// ratio of bubble(y / lambda) on grids scaled by lambda, and the least
// squares slope of log ratio against log lambda
ScalingSweep scaling_sweep(const ExponentConfig& cfg, const BubbleParams& params, const std::vector<double>& lambdas,
                           const ScalingGrid& grid = {}, const RegularizationSchedule& reg = {});

}  // namespace hls
