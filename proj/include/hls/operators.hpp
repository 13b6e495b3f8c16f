#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hls/discretization.hpp"
#include "hls/exponents.hpp"

namespace hls {

enum class Extrapolation { None, Richardson1 };

// Empty eps_list selects the exact kernel with near-field correction on
// product grids. A non-empty list mollifies the kernel with
// (r^2+eps^2)^{-beta/2}; Richardson1 combines the last two radii.
struct RegularizationSchedule {
    std::vector<double> eps_list;
    Extrapolation extrapolation = Extrapolation::None;

    bool exact() const { return eps_list.empty(); }
    void validate() const;
    static RegularizationSchedule mollified(double h);  // {2h, h} + Richardson1
};

enum class KernelKind { Riesz, Log };

// Radial kernel as a function of r^2, with the regularization folded in as a
// linear combination of mollified terms.
class Kernel {
public:
    static Kernel riesz(double beta, const RegularizationSchedule& reg = {});
    static Kernel log(const RegularizationSchedule& reg = {});

    double operator()(double r2) const;
    // unregularized value
    double exact_value(double r2) const;
    bool exact() const { return terms_.empty(); }
    KernelKind kind() const { return kind_; }
    double beta() const { return beta_; }

private:
    double base(double r2) const;
    KernelKind kind_ = KernelKind::Riesz;
    double beta_ = 0;
    std::vector<std::pair<double, double>> terms_;  // (coef, eps^2)
};

double riesz_kernel(const Point& x, const Point& y, const ExponentConfig& cfg, double eps);

// Integral of the kernel over the sphere of radius a centred at the origin,
// seen from a point at distance s*a: zonal reduction to one polar angle.
double shell_potential(const Kernel& k, int n, double a, double s);

// Boundary <-> volume operator (E / R, or their ball versions) between two
// fixed grids. Product grid pairs (sphere+ball with a shared angular mesh,
// half-space boundary+volume with a shared lattice) use kernel tables and,
// for the exact kernel, a near-field correction that subtracts the local
// quadrature of the kernel and adds back its exact integral. Other pairs fall
// back to dense summation.
class IntegralOperator {
public:
    enum class Structure { Ball, HalfSpace, Dense };

    IntegralOperator(GridPtr boundary, GridPtr volume, const ExponentConfig& cfg,
                     const RegularizationSchedule& reg = {});
    IntegralOperator(GridPtr boundary, GridPtr volume, int n, Kernel kernel);

    ScalarField extend(const ScalarField& f) const;
    ScalarField restrict(const ScalarField& g) const;
    // sum_x W_x g(x) (E f)(x)
    double pair(const ScalarField& g, const ScalarField& f) const;

    // plain sum_y w_y f(y) K(x, y), no correction
    double direct_sum(const ScalarField& f, const Point& x) const;
    // half-space only: value at (x', z) with x' a boundary node, corrected
    double evaluate_column(const ScalarField& f, std::size_t column, double z) const;

    const GridPtr& boundary() const;
    const GridPtr& volume() const;
    Structure structure() const;
    bool corrected() const;
    const Kernel& kernel() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// Convolution of a boundary field with a radial profile g(|x - y|^2) onto the
// volume lattice of a half-space grid pair (midpoint sums, no correction).
class LatticeConvolution {
public:
    LatticeConvolution(const HalfSpaceGrids& grids, std::function<double(double)> profile_r2);
    // volume values of sum_k w_k h_k g(x - y_k)
    std::vector<double> apply(std::span<const double> h) const;
    // profile on the full difference lattice (all levels), for lattice norms
    const std::vector<double>& table() const { return table_; }
    int levels() const { return levels_; }
    int width() const { return width_; }

private:
    HalfSpaceGrids grids_;
    int n_ = 0, N_ = 0, levels_ = 0, width_ = 0;
    std::vector<double> table_;  // [level][d0][d1]
};

ScalarField extend(const ScalarField& f, const GridPtr& target, const ExponentConfig& cfg,
                   const RegularizationSchedule& reg = {});
ScalarField restrict(const ScalarField& g, const GridPtr& target, const ExponentConfig& cfg,
                     const RegularizationSchedule& reg = {});

// p = infinity allowed
double lp_norm(const ScalarField& f, double p);
double operator_ratio(const ScalarField& f, const ExponentConfig& cfg, const IntegralOperator& op);
double operator_ratio(const ScalarField& f, const ExponentConfig& cfg, const GridPtr& volume,
                      const RegularizationSchedule& reg = {});

struct LogFunctional {
    double lhs = 0;         // -2 * double integral of G ln|xi-eta| F
    double rhs = 0;         // entropies + C_n
    double lhs_stated = 0;  // same double integral with prefactor -2 n omega_n
    double cross = 0;       // the double integral itself
    double entropy_F = 0;
    double entropy_G = 0;
    double C_n = 0;
};
// log-HLS on the unit ball; F on the sphere, G on the ball, both unit mass.
LogFunctional log_functional(const ScalarField& F, const ScalarField& G, const IntegralOperator& log_op,
                             double mass_tol = 1e-8);
// C_n = ln(n w_n)/(n-1) + (1/n) ln int_{B_1} exp(I_n)
double log_hls_constant(const GridPtr& ball);

}  // namespace hls
