#pragma once

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "hls/core.hpp"

namespace hls {

enum class DomainKind { HalfSpaceBoundary, HalfSpaceVolume, Sphere, Ball };
const char* to_string(DomainKind k);

// Sphere rules are products: an "outer" block of n-2 Gauss angles (flattened,
// n_outer nodes) times n_phi uniform azimuths, index = outer * n_phi + phi.
struct SphereLayout {
    int level = 0;
    int n_outer = 0;
    int n_phi = 0;
    double radius = 1;
    Point center;
    std::vector<double> unit_weights;  // weights on the unit sphere, per node
    std::vector<Point> unit_nodes;     // directions
};

// Ball: index = radial * sphere.size + angular.
struct BallLayout {
    std::vector<double> radial_nodes;    // in (0,1), unit ball
    std::vector<double> radial_weights;  // r^{n-1} folded in, unit ball
    SphereLayout sphere;                 // angular mesh (radius/center = the ball's)
};

// Half-space: boundary index j over a (n-1)-dim uniform grid with per_axis
// nodes per axis; volume index = level * n_boundary + j.
struct HalfSpaceLayout {
    double extent = 0;  // R
    double h = 0;
    double depth = 0;   // H
    int per_axis = 0;
    int n_boundary = 0;
    std::vector<double> heights;         // volume node heights
    std::vector<double> height_weights;  // vertical cell widths
};

class QuadratureSet {
public:
    using Layout = std::variant<std::monostate, SphereLayout, BallLayout, HalfSpaceLayout>;

    QuadratureSet(DomainKind kind, int dim, std::vector<double> coords, std::vector<double> weights, Layout layout);

    DomainKind kind() const { return kind_; }
    int dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }
    Point point(std::size_t i) const;
    double coord(std::size_t i, int m) const { return coords_[i * dim_ + m]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const { return weights_; }
    double total_weight() const;

    const SphereLayout* sphere() const { return std::get_if<SphereLayout>(&layout_); }
    const BallLayout* ball() const { return std::get_if<BallLayout>(&layout_); }
    const HalfSpaceLayout* halfspace() const { return std::get_if<HalfSpaceLayout>(&layout_); }

    bool is_boundary_kind() const { return kind_ == DomainKind::HalfSpaceBoundary || kind_ == DomainKind::Sphere; }

private:
    DomainKind kind_;
    int dim_;
    std::vector<double> coords_;
    std::vector<double> weights_;
    Layout layout_;
};

using GridPtr = std::shared_ptr<const QuadratureSet>;

class ScalarField {
public:
    ScalarField(GridPtr grid, std::vector<double> values);
    static ScalarField constant(GridPtr grid, double c);
    static ScalarField from_function(GridPtr grid, const std::function<double(const Point&)>& fn);

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

// default cap on total node count for the half-space builders
inline constexpr std::size_t kDefaultNodeCap = 4'000'000;

GridPtr build_sphere_mesh(int n, int level, double radius = 1.0, Point center = {});
GridPtr build_ball_quadrature(int n, int radial_order, int sphere_level, double radius = 1.0, Point center = {});

struct HalfSpaceGrids {
    GridPtr boundary;
    GridPtr volume;
};
// vertical grading ratio of the volume grid
inline constexpr double kGradingRatio = 0.7;
HalfSpaceGrids build_halfspace_grids(int n, double extent, double h, double depth,
                                     std::size_t node_cap = kDefaultNodeCap);
HalfSpaceGrids build_halfspace_grids(int n, double extent, double h, double depth, std::size_t node_cap,
                                     bool with_volume);

// boundary grid alone (no volume levels)
GridPtr build_halfspace_boundary(int n, double extent, double h);

ScalarField rearrange_decreasing(const ScalarField& f);

// one row per node: x_1..x_n, w, value
void write_field_csv(std::ostream& os, const ScalarField& f);

}  // namespace hls
