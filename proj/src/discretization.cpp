#include "hls/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "hls/special.hpp"

namespace hls {

const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::HalfSpaceBoundary: return "halfspace_boundary";
        case DomainKind::HalfSpaceVolume: return "halfspace_volume";
        case DomainKind::Sphere: return "sphere";
        case DomainKind::Ball: return "ball";
    }
    return "?";
}

QuadratureSet::QuadratureSet(DomainKind kind, int dim, std::vector<double> coords, std::vector<double> weights,
                             Layout layout)
    : kind_(kind), dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)), layout_(std::move(layout)) {
    if (coords_.size() != weights_.size() * static_cast<std::size_t>(dim_))
        throw ValidationError("quadrature set: points and weights differ in length");
    for (double w : weights_)
        if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("quadrature set: weights must be positive");
}

Point QuadratureSet::point(std::size_t i) const {
    Point p(dim_);
    for (int m = 0; m < dim_; ++m) p[m] = coords_[i * dim_ + m];
    return p;
}

double QuadratureSet::total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

ScalarField::ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw ValidationError("scalar field: null grid");
    if (values_.size() != grid_->size()) throw ValidationError("scalar field: length does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw ValidationError("scalar field: non-finite value");
}

ScalarField ScalarField::constant(GridPtr grid, double c) {
    auto n = grid->size();
    return ScalarField(std::move(grid), std::vector<double>(n, c));
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(const Point&)>& fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->point(i));
    return ScalarField(std::move(grid), std::move(v));
}

namespace {

struct UnitSphereRule {
    std::vector<Point> nodes;
    std::vector<double> weights;
    int n_outer = 1;
    int n_phi = 0;
};

// S^{n-1}: n=2 uniform circle, n=3 Gauss in cos(theta) x circle, n>=4 Gauss in
// the polar angle (sin^{n-2} folded into the weight) x S^{n-2}.
UnitSphereRule unit_sphere_rule(int n, int level) {
    UnitSphereRule r;
    if (n == 2) {
        const int m = 2 * level;
        r.n_phi = m;
        for (int k = 0; k < m; ++k) {
            double phi = 2.0 * kPi * (k + 0.5) / m;
            r.nodes.push_back(Point{std::cos(phi), std::sin(phi)});
            r.weights.push_back(2.0 * kPi / m);
        }
        return r;
    }
    if (n == 3) {
        auto gl = gauss_legendre(level, -1.0, 1.0);
        auto circ = unit_sphere_rule(2, level);
        r.n_phi = circ.n_phi;
        r.n_outer = level;
        for (int a = 0; a < level; ++a) {
            double t = gl.x[a], s = std::sqrt(1.0 - t * t);
            for (int k = 0; k < circ.n_phi; ++k) {
                const Point& c = circ.nodes[k];
                r.nodes.push_back(Point{s * c[0], s * c[1], t});
                r.weights.push_back(gl.w[a] * circ.weights[k]);
            }
        }
        return r;
    }
    auto gl = gauss_legendre(level, 0.0, kPi);
    auto inner = unit_sphere_rule(n - 1, level);
    r.n_phi = inner.n_phi;
    r.n_outer = level * inner.n_outer;
    for (int a = 0; a < level; ++a) {
        double psi = gl.x[a], s = std::sin(psi), c = std::cos(psi);
        double wa = gl.w[a] * std::pow(s, n - 2);
        for (std::size_t k = 0; k < inner.nodes.size(); ++k) {
            Point x(n);
            for (int m = 0; m < n - 1; ++m) x[m] = s * inner.nodes[k][m];
            x[n - 1] = c;
            r.nodes.push_back(x);
            r.weights.push_back(wa * inner.weights[k]);
        }
    }
    return r;
}

Point resolve_center(int n, const Point& c) {
    if (c.dim() == 0) return Point(n);
    if (c.dim() != n) throw ValidationError("center dimension does not match n");
    return c;
}

SphereLayout make_sphere_layout(int n, int level, double radius, const Point& center) {
    if (n < 2 || n > kMaxDim)
        throw UnsupportedError("sphere mesh: n=" + std::to_string(n) + " not supported (2..5)");
    if (level < 1) throw ValidationError("sphere mesh: level must be >= 1");
    if (!(radius > 0)) throw ValidationError("sphere mesh: radius must be positive");
    auto rule = unit_sphere_rule(n, level);
    SphereLayout L;
    L.level = level;
    L.n_outer = rule.n_outer;
    L.n_phi = rule.n_phi;
    L.radius = radius;
    L.center = center;
    L.unit_nodes = std::move(rule.nodes);
    L.unit_weights = std::move(rule.weights);
    return L;
}

}  // namespace

GridPtr build_sphere_mesh(int n, int level, double radius, Point center) {
    center = resolve_center(n, center);
    auto L = make_sphere_layout(n, level, radius, center);
    const double area_scale = std::pow(radius, n - 1);
    std::vector<double> xs, ws;
    xs.reserve(L.unit_nodes.size() * n);
    for (std::size_t k = 0; k < L.unit_nodes.size(); ++k) {
        for (int m = 0; m < n; ++m) xs.push_back(center[m] + radius * L.unit_nodes[k][m]);
        ws.push_back(area_scale * L.unit_weights[k]);
    }
    return std::make_shared<QuadratureSet>(DomainKind::Sphere, n, std::move(xs), std::move(ws), std::move(L));
}

GridPtr build_ball_quadrature(int n, int radial_order, int sphere_level, double radius, Point center) {
    if (radial_order < 1) throw ValidationError("ball quadrature: radial order must be >= 1");
    center = resolve_center(n, center);
    BallLayout B;
    B.sphere = make_sphere_layout(n, sphere_level, radius, center);
    auto gl = gauss_legendre(radial_order, 0.0, 1.0);
    for (int i = 0; i < radial_order; ++i) {
        B.radial_nodes.push_back(gl.x[i]);
        B.radial_weights.push_back(gl.w[i] * std::pow(gl.x[i], n - 1));
    }
    const double vol_scale = std::pow(radius, n);
    const auto& S = B.sphere;
    std::vector<double> xs, ws;
    xs.reserve(radial_order * S.unit_nodes.size() * n);
    for (int i = 0; i < radial_order; ++i) {
        double r = radius * B.radial_nodes[i];
        for (std::size_t k = 0; k < S.unit_nodes.size(); ++k) {
            for (int m = 0; m < n; ++m) xs.push_back(center[m] + r * S.unit_nodes[k][m]);
            ws.push_back(vol_scale * B.radial_weights[i] * S.unit_weights[k]);
        }
    }
    return std::make_shared<QuadratureSet>(DomainKind::Ball, n, std::move(xs), std::move(ws), std::move(B));
}

HalfSpaceGrids build_halfspace_grids(int n, double extent, double h, double depth, std::size_t node_cap) {
    return build_halfspace_grids(n, extent, h, depth, node_cap, true);
}

HalfSpaceGrids build_halfspace_grids(int n, double extent, double h, double depth, std::size_t node_cap,
                                     bool with_volume) {
    if (n != 2 && n != 3) throw UnsupportedError("half-space grids: only n = 2 or 3 (got n=" + std::to_string(n) + ")");
    if (!(h > 0)) throw ValidationError("half-space grids: h must be positive");
    if (!(extent > h)) throw ValidationError("half-space grids: extent R must exceed h");
    if (!(depth > h)) throw ValidationError("half-space grids: depth H must exceed h");
    const double cells = 2.0 * extent / h;
    const int per_axis = static_cast<int>(std::lround(cells));
    if (std::abs(cells - per_axis) > 1e-9 * cells)
        throw ValidationError("half-space grids: 2R/h must be an integer");

    HalfSpaceLayout L;
    L.extent = extent;
    L.h = h;
    L.depth = depth;
    L.per_axis = per_axis;
    L.n_boundary = 1;
    for (int m = 0; m < n - 1; ++m) L.n_boundary *= per_axis;

    // cells [H r^{k+1}, H r^k], then a bottom cell [0, H r^K] once it is below h/8
    std::vector<double> edges{depth};
    while (edges.back() > h / 8.0) edges.push_back(edges.back() * kGradingRatio);
    edges.push_back(0.0);
    for (std::size_t k = edges.size() - 1; k-- > 0;) {
        L.heights.push_back(0.5 * (edges[k] + edges[k + 1]));
        L.height_weights.push_back(edges[k] - edges[k + 1]);
    }

    const std::size_t nb = L.n_boundary, nv = with_volume ? nb * L.heights.size() : 0;
    if (nb + nv > node_cap)
        throw ValidationError("half-space grids: " + std::to_string(nb + nv) + " nodes exceed cap " +
                              std::to_string(node_cap));

    const double cell = std::pow(h, n - 1);
    std::vector<double> bx, bw;
    bx.reserve(nb * n);
    for (std::size_t j = 0; j < nb; ++j) {
        std::size_t rest = j;
        double c[2] = {0, 0};
        for (int m = n - 2; m >= 0; --m) {
            c[m] = -extent + (static_cast<double>(rest % per_axis) + 0.5) * h;
            rest /= per_axis;
        }
        for (int m = 0; m < n - 1; ++m) bx.push_back(c[m]);
        bx.push_back(0.0);
        bw.push_back(cell);
    }
    HalfSpaceGrids g;
    g.boundary = std::make_shared<QuadratureSet>(DomainKind::HalfSpaceBoundary, n, bx, std::move(bw), L);
    if (!with_volume) return g;
    std::vector<double> vx, vw;
    vx.reserve(nv * n);
    for (std::size_t i = 0; i < L.heights.size(); ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            for (int m = 0; m < n - 1; ++m) vx.push_back(bx[j * n + m]);
            vx.push_back(L.heights[i]);
            vw.push_back(cell * L.height_weights[i]);
        }
    }
    g.volume = std::make_shared<QuadratureSet>(DomainKind::HalfSpaceVolume, n, std::move(vx), std::move(vw), L);
    return g;
}

GridPtr build_halfspace_boundary(int n, double extent, double h) {
    return build_halfspace_grids(n, extent, h, 2.0 * h, kDefaultNodeCap, false).boundary;
}

ScalarField rearrange_decreasing(const ScalarField& f) {
    const auto& g = *f.grid();
    const auto* L = g.halfspace();
    if (g.kind() != DomainKind::HalfSpaceBoundary || !L)
        throw UnsupportedError("rearrangement needs a half-space boundary grid");
    const double w0 = g.weight(0);
    for (double w : g.weights())
        if (std::abs(w - w0) > 1e-12 * w0) throw UnsupportedError("rearrangement needs equal cell weights");

    // exact integer distance key: cell center offset is (2k+1-N) h/2 per axis
    const std::size_t nb = g.size();
    const int N = L->per_axis, dims = g.dim() - 1;
    std::vector<long long> key(nb);
    for (std::size_t j = 0; j < nb; ++j) {
        std::size_t rest = j;
        long long s = 0;
        for (int m = 0; m < dims; ++m) {
            long long d = 2 * static_cast<long long>(rest % N) + 1 - N;
            s += d * d;
            rest /= N;
        }
        key[j] = s;
    }
    std::vector<std::size_t> order(nb);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

    std::vector<double> vals(nb);
    for (std::size_t j = 0; j < nb; ++j) vals[j] = std::abs(f[j]);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    std::vector<double> out(nb);
    for (std::size_t k = 0; k < nb; ++k) out[order[k]] = vals[k];
    return ScalarField(f.grid(), std::move(out));
}

void write_field_csv(std::ostream& os, const ScalarField& f) {
    const auto& g = *f.grid();
    for (int m = 0; m < g.dim(); ++m) os << "x" << (m + 1) << ",";
    os << "w,value\n";
    char buf[32];
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int m = 0; m < g.dim(); ++m) {
            std::snprintf(buf, sizeof buf, "%.17g", g.coord(i, m));
            os << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", g.weight(i));
        os << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", f[i]);
        os << buf << "\n";
    }
}

}  // namespace hls
