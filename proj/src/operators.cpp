#include "hls/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hls/special.hpp"

namespace hls {

void RegularizationSchedule::validate() const {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0)) throw ValidationError("regularization: eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ValidationError("regularization: eps_list must be strictly decreasing");
    }
    if (extrapolation == Extrapolation::Richardson1) {
        if (eps_list.size() < 2) throw ValidationError("regularization: Richardson1 needs at least two eps values");
        const double r0 = eps_list[0] / eps_list[1];
        for (std::size_t i = 2; i < eps_list.size(); ++i)
            if (std::abs(eps_list[i - 1] / eps_list[i] - r0) > 1e-9 * r0)
                throw ValidationError("regularization: Richardson1 needs a fixed eps ratio");
    }
}

RegularizationSchedule RegularizationSchedule::mollified(double h) {
    return {{2.0 * h, h}, Extrapolation::Richardson1};
}

Kernel Kernel::riesz(double beta, const RegularizationSchedule& reg) {
    reg.validate();
    Kernel k;
    k.kind_ = KernelKind::Riesz;
    k.beta_ = beta;
    const auto& e = reg.eps_list;
    if (e.empty()) return k;
    if (reg.extrapolation == Extrapolation::None) {
        k.terms_.push_back({1.0, e.back() * e.back()});
    } else {
        // leading error is O(eps^2): (rho^2 K(eps_b) - K(eps_a)) / (rho^2 - 1)
        double a = e[e.size() - 2], b = e.back(), r2 = (a / b) * (a / b);
        k.terms_.push_back({r2 / (r2 - 1.0), b * b});
        k.terms_.push_back({-1.0 / (r2 - 1.0), a * a});
    }
    return k;
}

Kernel Kernel::log(const RegularizationSchedule& reg) {
    Kernel k = riesz(0.0, reg);
    k.kind_ = KernelKind::Log;
    return k;
}

double Kernel::base(double r2) const {
    if (kind_ == KernelKind::Log) return 0.5 * std::log(r2);
    if (beta_ == 1.0) return 1.0 / std::sqrt(r2);
    if (beta_ == 2.0) return 1.0 / r2;
    return std::pow(r2, -0.5 * beta_);
}

double Kernel::exact_value(double r2) const { return base(r2); }

double Kernel::operator()(double r2) const {
    if (terms_.empty()) return base(r2);
    double s = 0;
    for (auto [c, e2] : terms_) s += c * base(r2 + e2);
    return s;
}

double riesz_kernel(const Point& x, const Point& y, const ExponentConfig& cfg, double eps) {
    if (eps < 0) throw ValidationError("riesz_kernel: eps must be >= 0");
    double r2 = dist2(x, y);
    if (r2 == 0.0 && eps == 0.0) throw DomainError("riesz_kernel: coincident points with eps = 0");
    return std::pow(r2 + eps * eps, -0.5 * cfg.beta());
}

double shell_potential(const Kernel& k, int n, double a, double s) {
    const double area = n == 2 ? 2.0 : unit_sphere_area(n - 1);
    const double gap = (1.0 - s) * (1.0 - s);
    auto integrand = [&](double th) {
        double sh = std::sin(0.5 * th);
        double r2 = a * a * (gap + 4.0 * s * sh * sh);
        double v = k(r2);
        return n == 2 ? v : v * std::pow(std::sin(th), n - 2);
    };
    double total;
    const double d = std::abs(1.0 - s);
    if (d < 0.05) {
        // resolve the near-singular cap separately
        double cut = std::max(20.0 * d, 1e-3);
        total = integrate_1d(integrand, 0.0, cut) + integrate_1d(integrand, cut, kPi);
    } else {
        total = integrate_1d(integrand, 0.0, kPi);
    }
    return std::pow(a, n - 1) * area * total;
}

namespace {

// Exact integral of the (unregularized) Riesz kernel over [-R,R]^{n-1} x {0}
// seen from (x', z), x' inside the box.
double box_integral(const Kernel& k, int n, double R, const Point& xp, double z, const GaussRule& phi_rule) {
    const double beta = k.beta();
    if (n == 2) {
        auto J = [&](double a) {
            if (a <= 0) return 0.0;
            if (z == 0.0) return std::pow(a, 1.0 - beta) / (1.0 - beta);
            return integrate_1d([&](double t) { return std::pow(t * t + z * z, -0.5 * beta); }, 0.0, a);
        };
        return J(R - xp[0]) + J(R + xp[0]);
    }
    // n == 3: four corner rectangles, each split into two triangles; the
    // radial integral is closed form, the angle is Gauss-Legendre.
    const double g = 2.0 - beta;
    const double zg = z == 0.0 ? 0.0 : std::pow(z, g);
    auto G = [&](double rho) { return (std::pow(rho * rho + z * z, 0.5 * g) - zg) / g; };
    auto T = [&](double a, double b) {
        double top = std::atan2(b, a), s = 0;
        for (std::size_t m = 0; m < phi_rule.x.size(); ++m) {
            double phi = top * phi_rule.x[m];
            s += top * phi_rule.w[m] * G(a / std::cos(phi));
        }
        return s;
    };
    auto rect = [&](double a, double b) { return (a <= 0 || b <= 0) ? 0.0 : T(a, b) + T(b, a); };
    double a0 = R - xp[0], a1 = R + xp[0], b0 = R - xp[1], b1 = R + xp[1];
    return rect(a0, b0) + rect(a0, b1) + rect(a1, b0) + rect(a1, b1);
}

// out[j] += sum_k src[k] T[j - k] on an N^{dims} lattice, T indexed by the
// shifted difference (d + N - 1) per axis.
void lattice_correlate(int dims, int N, const double* T, const double* src, double* out) {
    const int W = 2 * N - 1;
    if (dims == 1) {
        for (int j = 0; j < N; ++j) {
            double s = 0;
            const double* row = T + j + N - 1;
            for (int k = 0; k < N; ++k) s += src[k] * row[-k];
            out[j] += s;
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (int j0 = 0; j0 < N; ++j0) {
        for (int j1 = 0; j1 < N; ++j1) {
            double s = 0;
            for (int k0 = 0; k0 < N; ++k0) {
                const double* row = T + static_cast<std::ptrdiff_t>(j0 - k0 + N - 1) * W + j1 + N - 1;
                const double* sk = src + static_cast<std::ptrdiff_t>(k0) * N;
                for (int k1 = 0; k1 < N; ++k1) s += sk[k1] * row[-k1];
            }
            out[static_cast<std::ptrdiff_t>(j0) * N + j1] += s;
        }
    }
}

std::vector<double> build_lattice_table(int n, int N, double h, const std::vector<double>& heights,
                                        const std::function<double(double)>& fn) {
    const int W = 2 * N - 1;
    const std::size_t per_level = n == 2 ? W : static_cast<std::size_t>(W) * W;
    std::vector<double> T(per_level * heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) {
        double z2 = heights[i] * heights[i];
        double* Ti = T.data() + i * per_level;
        if (n == 2) {
            for (int d = 0; d < W; ++d) {
                double dx = (d - N + 1) * h;
                Ti[d] = fn(dx * dx + z2);
            }
        } else {
            for (int d0 = 0; d0 < W; ++d0) {
                double dx = (d0 - N + 1) * h;
                for (int d1 = 0; d1 < W; ++d1) {
                    double dy = (d1 - N + 1) * h;
                    Ti[static_cast<std::size_t>(d0) * W + d1] = fn(dx * dx + dy * dy + z2);
                }
            }
        }
    }
    return T;
}

bool same_point(const Point& a, const Point& b) {
    if (a.dim() != b.dim()) return false;
    return dist2(a, b) <= 1e-24 * (1.0 + a.norm2());
}

constexpr std::size_t kBallTableCap = 12'000'000;

}  // namespace

struct IntegralOperator::Impl {
    GridPtr bnd, vol;
    int n = 0;
    Kernel K;
    Structure structure = Structure::Dense;
    bool corrected = false;

    // ball: volume index = i * n_ang + a * M + t ; boundary index = b * M + s
    int NR = 0, n_outer = 0, M = 0, n_ang = 0;
    std::vector<double> ball_table;  // [i][a][b][d], empty when too large
    std::vector<double> ball_corr;   // [i][a]

    // half-space
    int N = 0, dims = 0, levels = 0;
    std::size_t nb = 0, per_level = 0;
    double R = 0, h = 0;
    std::vector<double> lattice;  // [level][d...]
    std::vector<double> hs_corr;  // [i * nb + j]
    GaussRule phi_rule;

    std::vector<double> corr_weight;  // W_x / w_{column(x)}

    // Above a few spacings the midpoint sum is spectrally accurate; the
    // subtraction would only add its O(h^2) box-edge error.
    bool near_field(double z) const { return z < 3.0 * h; }

    std::size_t column(std::size_t x) const { return structure == Structure::Ball ? x % n_ang : x % nb; }
    double corr(std::size_t x) const {
        if (structure == Structure::Ball) return ball_corr[(x / n_ang) * n_outer + (x % n_ang) / M];
        return hs_corr[x];
    }

    void setup();
    void setup_ball();
    void setup_halfspace();
    double kernel_at(std::size_t x, std::size_t y) const {
        return K(dist2(vol->point(x), bnd->point(y)));
    }
    std::vector<double> apply_direct(const std::vector<double>& wf) const;
    std::vector<double> apply_transpose_direct(const std::vector<double>& Wg) const;
};

void IntegralOperator::Impl::setup() {
    if (!bnd || !vol) throw ValidationError("operator: null grid");
    if (!bnd->is_boundary_kind()) throw ValidationError("operator: source must be a boundary or sphere grid");
    bool ok = (bnd->kind() == DomainKind::Sphere && vol->kind() == DomainKind::Ball) ||
              (bnd->kind() == DomainKind::HalfSpaceBoundary && vol->kind() == DomainKind::HalfSpaceVolume);
    if (!ok)
        throw ValidationError(std::string("operator: grid kinds do not match (") + to_string(bnd->kind()) + ", " +
                              to_string(vol->kind()) + ")");
    if (bnd->dim() != n || vol->dim() != n) throw ValidationError("operator: dimension mismatch");

    if (const auto* B = vol->ball()) {
        const auto* S = bnd->sphere();
        if (S && S->level == B->sphere.level && std::abs(S->radius - B->sphere.radius) <= 1e-14 * S->radius &&
            same_point(S->center, B->sphere.center))
            setup_ball();
    } else if (const auto* Lv = vol->halfspace()) {
        const auto* Lb = bnd->halfspace();
        if (Lb && Lb->per_axis == Lv->per_axis && Lb->h == Lv->h && Lb->extent == Lv->extent) setup_halfspace();
    }
    if (corrected) {
        corr_weight.resize(vol->size());
        for (std::size_t x = 0; x < vol->size(); ++x) corr_weight[x] = vol->weight(x) / bnd->weight(column(x));
    }
}

void IntegralOperator::Impl::setup_ball() {
    structure = Structure::Ball;
    const auto& B = *vol->ball();
    NR = static_cast<int>(B.radial_nodes.size());
    n_outer = B.sphere.n_outer;
    M = B.sphere.n_phi;
    n_ang = n_outer * M;
    const std::size_t entries = static_cast<std::size_t>(NR) * n_outer * n_outer * M;
    if (entries <= kBallTableCap) {
        ball_table.resize(entries);
#pragma omp parallel for schedule(static)
        for (int ia = 0; ia < NR * n_outer; ++ia) {
            int i = ia / n_outer, a = ia % n_outer;
            for (int b = 0; b < n_outer; ++b)
                for (int d = 0; d < M; ++d) {
                    std::size_t x = static_cast<std::size_t>(i) * n_ang + a * M + d;
                    std::size_t y = static_cast<std::size_t>(b) * M;
                    ball_table[((static_cast<std::size_t>(i) * n_outer + a) * n_outer + b) * M + d] = kernel_at(x, y);
                }
        }
    }
    if (!K.exact()) return;
    corrected = true;
    ball_corr.assign(static_cast<std::size_t>(NR) * n_outer, 0.0);
    const double radius = B.sphere.radius;
    for (int i = 0; i < NR; ++i) {
        double phi = shell_potential(K, n, radius, B.radial_nodes[i]);
        for (int a = 0; a < n_outer; ++a) {
            std::size_t x = static_cast<std::size_t>(i) * n_ang + a * M;
            double s = 0;
            for (std::size_t y = 0; y < bnd->size(); ++y) s += bnd->weight(y) * kernel_at(x, y);
            ball_corr[static_cast<std::size_t>(i) * n_outer + a] = phi - s;
        }
    }
}

void IntegralOperator::Impl::setup_halfspace() {
    if (K.kind() != KernelKind::Riesz) throw UnsupportedError("operator: log kernel only on the ball");
    structure = Structure::HalfSpace;
    const auto& L = *vol->halfspace();
    N = L.per_axis;
    dims = n - 1;
    levels = static_cast<int>(L.heights.size());
    nb = L.n_boundary;
    R = L.extent;
    h = L.h;
    const int W = 2 * N - 1;
    per_level = dims == 1 ? W : static_cast<std::size_t>(W) * W;
    lattice = build_lattice_table(n, N, h, L.heights, [this](double r2) { return K(r2); });
    if (!K.exact()) return;
    corrected = true;
    phi_rule = gauss_legendre(32, 0.0, 1.0);
    std::vector<double> wones(nb);
    for (std::size_t j = 0; j < nb; ++j) wones[j] = bnd->weight(j);
    hs_corr.assign(nb * levels, 0.0);
    for (int i = 0; i < levels; ++i) {
        if (!near_field(L.heights[i])) continue;
        lattice_correlate(dims, N, lattice.data() + i * per_level, wones.data(), hs_corr.data() + i * nb);
        const double z = L.heights[i];
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(nb); ++j) {
            Point xp(dims);
            for (int m = 0; m < dims; ++m) xp[m] = bnd->coord(j, m);
            hs_corr[i * nb + j] = box_integral(K, n, R, xp, z, phi_rule) - hs_corr[i * nb + j];
        }
    }
}

std::vector<double> IntegralOperator::Impl::apply_direct(const std::vector<double>& wf) const {
    std::vector<double> out(vol->size(), 0.0);
    if (structure == Structure::HalfSpace) {
        for (int i = 0; i < levels; ++i)
            lattice_correlate(dims, N, lattice.data() + i * per_level, wf.data(), out.data() + i * nb);
        return out;
    }
    if (structure == Structure::Ball && !ball_table.empty()) {
#pragma omp parallel for schedule(static)
        for (int ia = 0; ia < NR * n_outer; ++ia) {
            int i = ia / n_outer, a = ia % n_outer;
            double* o = out.data() + static_cast<std::size_t>(i) * n_ang + a * M;
            for (int b = 0; b < n_outer; ++b) {
                const double* row = ball_table.data() + ((static_cast<std::size_t>(i) * n_outer + a) * n_outer + b) * M;
                const double* src = wf.data() + static_cast<std::size_t>(b) * M;
                for (int t = 0; t < M; ++t) {
                    double s = 0;
                    for (int u = 0; u <= t; ++u) s += src[u] * row[t - u];
                    for (int u = t + 1; u < M; ++u) s += src[u] * row[t - u + M];
                    o[t] += s;
                }
            }
        }
        return out;
    }
    const std::ptrdiff_t nv = static_cast<std::ptrdiff_t>(vol->size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t x = 0; x < nv; ++x) {
        double s = 0;
        for (std::size_t y = 0; y < bnd->size(); ++y) s += wf[y] * kernel_at(x, y);
        out[x] = s;
    }
    return out;
}

std::vector<double> IntegralOperator::Impl::apply_transpose_direct(const std::vector<double>& Wg) const {
    std::vector<double> out(bnd->size(), 0.0);
    if (structure == Structure::HalfSpace) {
        // the lattice table is even in the difference, so the transpose is the same correlation
        for (int i = 0; i < levels; ++i)
            lattice_correlate(dims, N, lattice.data() + i * per_level, Wg.data() + i * nb, out.data());
        return out;
    }
    if (structure == Structure::Ball && !ball_table.empty()) {
#pragma omp parallel for schedule(static)
        for (int b = 0; b < n_outer; ++b) {
            double* o = out.data() + static_cast<std::size_t>(b) * M;
            for (int i = 0; i < NR; ++i)
                for (int a = 0; a < n_outer; ++a) {
                    const double* row =
                        ball_table.data() + ((static_cast<std::size_t>(i) * n_outer + a) * n_outer + b) * M;
                    const double* src = Wg.data() + static_cast<std::size_t>(i) * n_ang + a * M;
                    for (int s = 0; s < M; ++s) {
                        double acc = 0;
                        for (int t = s; t < M; ++t) acc += src[t] * row[t - s];
                        for (int t = 0; t < s; ++t) acc += src[t] * row[t - s + M];
                        o[s] += acc;
                    }
                }
        }
        return out;
    }
    const std::ptrdiff_t nbd = static_cast<std::ptrdiff_t>(bnd->size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t y = 0; y < nbd; ++y) {
        double s = 0;
        for (std::size_t x = 0; x < vol->size(); ++x) s += Wg[x] * kernel_at(x, y);
        out[y] = s;
    }
    return out;
}

IntegralOperator::IntegralOperator(GridPtr boundary, GridPtr volume, const ExponentConfig& cfg,
                                   const RegularizationSchedule& reg)
    : IntegralOperator(std::move(boundary), std::move(volume), cfg.n, Kernel::riesz(cfg.beta(), reg)) {}

IntegralOperator::IntegralOperator(GridPtr boundary, GridPtr volume, int n, Kernel kernel) {
    auto impl = std::make_shared<Impl>();
    impl->bnd = std::move(boundary);
    impl->vol = std::move(volume);
    impl->n = n;
    impl->K = std::move(kernel);
    impl->setup();
    impl_ = std::move(impl);
}

ScalarField IntegralOperator::extend(const ScalarField& f) const {
    const auto& I = *impl_;
    if (f.grid() != I.bnd && f.grid()->size() != I.bnd->size())
        throw ValidationError("extend: field is not on the operator's boundary grid");
    std::vector<double> wf(f.size());
    for (std::size_t y = 0; y < wf.size(); ++y) wf[y] = I.bnd->weight(y) * f[y];
    auto out = I.apply_direct(wf);
    if (I.corrected)
        for (std::size_t x = 0; x < out.size(); ++x) out[x] += f[I.column(x)] * I.corr(x);
    return ScalarField(I.vol, std::move(out));
}

ScalarField IntegralOperator::restrict(const ScalarField& g) const {
    const auto& I = *impl_;
    if (g.grid() != I.vol && g.grid()->size() != I.vol->size())
        throw ValidationError("restrict: field is not on the operator's volume grid");
    std::vector<double> Wg(g.size());
    for (std::size_t x = 0; x < Wg.size(); ++x) Wg[x] = I.vol->weight(x) * g[x];
    auto out = I.apply_transpose_direct(Wg);
    if (I.corrected)
        for (std::size_t x = 0; x < g.size(); ++x) out[I.column(x)] += I.corr_weight[x] * g[x] * I.corr(x);
    return ScalarField(I.bnd, std::move(out));
}

double IntegralOperator::pair(const ScalarField& g, const ScalarField& f) const {
    auto Ef = extend(f);
    double s = 0;
    for (std::size_t x = 0; x < g.size(); ++x) s += impl_->vol->weight(x) * g[x] * Ef[x];
    return s;
}

double IntegralOperator::direct_sum(const ScalarField& f, const Point& x) const {
    const auto& I = *impl_;
    double s = 0;
    for (std::size_t y = 0; y < I.bnd->size(); ++y) {
        double r2 = dist2(x, I.bnd->point(y));
        if (r2 == 0.0 && I.K.exact()) throw DomainError("direct_sum: target coincides with a source node");
        s += I.bnd->weight(y) * f[y] * I.K(r2);
    }
    return s;
}

double IntegralOperator::evaluate_column(const ScalarField& f, std::size_t column, double z) const {
    const auto& I = *impl_;
    if (I.structure != Structure::HalfSpace) throw UnsupportedError("evaluate_column: half-space operators only");
    if (column >= I.nb) throw ValidationError("evaluate_column: column out of range");
    if (z < 0) throw DomainError("evaluate_column: z must be >= 0");
    Point x = I.bnd->point(column);
    x[I.n - 1] = z;
    if (!I.corrected || !I.near_field(z)) return direct_sum(f, x);
    const double fj = f[column];
    double s = 0;
    for (std::size_t y = 0; y < I.nb; ++y) {
        if (y == column) continue;
        s += I.bnd->weight(y) * (f[y] - fj) * I.K(dist2(x, I.bnd->point(y)));
    }
    Point xp(I.dims);
    for (int m = 0; m < I.dims; ++m) xp[m] = x[m];
    return s + fj * box_integral(I.K, I.n, I.R, xp, z, I.phi_rule);
}

const GridPtr& IntegralOperator::boundary() const { return impl_->bnd; }
const GridPtr& IntegralOperator::volume() const { return impl_->vol; }
IntegralOperator::Structure IntegralOperator::structure() const { return impl_->structure; }
bool IntegralOperator::corrected() const { return impl_->corrected; }
const Kernel& IntegralOperator::kernel() const { return impl_->K; }

LatticeConvolution::LatticeConvolution(const HalfSpaceGrids& grids, std::function<double(double)> profile_r2)
    : grids_(grids) {
    const auto* L = grids.volume ? grids.volume->halfspace() : nullptr;
    if (!L || !grids.boundary || grids.boundary->kind() != DomainKind::HalfSpaceBoundary)
        throw ValidationError("lattice convolution: needs a half-space grid pair");
    n_ = grids.volume->dim();
    N_ = L->per_axis;
    levels_ = static_cast<int>(L->heights.size());
    width_ = 2 * N_ - 1;
    table_ = build_lattice_table(n_, N_, L->h, L->heights, profile_r2);
}

std::vector<double> LatticeConvolution::apply(std::span<const double> h) const {
    const auto& B = *grids_.boundary;
    const std::size_t nb = B.size();
    if (h.size() != nb) throw ValidationError("lattice convolution: field length mismatch");
    std::vector<double> wh(nb);
    for (std::size_t k = 0; k < nb; ++k) wh[k] = B.weight(k) * h[k];
    const std::size_t per_level = n_ == 2 ? width_ : static_cast<std::size_t>(width_) * width_;
    std::vector<double> out(nb * levels_, 0.0);
    for (int i = 0; i < levels_; ++i)
        lattice_correlate(n_ - 1, N_, table_.data() + i * per_level, wh.data(), out.data() + i * nb);
    return out;
}

ScalarField extend(const ScalarField& f, const GridPtr& target, const ExponentConfig& cfg,
                   const RegularizationSchedule& reg) {
    return IntegralOperator(f.grid(), target, cfg, reg).extend(f);
}

ScalarField restrict(const ScalarField& g, const GridPtr& target, const ExponentConfig& cfg,
                     const RegularizationSchedule& reg) {
    return IntegralOperator(target, g.grid(), cfg, reg).restrict(g);
}

double lp_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw ValidationError("lp_norm: p must be >= 1");
    double m = 0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    if (std::isinf(p) || m == 0.0) return m;
    const auto& g = *f.grid();
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += g.weight(i) * std::pow(std::abs(f[i]) / m, p);
    return m * std::pow(s, 1.0 / p);
}

double operator_ratio(const ScalarField& f, const ExponentConfig& cfg, const IntegralOperator& op) {
    double den = lp_norm(f, cfg.p);
    if (den == 0.0) throw ValidationError("operator_ratio: zero field");
    return lp_norm(op.extend(f), cfg.q) / den;
}

double operator_ratio(const ScalarField& f, const ExponentConfig& cfg, const GridPtr& volume,
                      const RegularizationSchedule& reg) {
    return operator_ratio(f, cfg, IntegralOperator(f.grid(), volume, cfg, reg));
}

double log_hls_constant(const GridPtr& ball) {
    const auto* B = ball->ball();
    if (!B || std::abs(B->sphere.radius - 1.0) > 1e-14) throw ValidationError("log-HLS constant: needs the unit ball");
    const int n = ball->dim();
    const double wn = unit_ball_volume(n);
    const Kernel lk = Kernel::log();
    const std::size_t n_ang = B->sphere.unit_nodes.size();
    double s = 0;
    for (std::size_t i = 0; i < B->radial_nodes.size(); ++i) {
        double In = -2.0 / wn * shell_potential(lk, n, 1.0, B->radial_nodes[i]);
        double e = std::exp(In);
        for (std::size_t a = 0; a < n_ang; ++a) s += ball->weight(i * n_ang + a) * e;
    }
    return std::log(n * wn) / (n - 1) + std::log(s) / n;
}

LogFunctional log_functional(const ScalarField& F, const ScalarField& G, const IntegralOperator& op,
                             double mass_tol) {
    if (op.kernel().kind() != KernelKind::Log) throw ValidationError("log_functional: operator must use the log kernel");
    if (F.grid()->kind() != DomainKind::Sphere || G.grid()->kind() != DomainKind::Ball)
        throw ValidationError("log_functional: F on the sphere, G on the ball");
    auto entropy_mass = [](const ScalarField& u, double& ent) {
        double mass = 0;
        ent = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            double v = u[i];
            if (v < 0) throw DomainError("log_functional: negative density");
            double w = u.grid()->weight(i);
            mass += w * v;
            if (v > 0) ent += w * v * std::log(v);
        }
        return mass;
    };
    LogFunctional r;
    double mF = entropy_mass(F, r.entropy_F), mG = entropy_mass(G, r.entropy_G);
    if (std::abs(mF - 1.0) > mass_tol || std::abs(mG - 1.0) > mass_tol)
        throw ValidationError("log_functional: densities must have unit mass");
    const int n = F.grid()->dim();
    r.cross = op.pair(G, F);
    r.lhs = -2.0 * r.cross;
    r.lhs_stated = -2.0 * n * unit_ball_volume(n) * r.cross;
    r.C_n = log_hls_constant(G.grid());
    r.rhs = r.entropy_G / n + r.entropy_F / (n - 1) + r.C_n;
    return r;
}

}  // namespace hls
