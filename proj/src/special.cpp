#include "hls/special.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "hls/core.hpp"

namespace hls {

double unit_ball_volume(int n) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

namespace {
// P_m(z) and P_{m-1}(z) by the three-term recurrence
void legendre_pair(int m, double z, double& pm, double& pm1) {
    pm = z;
    pm1 = 1.0;
    for (int k = 2; k <= m; ++k) {
        double pk = ((2.0 * k - 1.0) * z * pm - (k - 1.0) * pm1) / k;
        pm1 = pm;
        pm = pk;
    }
}
}  // namespace

GaussRule gauss_legendre(int m, double a, double b) {
    if (m < 1) throw ValidationError("gauss_legendre: need at least one node");
    GaussRule r;
    r.x.resize(m);
    r.w.resize(m);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double pm, pm1;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(m, z, pm, pm1);
            double dz = pm / (m * (z * pm - pm1) / (z * z - 1.0));
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        legendre_pair(m, z, pm, pm1);
        double dp = m * (z * pm - pm1) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = mid - half * z;
        r.x[m - 1 - i] = mid + half * z;
        r.w[i] = r.w[m - 1 - i] = half * w;
    }
    if (m % 2 == 1) r.x[m / 2] = mid;
    return r;
}

double integrate_1d(const std::function<double(double)>& fn, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts(15);
    return ts.integrate(fn, a, b, tol);
}

}  // namespace hls
