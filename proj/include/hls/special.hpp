#pragma once

#include <functional>
#include <vector>

namespace hls {

inline constexpr double kPi = 3.14159265358979323846;

// volume of the unit n-ball
double unit_ball_volume(int n);
// |S^{n-1}| = n * omega_n
double unit_sphere_area(int n);

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
// Gauss-Legendre on [a, b].
GaussRule gauss_legendre(int m, double a = -1.0, double b = 1.0);

// Integrate a smooth-or-endpoint-singular 1-D function on [a, b] with tanh-sinh.
double integrate_1d(const std::function<double(double)>& fn, double a, double b, double tol = 1e-13);

}  // namespace hls
