#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace hls {

// Largest ambient dimension any builder accepts (sphere/ball up to n=5).
inline constexpr int kMaxDim = 5;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-capacity point in R^n, n <= kMaxDim. Value type, no heap traffic in
// inner loops.
class Point {
public:
    Point() = default;
    explicit Point(int dim) : dim_(dim) {
        if (dim < 0 || dim > kMaxDim) throw ValidationError("point dimension out of range");
    }
    Point(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        if (dim_ > kMaxDim) throw ValidationError("point dimension out of range");
        int i = 0;
        for (double v : xs) x_[i++] = v;
    }

    int dim() const { return dim_; }
    double& operator[](int i) { return x_[i]; }
    double operator[](int i) const { return x_[i]; }
    double last() const { return x_[dim_ - 1]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < dim_; ++i) s += x_[i] * x_[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    Point& operator+=(const Point& o) { for (int i = 0; i < dim_; ++i) x_[i] += o.x_[i]; return *this; }
    Point& operator-=(const Point& o) { for (int i = 0; i < dim_; ++i) x_[i] -= o.x_[i]; return *this; }
    Point& operator*=(double s) { for (int i = 0; i < dim_; ++i) x_[i] *= s; return *this; }

    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(double s, Point a) { return a *= s; }
    friend Point operator*(Point a, double s) { return a *= s; }

private:
    std::array<double, kMaxDim> x_{};
    int dim_ = 0;
};

inline double dot(const Point& a, const Point& b) {
    double s = 0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}
inline double dist2(const Point& a, const Point& b) {
    double s = 0;
    for (int i = 0; i < a.dim(); ++i) { double d = a[i] - b[i]; s += d * d; }
    return s;
}
inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

// Boundary point (y', 0) from y' in R^{n-1}.
inline Point lift_boundary(const Point& yp) {
    Point y(yp.dim() + 1);
    for (int i = 0; i < yp.dim(); ++i) y[i] = yp[i];
    return y;
}

}  // namespace hls
