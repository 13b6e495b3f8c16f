#include "hls/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace hls {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1)), a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}
}  // namespace

Halton::Halton(int dims, std::uint64_t seed) : dims_(dims) {
    if (dims < 1 || dims > 10) throw std::invalid_argument("Halton: 1..10 dimensions");
    Rng rng(seed);
    for (int d = 0; d < dims; ++d) shift_.push_back(rng.uniform());
}

std::vector<double> Halton::next() {
    std::vector<double> x(dims_);
    for (int d = 0; d < dims_; ++d) {
        double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
        x[d] = v - std::floor(v);
    }
    ++index_;
    return x;
}

}  // namespace hls
