#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hls {

// Seeded generator with platform-independent uniform/normal conversion
// (std::uniform_real_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0;
};

// Halton points in [0,1)^dims with a seeded Cranley-Patterson shift.
class Halton {
public:
    Halton(int dims, std::uint64_t seed);
    std::vector<double> next();

private:
    int dims_;
    std::uint64_t index_ = 1;
    std::vector<double> shift_;
};

}  // namespace hls
