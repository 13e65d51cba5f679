#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace sobolev {

// splitmix64 finalizer; used to derive independent stream seeds from (seed, stream index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    // uniform on [0,1) with 53 random bits (independent of the standard library's distributions)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi);  // lo, hi > 0
    double normal();
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// Gray-code Sobol sequence (Joe–Kuo direction numbers) with a random digital shift.
class Sobol {
public:
    static constexpr int kMaxDim = 8;
    Sobol(int dim, std::uint64_t shift_seed);
    // next point in [0,1)^dim
    void next(double* out);
    [[nodiscard]] int dim() const { return dim_; }

private:
    int dim_;
    std::uint64_t index_ = 0;
    std::array<std::uint32_t, kMaxDim> x_{};
    std::array<std::uint32_t, kMaxDim> shift_{};
    std::array<std::array<std::uint32_t, 32>, kMaxDim> v_{};
};

}  // namespace sobolev
