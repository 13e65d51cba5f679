#include "sobolev/random.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "sobolev/core.hpp"

namespace sobolev {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

double Rng::normal() {
    // Box–Muller; one value per call keeps the stream layout simple
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {
struct Primitive {
    int s;
    unsigned a;
    std::array<unsigned, 5> m;
};
// dimensions 2..8 from the Joe–Kuo table
constexpr std::array<Primitive, 7> kPrimitives{{
    {1, 0, {1, 0, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0, 0}},
    {3, 1, {1, 3, 1, 0, 0}},
    {3, 2, {1, 1, 1, 0, 0}},
    {4, 1, {1, 1, 3, 3, 0}},
    {4, 4, {1, 3, 5, 13, 0}},
    {5, 2, {1, 1, 5, 5, 17}},
}};
}  // namespace

Sobol::Sobol(int dim, std::uint64_t shift_seed) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw Error(ErrorCode::InvalidArgument, "Sobol dimension out of range");
    for (int k = 0; k < 32; ++k) v_[0][k] = 1u << (31 - k);
    for (int d = 1; d < dim; ++d) {
        const auto& pr = kPrimitives[d - 1];
        auto& v = v_[d];
        for (int k = 0; k < pr.s; ++k) v[k] = pr.m[k] << (31 - k);
        for (int k = pr.s; k < 32; ++k) {
            std::uint32_t val = v[k - pr.s] ^ (v[k - pr.s] >> pr.s);
            for (int i = 1; i < pr.s; ++i)
                if ((pr.a >> (pr.s - 1 - i)) & 1u) val ^= v[k - i];
            v[k] = val;
        }
    }
    Rng rng(mix_seed(shift_seed, 0x5b1));
    for (int d = 0; d < dim; ++d) shift_[d] = static_cast<std::uint32_t>(rng.next() >> 32);
}

void Sobol::next(double* out) {
    // skip the origin: advance first, then emit
    const int c = std::countr_one(index_);
    ++index_;
    for (int d = 0; d < dim_; ++d) {
        x_[d] ^= v_[d][c < 32 ? c : 31];
        out[d] = static_cast<double>(x_[d] ^ shift_[d]) * 0x1.0p-32;
    }
}

}  // namespace sobolev
