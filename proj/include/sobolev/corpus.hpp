#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sobolev/core.hpp"
#include "sobolev/quadrature.hpp"

namespace sobolev {

// exp(-1/(1-t^2)) on |t| < 1, zero outside; value and derivative
double bump_profile(double t);
double bump_profile_derivative(double t);

// Zonal harmonic of degree ell on S^{n-1} as a function of mu = cos(theta), normalized to Z(1) = 1
// (Gegenbauer C_ell^{(n-2)/2}; Chebyshev for n = 2). Writes the value and the mu-derivative.
void zonal_harmonic(int n, int ell, double mu, double& value, double& derivative);

// f(r) Z_ell(mu) about the axial point center_z, with r, mu measured from that point.
//   AnnulusBump: f = B((r - r0)/width), needs r0 >= width
//   BallBump:    f = r^ell B(r/width)
//   Power:       f = r^ell (1 + r^q)^{-k}
struct TestFunction {
    enum class Radial { AnnulusBump, BallBump, Power };
    Radial kind = Radial::AnnulusBump;
    int ell = 0;
    double r0 = 1.0;
    double width = 0.5;
    double q = 2.0;
    double k = 1.0;
    double center_z = 0.0;
    double scale = 1.0;

    [[nodiscard]] std::string describe() const;
    [[nodiscard]] bool compact() const { return kind != Radial::Power; }
};

MeridianSample eval_test_function(const TestFunction& tf, int n, double rho, double z);
AxisymField test_field(const TestFunction& tf, int n);

struct CorpusOptions {
    bool annulus = true;
    bool ball = true;
    bool power = false;
    int max_ell = 3;
    double r_min = 0.3, r_max = 3.0;  // annulus centers
};

// Deterministic random family of test functions for the given dimension (power profiles decay at
// least like the bubble, with an extra r^{ell} factor compensated).
std::vector<TestFunction> make_corpus(const Dim& dim, std::size_t count, std::uint64_t seed,
                                      const CorpusOptions& opt = {});

// u = v + eps * phi evaluated pointwise
AxisymField perturbed_field(const AxisymField& v, const AxisymField& phi, double eps, std::string description);

}  // namespace sobolev
