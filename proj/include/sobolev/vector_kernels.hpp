#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sobolev/core.hpp"

namespace sobolev {

// ---------------------------------------------------------------- weights and the quadratic form

enum class WeightBranch { PLess2, PGe2 };
WeightBranch weight_branch(double p);

struct Weight {
    std::vector<double> w;
    bool degenerate = false;  // |x| = 0 (or |x+y| = 0 for p >= 2): limit value returned
};
Weight weight_w(std::span<const double> x, std::span<const double> x_plus_y, double p);

// |w|^{p-2} from the two norms only, without the 1/(p-2) power (exact rewriting of both branches).
// For p = 2 it is 1. Infinite when the weight degenerates with p < 2.
double weight_factor(double nx, double nxy, double p);

// The pair (x, y) enters every inequality of this module through |x|, |y| and x.y only.
struct PairInvariants {
    double nx = 0.0, ny = 0.0, xy = 0.0;
    double nxy = 0.0;  // |x+y|, kept separately because it is computed more accurately from vectors
};
PairInvariants invariants(std::span<const double> x, std::span<const double> y);
PairInvariants invariants(double nx, double ny, double xy);
// x = e_1, y = rho (cos theta, sin theta)
PairInvariants planar_pair(double rho, double theta);

// G = p|x|^{p-2}|y|^2 + p(p-2)|w|^{p-2}(|x|-|x+y|)^2
double quad_form_G(const PairInvariants& pr, double p);
double quad_form_G(std::span<const double> x, std::span<const double> y, double p);

// min{|y|^p, |x|^{p-2}|y|^2} for p < 2, |y|^p for p >= 2
double lemma21_normalizer(const PairInvariants& pr, double p);

// |x+y|^p - [|x|^p + p|x|^{p-2}x.y + (1-kappa)/2 G + c0 N]
double lemma21_gap(const PairInvariants& pr, double p, double kappa, double c0);
double lemma21_gap(std::span<const double> x, std::span<const double> y, double p, double kappa, double c0);
// (|x+y|^p - |x|^p - p|x|^{p-2}x.y - (1-kappa)/2 G) / N: the largest admissible c0 at this pair
double lemma21_ratio(const PairInvariants& pr, double p, double kappa);

// ---------------------------------------------------------------- scalar inequalities

// Right side minus left side of the two-branch upper bound for |a+b|^{p*}
// (branch chosen from the dimension: p* <= 2 uses the rational weight, p* > 2 the C1|b|^{p*} term).
double lemma23_gap(double a, double b, const Dim& dim, double kappa, double C1);
// smallest C1 making the reduced inequality hold at t = b/a
double lemma23_requirement(double t, const Dim& dim, double kappa);

enum class AppendixBForm { Inter, Young };
struct AppendixBPoint {
    double eps = 0.0, r = 0.0, a = 0.0, b = 0.0;
};
// (eps0/3)^{1/p}
double appendixB_zeta(double eps0, const Dim& dim);
// largest a allowed by the hypothesis eps a <= zeta (1 + r^{p/(p-1)})^{1-n/p}
double appendixB_amax(double eps, double r, double zeta, const Dim& dim);
// Right side minus left side; throws CONSTRAINT_VIOLATED outside the hypothesis.
double appendixB_gap(const AppendixBPoint& x, double eps0, double zeta, double C, const Dim& dim, AppendixBForm form);
// the smallest C at this point (0 when any C works)
double appendixB_requirement(const AppendixBPoint& x, double eps0, double zeta, const Dim& dim, AppendixBForm form);

// ---------------------------------------------------------------- searches and verification passes

struct ConstantSearch {
    double estimate = 0.0;
    double extreme = 0.0;          // raw inf (c0) or sup (C1, C) over samples and polish
    std::vector<double> argument;  // where the extreme was found
    std::size_t samples = 0;
};

struct Verification {
    double worst_gap = 0.0;  // most negative gap seen (normalized as documented per check)
    std::vector<double> worst_input;
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::size_t flagged = 0;  // degenerate samples excluded from the statistics
    std::size_t case_small_r = 0, case_large_r = 0;  // appendix-B case split counts
};

// Infimum of lemma21_ratio at |x| = 1 (Sobol + uniform sampling, Nelder–Mead polish from the
// 100 worst samples). Throws SEARCH_FAILED if the estimate is not positive.
ConstantSearch search_c0(double p, double kappa, std::size_t budget, std::uint64_t seed);
// Random pairs in dimensions 2..4 with |x| = 1; gap >= -tol counts as satisfied.
Verification verify_c0(double p, double kappa, double c0, std::size_t samples, std::uint64_t seed,
                       double tol = 1e-10);

// Supremum of lemma23_requirement over a log-spaced t grid, refined around the maximum;
// at least 1/p* in the low-exponent branch.
ConstantSearch search_C1(const Dim& dim, double kappa);
// t = b/a in [-1e6, 1e6]; gap >= -tol |a|^{p*} counts as satisfied.
Verification verify_C1(const Dim& dim, double kappa, double C1, std::size_t samples, std::uint64_t seed,
                       double tol = 1e-10);

// Supremum of the appendix-B requirement at zeta = (eps0/3)^{1/p} over constrained samples.
ConstantSearch search_appendixB_C(const Dim& dim, double eps0, std::size_t budget, std::uint64_t seed);
// Checks both forms and that the second form's gap dominates the first; gap is compared with
// -tol times the size of the two sides.
Verification verify_appendixB(const Dim& dim, double eps0, double C, std::size_t samples, std::uint64_t seed,
                              double tol = 1e-12);

// Sampling ranges shared by searches and verification passes.
struct SampleRanges {
    static constexpr double y_min = 1e-8, y_max = 1e6;  // |y| at |x| = 1
    static constexpr double t_max = 1e6, t_min = 1e-8;  // |b/a|
    static constexpr double r_min = 1e-4, r_max = 1e4;  // appendix B radius
    static constexpr double b_min = 1e-8, b_max = 1e8;
    static constexpr double eps_min = 1e-6;
};

}  // namespace sobolev
