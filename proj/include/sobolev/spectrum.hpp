#pragma once

#include <functional>
#include <vector>

#include "sobolev/bubble.hpp"
#include "sobolev/core.hpp"
#include "sobolev/quadrature.hpp"

namespace sobolev {

// ---------------------------------------------------------------- sector eigenproblems

// Q_ell[f] = int (p-1)|v'|^{p-2} f'^2 r^{n-1} dr + ell(ell+n-2) int |v'|^{p-2} f^2 r^{n-3} dr against
// int v^{p*-2} f^2 r^{n-1} dr for the unit-normalized bubble, discretized in s = log r with
// second-order differences. Unknowns exclude the Dirichlet nodes (r_max always, r_min for ell >= 1).
// The stiffness form is stored edge-wise so that every product and factorization is evaluated
// from differences of neighbouring values, which keeps relative accuracy on the strongly graded
// coefficients.
struct SectorProblem {
    int ell = 0;
    int n = 3;
    double p = 2.0;
    Bubble v;                    // normalized bubble the forms are built from
    std::vector<double> r;       // radii of the unknowns
    std::vector<double> left;    // edge coefficient to the previous unknown (or to the Dirichlet node / 0)
    std::vector<double> right;   // edge coefficient to the next unknown (or to the Dirichlet node)
    std::vector<double> pot;     // diagonal potential from the angular term
    std::vector<double> mass;    // diagonal mass
    [[nodiscard]] std::size_t size() const { return r.size(); }
    // K f in flux form; the second overload takes the increments df_i = f_{i+1} - f_i (df_{U-1} = -f_{U-1})
    [[nodiscard]] std::vector<double> apply_K(const std::vector<double>& f) const;
    [[nodiscard]] std::vector<double> apply_K(const std::vector<double>& f, const std::vector<double>& df) const;
    // number of generalized eigenvalues below mu
    [[nodiscard]] std::size_t count_below(double mu) const;
};

SectorProblem assemble_sector(int ell, const Dim& dim, const GridSpec& spec);

struct SectorEigenResult {
    int ell = 0;
    std::vector<double> eigenvalues;                // ascending
    std::vector<std::vector<double>> eigenvectors;  // on the unknowns, M-normalized
    std::vector<std::vector<double>> increments;    // f_{i+1} - f_i of each eigenvector, accurate where f is flat
    std::vector<double> residuals;                  // ||K f - mu M f||_{M^{-1}} / ||M f||_{M^{-1}}
    std::vector<double> r;
};

SectorEigenResult solve_sector(const SectorProblem& prob, int k);

// M-weighted cosine between an eigenvector and a reference profile sampled at the unknowns
double mass_cosine(const SectorProblem& prob, const std::vector<double>& f, const std::vector<double>& g);

struct SpectralGap {
    double lambda = 0.0;
    double mu_perp = 0.0;
    double c = 0.0;  // S^p ||v||^{p-p*} with ||v||_{p*} = 1
    double S = 0.0;
    std::vector<SectorEigenResult> sectors;  // ell = 0, 1, 2, 3
};

// lambda = (min{mu_3(ell=0), mu_2(ell=1), mu_1(ell=2)} - (p*-1) c) / 2; throws NEGATIVE_GAP and
// SECTOR_ORDERING_UNEXPECTED.
SpectralGap spectral_gap(const Dim& dim, const GridSpec& spec);

// ---------------------------------------------------------------- weighted inequalities

enum class GapCase { I, II, III };
GapCase gap_case(const Dim& dim);

// Removes the components along v, d_b v, d_{x_n} v in the v^{p*-2} pairing (Gram solve), in place.
// Returns the largest remaining normalized pairing.
double orthogonalize(const NodeSet& ns, FieldTable& phi, const Bubble& v, const Dim& dim);

// Scales phi so that ||D phi||_p = target.
void scale_gradient_norm(const NodeSet& ns, FieldTable& phi, const Dim& dim, double target);

struct GapInequality {
    double lhs = 0.0, rhs = 0.0;
    double quad = 0.0, w_term = 0.0, min_term = 0.0, weighted_l2 = 0.0;
    [[nodiscard]] bool holds() const { return lhs >= rhs; }
};

// Unperturbed spectral-gap inequality for phi orthogonal to the tangent space:
//   lhs = int |Dv|^{p-2} |D phi|^2 + (p-2) |Dv|^{p-4} (Dv . D phi)^2   (stored in quad as well)
//   rhs = ((p*-1) S^p + 2 lambda) ||v||_{p*}^{p-p*} int v^{p*-2} phi^2
GapInequality check_spectral_gap_inequality(const NodeSet& ns, const FieldTable& phi, const Bubble& v, const Dim& dim,
                                            double lambda, double S);

// Both sides of the perturbed spectral-gap inequality for case (i)/(ii)/(iii).
GapInequality check_prop_gap_inequality(const NodeSet& ns, const FieldTable& phi, const Bubble& v, const Dim& dim,
                                        GapCase which, double gamma0, double C1, double lambda, double S);

struct EmbeddingRatios {
    double global = 0.0;  // int v^{p*-2} phi^2 / int |Dv|^{p-2} |D phi|^2
    double small = 0.0;   // same numerator restricted to |x| < rho
    double large = 0.0;   // numerator restricted to |x| > 1/rho, times log^2 rho
};
EmbeddingRatios embedding_ratios(const NodeSet& ns, const FieldTable& phi, const FieldTable& v, const Dim& dim,
                                 double rho);

// int (v + eps|phi|)^{p*-2} phi^2 / int (|Dv| + eps|D phi|)^{p-2} |D phi|^2 after scaling phi so that the
// denominator is at most 1; requires p <= 2n/(n+2).
double orlicz_poincare_ratio(const NodeSet& ns, const FieldTable& phi, const FieldTable& v, const Dim& dim,
                             double eps);

// radial profile: value and derivative at r
using RadialProfile = std::function<std::pair<double, double>(double)>;

// int_R^inf |u|^p r^{n-1-alpha} dr / int_R^inf |u'|^p r^{n-1-alpha+p} dr on a log grid of `nodes`
// points spanning `decades` decades beyond R.
double hardy_poincare_ratio(const RadialProfile& u, double alpha, double R, const Dim& dim, int nodes = 4096,
                            double decades = 12.0);

}  // namespace sobolev
