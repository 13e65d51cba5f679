#pragma once

#include <array>
#include <vector>

#include "sobolev/bubble.hpp"
#include "sobolev/core.hpp"
#include "sobolev/quadrature.hpp"

namespace sobolev {

struct ProjectionResult {
    Bubble bubble;
    double objective = 0.0;
    // int v^{p*-2} xi (u - v) for xi = v, d_b v, d_{x_1} v, ..., d_{x_n} v, each divided by
    // ||v||_{p*}^{p*-2} ||xi||_{p*} ||u||_{p*}; the transverse entries vanish by symmetry
    std::vector<double> orthogonality_defect;
    double distance = 0.0;  // ||D(u - v)||_p / ||Du||_p
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    [[nodiscard]] double max_zonal_defect() const;
};

struct ProjectionOptions {
    int restarts = 5;
    int max_evals = 10000;
    double f_tol = 1e-10;
    double x_tol = 1e-8;
    double max_init_distance = 0.5;
};

// (1/p*) int |v|^{p*} - (1/(p*-1)) int |v|^{p*-2} v u
double functional_Fu(const NodeSet& ns, const FieldTable& u, const Bubble& bub, const Dim& dim);

// ||D(u - v)||_p / ||Du||_p
double gradient_distance(const NodeSet& ns, const FieldTable& u, const Bubble& bub, const Dim& dim);

// Zonal orthogonality entries (v, d_b v, d_z v) and the scale used to normalize them.
std::array<double, 3> orthogonality_defect(const NodeSet& ns, const FieldTable& u, const Bubble& bub,
                                           const Dim& dim);

// Amplitude from the largest value, concentration from the half-height radius, center from the
// v^{p*}-weighted centroid on the axis.
Bubble moment_guess(const NodeSet& ns, const FieldTable& u, const Dim& dim);

// Minimizer of F_u over (a, b, x0): Nelder–Mead in (log a, log b, x0) with restarts, then
// Gauss–Newton on the first-order condition. Throws NO_NEARBY_BUBBLE / NOT_CONVERGED.
ProjectionResult project_Fu(const NodeSet& ns, const FieldTable& u, const Dim& dim, const Bubble& init,
                            const ProjectionOptions& opt = {});

// Minimizer of ||D(u - v)||_p over (a, b, x0).
ProjectionResult project_gradient_distance(const NodeSet& ns, const FieldTable& u, const Dim& dim,
                                           const Bubble& init, const ProjectionOptions& opt = {});

}  // namespace sobolev
