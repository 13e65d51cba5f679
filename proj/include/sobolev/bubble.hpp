#pragma once

#include <span>
#include <vector>

#include "sobolev/core.hpp"
#include "sobolev/quadrature.hpp"

namespace sobolev {

// v(x) = a (1 + b |x - x0|^{p/(p-1)})^{-(n-p)/p}, with x0 = (0, ..., 0, x0) on the symmetry axis.
struct Bubble {
    double a = 1.0;
    double b = 1.0;
    double x0 = 0.0;
};

void validate(const Bubble& bub);

// Radial profile at distance d from the center: value, first and second d-derivatives,
// the b-derivative and its d-derivative. Evaluated in log space so that neither large
// nor tiny d overflows.
struct BubbleProfile {
    double v = 0.0;
    double dv = 0.0;
    double d2v = 0.0;
    double db = 0.0;
    double d_db = 0.0;
};
BubbleProfile bubble_profile(const Bubble& bub, const Dim& dim, double d);

// log|v'(d)| (d > 0); -inf at d = 0
double log_abs_dv(const Bubble& bub, const Dim& dim, double d);

// Point evaluation in R^n (x has n coordinates; the last one is the axis).
double eval_bubble(const Bubble& bub, const Dim& dim, std::span<const double> x);
std::vector<double> eval_bubble_gradient(const Bubble& bub, const Dim& dim, std::span<const double> x);
// v, d_b v, d_{x_1} v, ..., d_{x_n} v
std::vector<double> tangent_basis_eval(const Bubble& bub, const Dim& dim, std::span<const double> x);

// Meridian-plane versions (rho = distance from the axis, z = axial coordinate).
MeridianSample bubble_sample(const Bubble& bub, const Dim& dim, double rho, double z);

// The three zonal tangent directions v, d_b v, d_{x_n} v with their gradients.
struct ZonalTangent {
    MeridianSample v, db, dz;
};
ZonalTangent zonal_tangent(const Bubble& bub, const Dim& dim, double rho, double z);

AxisymField bubble_field(const Bubble& bub, const Dim& dim);

struct BubbleNorms {
    IntegralResult grad;  // integral of |Dv|^p
    IntegralResult func;  // integral of |v|^{p*}
    double grad_norm = 0.0;
    double func_norm = 0.0;
};
// Radial quadrature (the bubble is radial about its own center, so the grid center is irrelevant).
BubbleNorms bubble_norms(const Bubble& bub, const Dim& dim, const GridSpec& spec, double tail_tol = 1e-8);

// ||Dv||_p / ||v||_{p*} for the given bubble
double sobolev_ratio(const Bubble& bub, const Dim& dim, const GridSpec& spec);
// S(n,p) from the reference bubble a = b = 1, x0 = 0
double sobolev_constant(const Dim& dim, const GridSpec& spec);

// Rescales a so that ||v||_{p*} = 1.
Bubble normalize_bubble(const Bubble& bub, const Dim& dim, const GridSpec& spec);

// v at distance d from the center (used to place far bumps)
double bubble_value_at(const Bubble& bub, const Dim& dim, double d);

}  // namespace sobolev
