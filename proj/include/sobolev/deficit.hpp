#pragma once

#include <string>
#include <vector>

#include "sobolev/bubble.hpp"
#include "sobolev/core.hpp"
#include "sobolev/quadrature.hpp"

namespace sobolev {

// ---------------------------------------------------------------- weighted integrals

enum class SeminormWeight {
    GradVPMinus2,  // integral of |Dv|^{p-2} |D phi|^2
    VPstarMinus2,  // integral of v^{p*-2} phi^2
    Orlicz,        // integral of (v + C1 |eps phi|)^{p*} / (v^2 + |eps phi|^2) phi^2
};

struct OrliczParams {
    double eps = 0.0;
    double C1 = 1.0;
};

// v is the bubble tabulated on the same nodes. Throws DIVERGENT_NEAR_ORIGIN / TAIL_TOO_LARGE.
IntegralResult weighted_seminorm(const NodeSet& ns, const FieldTable& phi, const FieldTable& v, const Dim& dim,
                                 SeminormWeight weight, OrliczParams orlicz = {}, double tail_tol = 1e-8);

// ---------------------------------------------------------------- deficit

struct DeficitReport {
    double deficit = 0.0;
    double grad_norm = 0.0;  // ||Du||_p
    double func_norm = 0.0;  // ||u||_{p*}
    double s_constant = 0.0;
    IntegralResult grad, func;
};

DeficitReport deficit_on_nodes(const NodeSet& ns, const FieldTable& u, const Dim& dim, double S,
                               double tail_tol = 1e-8);
DeficitReport deficit(const AxisymField& u, const Dim& dim, const AxisymGrid& grid, double S,
                      double tail_tol = 1e-8);

// ||Dv||_p / ||v||_{p*} of the unit bubble centered on the grid, with this node set's quadrature.
// Subtracting it instead of the radial S cancels the quadrature error of the bubble part.
double grid_sobolev_constant(const NodeSet& ns, const Dim& dim);

// ||D phi||_p on the nodes
double gradient_norm(const NodeSet& ns, const FieldTable& phi, const Dim& dim);

// u = v + eps phi with ||D phi||_p = 1 on the construction nodes
class PerturbedBubble {
public:
    PerturbedBubble(const Bubble& base, const AxisymField& phi, double eps, const Dim& dim, const NodeSet& ns);

    [[nodiscard]] const Bubble& base() const { return base_; }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] double phi_scale() const { return scale_; }  // factor applied to the raw phi
    [[nodiscard]] const AxisymField& phi() const { return phi_; }
    [[nodiscard]] AxisymField field() const;
    [[nodiscard]] FieldTable phi_table(const NodeSet& ns) const;
    [[nodiscard]] FieldTable u_table(const NodeSet& ns) const;

private:
    Bubble base_;
    AxisymField phi_;
    double eps_, scale_;
    Dim dim_;
};

// ---------------------------------------------------------------- expansion chain

struct ExpansionLedger {
    double eps = 0.0, kappa = 0.0, C1 = 0.0, c0 = 0.0;
    double zeroth = 0.0;         // ||Dv||_p^p
    double first_grad = 0.0;     // p int |Dv|^{p-2} Dv.D phi
    double quad_grad = 0.0;      // int |Dv|^{p-2} |D phi|^2
    double quad_w = 0.0;         // (p-2) int |w|^{p-2} ((|Du| - |Dv|)/eps)^2
    double min_term = 0.0;       // int min{eps^p |D phi|^p, eps^2 |Dv|^{p-2} |D phi|^2} (eps^p ||D phi||^p for p >= 2)
    double orlicz_term = 0.0;    // Orlicz integral (p* <= 2) or int v^{p*-2} phi^2 (p* > 2)
    double pstar_term = 0.0;     // int |phi|^{p*} (used when p* > 2)
    double first_func = 0.0;     // p* int v^{p*-1} phi
    double v_func = 0.0;         // int v^{p*}
    double u_grad = 0.0;         // ||Du||_p^p
    double u_func = 0.0;         // int |u|^{p*}
    double S = 0.0;

    double el_lhs = 0.0, el_rhs = 0.0;  // p int |Dv|^{p-2}Dv.D phi  vs  ||v||^{p-p*} S^p p int v^{p*-1} phi
    double el_relative_error = 0.0;

    double lhs = 0.0;          // ||Du||^p - S^p ||u||^p
    double lower_bound = 0.0;  // assembled lower bound
    [[nodiscard]] double slack() const { return lhs - lower_bound; }
};

// S is the Sobolev constant consistent with the nodes (see grid_sobolev_constant).
ExpansionLedger expansion_ledger(const NodeSet& ns, const Bubble& v, const FieldTable& phi, double eps,
                                 double kappa, double c0, double C1, const Dim& dim, double S);

// ---------------------------------------------------------------- estimates used in the final argument

struct EstimateCheck {
    double lhs = 0.0, rhs = 0.0;
    double constant = 0.0;
    bool applicable = true;  // hypothesis of the estimate holds
    [[nodiscard]] bool holds(double tol = 1e-12) const { return lhs >= rhs - tol * (std::abs(lhs) + std::abs(rhs)); }
};

// delta(u) >= c (||Du||^p - S^p) at ||u||_{p*} = 1 with c = 1 / (p (S + 0.1)^{p-1}); applicable when
// delta <= 0.1.
EstimateCheck lower_estimate_check(const NodeSet& ns, const FieldTable& u, const Dim& dim, double S);

// int min{eps^p |D phi|^p, eps^2 |Dv|^{p-2} |D phi|^2} >= c (int eps^p |D phi|^p)^{2/p} for p < 2,
// with the Hölder constant c = min(1, ||Dv||_p^{p-2}) 2^{1-2/p} (needs eps ||D phi||_p <= 1).
EstimateCheck holder_min_bound(const NodeSet& ns, const FieldTable& phi, double eps, const FieldTable& v,
                               const Dim& dim);

}  // namespace sobolev
