#include "sobolev/deficit.hpp"

#include <algorithm>
#include <cmath>

#include "sobolev/vector_kernels.hpp"

namespace sobolev {

namespace {

double gnorm(const FieldTable& t, std::size_t i) { return std::hypot(t.g_rho[i], t.g_z[i]); }

void require_same_size(const NodeSet& ns, const FieldTable& a) {
    if (a.size() != ns.size()) throw Error(ErrorCode::InvalidArgument, "field table does not match the node set");
}

}  // namespace

IntegralResult weighted_seminorm(const NodeSet& ns, const FieldTable& phi, const FieldTable& v, const Dim& dim,
                                 SeminormWeight weight, OrliczParams orlicz, double tail_tol) {
    require_same_size(ns, phi);
    require_same_size(ns, v);
    const double p = dim.p(), ps = dim.pstar();
    IntegralResult res;
    switch (weight) {
        case SeminormWeight::GradVPMinus2:
            res = integrate(ns, [&](std::size_t i) {
                const double g = gnorm(phi, i);
                return g == 0.0 ? 0.0 : std::pow(gnorm(v, i), p - 2.0) * g * g;
            });
            check_tails(res, "|Dv|^{p-2}|D phi|^2", tail_tol);
            break;
        case SeminormWeight::VPstarMinus2:
            res = integrate(ns, [&](std::size_t i) {
                const double f = phi.u[i];
                return f == 0.0 ? 0.0 : std::pow(std::abs(v.u[i]), ps - 2.0) * f * f;
            });
            check_tails(res, "v^{p*-2} phi^2", tail_tol);
            break;
        case SeminormWeight::Orlicz:
            res = integrate(ns, [&](std::size_t i) {
                const double f = phi.u[i];
                if (f == 0.0) return 0.0;
                const double a = std::abs(v.u[i]), e = std::abs(orlicz.eps * f);
                return std::pow(a + orlicz.C1 * e, ps) / (a * a + e * e) * f * f;
            });
            check_tails(res, "Orlicz-weighted phi^2", tail_tol);
            break;
    }
    return res;
}

DeficitReport deficit_on_nodes(const NodeSet& ns, const FieldTable& u, const Dim& dim, double S, double tail_tol) {
    require_same_size(ns, u);
    const double p = dim.p(), ps = dim.pstar();
    DeficitReport rep;
    rep.s_constant = S;
    rep.grad = integrate(ns, [&](std::size_t i) { return std::pow(gnorm(u, i), p); });
    rep.func = integrate(ns, [&](std::size_t i) { return std::pow(std::abs(u.u[i]), ps); });
    check_tails(rep.grad, "||Du||_p", tail_tol);
    check_tails(rep.func, "||u||_{p*}", tail_tol);
    if (!(rep.func.value > 0.0)) throw Error(ErrorCode::DegenerateInput, "||u||_{p*} vanishes");
    rep.grad_norm = std::pow(rep.grad.value, 1.0 / p);
    rep.func_norm = std::pow(rep.func.value, 1.0 / ps);
    rep.deficit = rep.grad_norm / rep.func_norm - S;
    return rep;
}

DeficitReport deficit(const AxisymField& u, const Dim& dim, const AxisymGrid& grid, double S, double tail_tol) {
    if (u.n() != dim.n()) throw Error(ErrorCode::InvalidArgument, "field dimension does not match");
    return deficit_on_nodes(grid.nodes(), u.tabulate(grid.nodes()), dim, S, tail_tol);
}

double grid_sobolev_constant(const NodeSet& ns, const Dim& dim) {
    Bubble ref;
    ref.x0 = ns.z_center;
    const double p = dim.p(), ps = dim.pstar();
    double g = 0.0, f = 0.0;
    {
        NodeSet base = ns;
        base.w.resize(ns.structured());
        g = integrate_value(base, [&](std::size_t i) {
            return std::pow(std::abs(bubble_profile(ref, dim, ns.r[i]).dv), p);
        });
        f = integrate_value(base, [&](std::size_t i) { return std::pow(bubble_profile(ref, dim, ns.r[i]).v, ps); });
    }
    return std::pow(g, 1.0 / p) / std::pow(f, 1.0 / ps);
}

double gradient_norm(const NodeSet& ns, const FieldTable& phi, const Dim& dim) {
    require_same_size(ns, phi);
    const double p = dim.p();
    const double val = integrate_value(ns, [&](std::size_t i) { return std::pow(gnorm(phi, i), p); });
    return std::pow(std::max(val, 0.0), 1.0 / p);
}

// ---------------------------------------------------------------- perturbed bubbles

PerturbedBubble::PerturbedBubble(const Bubble& base, const AxisymField& phi, double eps, const Dim& dim,
                                 const NodeSet& ns)
    : base_(base), phi_(phi), eps_(eps), scale_(1.0), dim_(dim) {
    validate(base);
    if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0");
    const double g = gradient_norm(ns, phi.tabulate(ns), dim);
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::NormalizationFailed, "||D phi||_p is not positive");
    scale_ = 1.0 / g;
}

AxisymField PerturbedBubble::field() const {
    const Bubble b = base_;
    const Dim d = dim_;
    const MeridianFn f = phi_.fn();
    const double e = eps_ * scale_;
    return AxisymField::analytic(
        d.n(),
        [b, d, f, e](double rho, double z) {
            const MeridianSample a = bubble_sample(b, d, rho, z);
            const MeridianSample c = f(rho, z);
            return MeridianSample{a.u + e * c.u, a.g_rho + e * c.g_rho, a.g_z + e * c.g_z};
        },
        "bubble + eps * " + phi_.description());
}

FieldTable PerturbedBubble::phi_table(const NodeSet& ns) const {
    FieldTable t = phi_.tabulate(ns);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t.u[i] *= scale_;
        t.g_rho[i] *= scale_;
        t.g_z[i] *= scale_;
    }
    return t;
}

FieldTable PerturbedBubble::u_table(const NodeSet& ns) const { return field().tabulate(ns); }

// ---------------------------------------------------------------- expansion chain

ExpansionLedger expansion_ledger(const NodeSet& ns, const Bubble& v, const FieldTable& phi, double eps,
                                 double kappa, double c0, double C1, const Dim& dim, double S) {
    require_same_size(ns, phi);
    validate(v);
    const double p = dim.p(), ps = dim.pstar();
    const FieldTable vt = bubble_field(v, dim).tabulate(ns);
    ExpansionLedger L;
    L.eps = eps;
    L.kappa = kappa;
    L.c0 = c0;
    L.C1 = C1;
    L.S = S;

    const std::size_t N = ns.size();
    FieldTable ut;
    ut.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        ut.u[i] = vt.u[i] + eps * phi.u[i];
        ut.g_rho[i] = vt.g_rho[i] + eps * phi.g_rho[i];
        ut.g_z[i] = vt.g_z[i] + eps * phi.g_z[i];
    }
    auto dvdphi = [&](std::size_t i) { return vt.g_rho[i] * phi.g_rho[i] + vt.g_z[i] * phi.g_z[i]; };

    L.zeroth = integrate_value(ns, [&](std::size_t i) { return std::pow(gnorm(vt, i), p); });
    L.first_grad = p * integrate_value(ns, [&](std::size_t i) {
        const double g = gnorm(vt, i);
        return g == 0.0 ? 0.0 : std::pow(g, p - 2.0) * dvdphi(i);
    });
    const double first_abs = p * integrate_value(ns, [&](std::size_t i) {
        return std::pow(gnorm(vt, i), p - 1.0) * gnorm(phi, i);
    });
    L.quad_grad = integrate_value(ns, [&](std::size_t i) {
        const double g = gnorm(phi, i);
        return g == 0.0 ? 0.0 : std::pow(gnorm(vt, i), p - 2.0) * g * g;
    });
    if (p != 2.0 && eps > 0.0) {
        L.quad_w = (p - 2.0) * integrate_value(ns, [&](std::size_t i) {
            const double nx = gnorm(vt, i), nxy = gnorm(ut, i);
            // (|Du| - |Dv|)/eps without cancellation
            const double dot = 2.0 * dvdphi(i) + eps * gnorm(phi, i) * gnorm(phi, i);
            const double den = nx + nxy;
            if (den == 0.0) return 0.0;
            const double d = dot / den;
            return weight_factor(nx, nxy, p) * d * d;
        });
    }
    L.min_term = integrate_value(ns, [&](std::size_t i) {
        const double g = eps * gnorm(phi, i);
        if (g == 0.0) return 0.0;
        const double gp = std::pow(g, p);
        return p >= 2.0 ? gp : std::min(gp, std::pow(gnorm(vt, i), p - 2.0) * g * g);
    });
    if (dim.low_exponent()) {
        L.orlicz_term = integrate_value(ns, [&](std::size_t i) {
            const double f = phi.u[i];
            if (f == 0.0) return 0.0;
            const double a = std::abs(vt.u[i]), e = std::abs(eps * f);
            return std::pow(a + C1 * e, ps) / (a * a + e * e) * f * f;
        });
    } else {
        L.orlicz_term = integrate_value(ns, [&](std::size_t i) {
            const double f = phi.u[i];
            return f == 0.0 ? 0.0 : std::pow(std::abs(vt.u[i]), ps - 2.0) * f * f;
        });
        L.pstar_term = integrate_value(ns, [&](std::size_t i) { return std::pow(std::abs(phi.u[i]), ps); });
    }
    L.first_func = ps * integrate_value(ns, [&](std::size_t i) {
        return std::pow(std::abs(vt.u[i]), ps - 2.0) * vt.u[i] * phi.u[i];
    });
    L.v_func = integrate_value(ns, [&](std::size_t i) { return std::pow(std::abs(vt.u[i]), ps); });
    L.u_grad = integrate_value(ns, [&](std::size_t i) { return std::pow(gnorm(ut, i), p); });
    L.u_func = integrate_value(ns, [&](std::size_t i) { return std::pow(std::abs(ut.u[i]), ps); });

    const double Sp = std::pow(S, p);
    const double vnorm = std::pow(L.v_func, 1.0 / ps);
    const double cw = std::pow(vnorm, p - ps);
    L.el_lhs = L.first_grad;
    L.el_rhs = cw * Sp * (p / ps) * L.first_func;
    L.el_relative_error = first_abs > 0.0 ? std::abs(L.el_lhs - L.el_rhs) / first_abs : 0.0;

    L.lhs = L.u_grad - Sp * std::pow(L.u_func, p / ps);
    // lower bound for ||Du||^p from the pointwise expansion of |x+y|^p
    const double grad_lower = L.zeroth + eps * L.first_grad +
                              eps * eps * p * (1.0 - kappa) / 2.0 * (L.quad_grad + L.quad_w) + c0 * L.min_term;
    // upper bound for int |u|^{p*} and, through concavity of t -> t^{p/p*}, for ||u||^p
    double x;
    if (dim.low_exponent())
        x = eps * L.first_func + eps * eps * (ps * (ps - 1.0) / 2.0 + kappa) * L.orlicz_term;
    else
        x = eps * L.first_func + eps * eps * (ps * (ps - 1.0) / 2.0 + kappa) * L.orlicz_term +
            std::pow(eps, ps) * C1 * L.pstar_term;
    const double func_upper = std::pow(vnorm, p) + (p / ps) * cw * x;
    L.lower_bound = grad_lower - Sp * func_upper;
    return L;
}

// ---------------------------------------------------------------- final-argument estimates

EstimateCheck lower_estimate_check(const NodeSet& ns, const FieldTable& u, const Dim& dim, double S) {
    const DeficitReport rep = deficit_on_nodes(ns, u, dim, S);
    const double p = dim.p();
    // rescaling to ||u||_{p*} = 1 leaves delta unchanged and divides ||Du|| by ||u||
    const double X = rep.grad_norm / rep.func_norm;
    EstimateCheck out;
    out.constant = 1.0 / (p * std::pow(S + 0.1, p - 1.0));
    out.lhs = rep.deficit;
    out.rhs = out.constant * (std::pow(X, p) - std::pow(S, p));
    out.applicable = rep.deficit <= 0.1;
    return out;
}

EstimateCheck holder_min_bound(const NodeSet& ns, const FieldTable& phi, double eps, const FieldTable& v,
                               const Dim& dim) {
    require_same_size(ns, phi);
    require_same_size(ns, v);
    const double p = dim.p();
    if (!(p < 2.0)) throw Error(ErrorCode::InvalidArgument, "the Hölder split applies to p < 2");
    EstimateCheck out;
    out.lhs = integrate_value(ns, [&](std::size_t i) {
        const double g = eps * gnorm(phi, i);
        if (g == 0.0) return 0.0;
        return std::min(std::pow(g, p), std::pow(gnorm(v, i), p - 2.0) * g * g);
    });
    const double ep = integrate_value(ns, [&](std::size_t i) { return std::pow(eps * gnorm(phi, i), p); });
    const double dv = integrate_value(ns, [&](std::size_t i) { return std::pow(gnorm(v, i), p); });
    out.constant = std::min(1.0, std::pow(dv, (p - 2.0) / p)) * std::pow(2.0, 1.0 - 2.0 / p);
    out.rhs = out.constant * std::pow(std::max(ep, 0.0), 2.0 / p);
    out.applicable = ep <= 1.0;
    return out;
}

}  // namespace sobolev
