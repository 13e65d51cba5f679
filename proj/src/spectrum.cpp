#include "sobolev/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sobolev/deficit.hpp"
#include "sobolev/parallel.hpp"
#include "sobolev/random.hpp"
#include "sobolev/vector_kernels.hpp"

namespace sobolev {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log v(r) for the bubble centered at the origin
double log_v(const Bubble& bub, const Dim& dim, double log_r) {
    return std::log(bub.a) - dim.m() * softplus(std::log(bub.b) + dim.q() * log_r);
}

// Positive root of (p-1) g (g + beta + n - 2) = ell (ell + n - 2), beta = (p-2)/(p-1): the regular
// power behaviour r^g of sector-ell solutions at the origin.
double regular_exponent(int ell, const Dim& dim) {
    const double p = dim.p(), n = dim.n();
    const double c = (p - 2.0) / (p - 1.0) + n - 2.0;
    const double t = ell * (ell + n - 2.0) / (p - 1.0);
    return 0.5 * (-c + std::sqrt(c * c + 4.0 * t));
}

// Discrete forms applied to r^g over the first two decades must shrink towards the origin.
void cauchy_check(const SectorProblem& prob, double g) {
    const std::size_t U = prob.size();
    if (U < 4) return;
    const double s0 = std::log(prob.r[0]);
    const double dec = std::log(10.0);
    double k1 = 0.0, k2 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < U; ++i) {
        const double s = std::log(prob.r[i]) - s0;
        if (s >= 2.0 * dec) break;
        const double fi = std::pow(prob.r[i], g), fj = std::pow(prob.r[i + 1], g);
        const double ke = prob.right[i] * (fj - fi) * (fj - fi) + prob.pot[i] * fi * fi;
        const double me = prob.mass[i] * fi * fi;
        if (s < dec) {
            k1 += ke;
            m1 += me;
        } else {
            k2 += ke;
            m2 += me;
        }
    }
    const bool ok = std::isfinite(k1) && std::isfinite(m1) && k1 <= k2 * (1.0 + 1e-12) && m1 <= m2 * (1.0 + 1e-12);
    if (!ok)
        throw Error(ErrorCode::SingularityUnresolved,
                    "sector " + std::to_string(prob.ell) + ": forms do not decay over the first decade");
}

// Differential LDL^T pivots D of K - mu M and the excesses E = D - R (see count_below). Zero pivots
// are nudged.
void pivots(const SectorProblem& prob, double mu, std::vector<double>& D, std::vector<double>* Eout = nullptr) {
    const std::size_t U = prob.size();
    D.resize(U);
    if (Eout) Eout->resize(U);
    double E = prob.left[0] + prob.pot[0] - mu * prob.mass[0];
    for (std::size_t i = 0;; ++i) {
        double d = E + prob.right[i];
        if (d == 0.0) d = -std::numeric_limits<double>::min();
        D[i] = d;
        if (Eout) (*Eout)[i] = E;
        if (i + 1 == U) break;
        E = prob.pot[i + 1] - mu * prob.mass[i + 1] + prob.right[i] * (E / d);
    }
}

// Solves (K - mu M) x = b in place and also returns the increments dx_i = x_{i+1} - x_i (dx_{U-1} =
// -x_{U-1}) computed as x_{i+1} E_i / D_i - z_i, which keeps them accurate where x is nearly constant.
void ldl_solve(const SectorProblem& prob, const std::vector<double>& D, const std::vector<double>& E,
               std::vector<double>& x, std::vector<double>& dx) {
    const std::size_t U = prob.size();
    dx.resize(U);
    for (std::size_t i = 1; i < U; ++i) x[i] += prob.right[i - 1] * x[i - 1] / D[i - 1];
    for (std::size_t i = 0; i < U; ++i) x[i] /= D[i];
    dx[U - 1] = -x[U - 1];
    for (std::size_t i = U - 1; i-- > 0;) {
        const double z = x[i];
        dx[i] = x[i + 1] * (E[i] / D[i]) - z;
        x[i] = z + prob.right[i] * x[i + 1] / D[i];
    }
}

double mass_dot(const SectorProblem& prob, const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> t(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) t[i] = prob.mass[i] * f[i] * g[i];
    return pairwise_sum(t);
}

double kth_eigenvalue(const SectorProblem& prob, std::size_t k) {
    double lo = 1.0, hi = 1.0;
    for (int it = 0; prob.count_below(hi) <= k; ++it) {
        hi *= 2.0;
        if (it > 2000) throw Error(ErrorCode::EigenSolverFailed, "eigenvalue bracket diverged");
    }
    for (int it = 0; prob.count_below(lo) > k; ++it) {
        lo *= 0.5;
        if (it > 2000) throw Error(ErrorCode::EigenSolverFailed, "eigenvalue bracket collapsed");
    }
    for (int it = 0; it < 200 && hi > lo * (1.0 + 4e-16); ++it) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        if (prob.count_below(mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------- sector problems

std::vector<double> SectorProblem::apply_K(const std::vector<double>& f) const {
    const std::size_t U = size();
    std::vector<double> df(U);
    for (std::size_t i = 0; i < U; ++i) df[i] = (i + 1 < U ? f[i + 1] : 0.0) - f[i];
    return apply_K(f, df);
}

std::vector<double> SectorProblem::apply_K(const std::vector<double>& f, const std::vector<double>& df) const {
    const std::size_t U = size();
    std::vector<double> out(U);
    for (std::size_t i = 0; i < U; ++i) {
        // left[0] is zero for the natural-boundary sector and the edge to the Dirichlet node otherwise
        const double in = i > 0 ? left[i] * df[i - 1] : -left[0] * f[0];
        out[i] = in - right[i] * df[i] + pot[i] * f[i];
    }
    return out;
}

// E_i = pot_i - mu m_i + R_{i-1} E_{i-1} / D_{i-1},  D_i = E_i + R_i: the pivots of K - mu M written so
// that no sum of large opposite edge terms is ever formed. The count of negative pivots is the
// number of eigenvalues below mu (Sylvester).
std::size_t SectorProblem::count_below(double mu) const {
    std::vector<double> D;
    pivots(*this, mu, D);
    return static_cast<std::size_t>(std::count_if(D.begin(), D.end(), [](double d) { return d < 0.0; }));
}

SectorProblem assemble_sector(int ell, const Dim& dim, const GridSpec& spec) {
    if (ell < 0) throw Error(ErrorCode::InvalidArgument, "sector index must be nonnegative");
    if (spec.N < 8) throw Error(ErrorCode::InvalidArgument, "grid too coarse for a sector problem");
    const RadialGrid grid(spec.N, spec.s_min, spec.s_max, dim.n());
    const double p = dim.p(), ps = dim.pstar(), n = dim.n(), h = grid.h();
    SectorProblem prob;
    prob.ell = ell;
    prob.n = dim.n();
    prob.p = p;
    prob.v = normalize_bubble(Bubble{}, dim, spec);

    const int N = grid.size();
    // edge coefficient between grid nodes j and j + 1
    std::vector<double> A(N - 1);
    for (int j = 0; j + 1 < N; ++j) {
        const double sm = 0.5 * (grid.s[j] + grid.s[j + 1]);
        const double ldv = log_abs_dv(prob.v, dim, std::exp(sm));
        A[j] = std::exp(std::log(p - 1.0) + (p - 2.0) * ldv + (n - 2.0) * sm - std::log(h));
    }
    const double ang = ell * (ell + n - 2.0);
    const int first = ell == 0 ? 0 : 1, last = N - 2;
    for (int j = first; j <= last; ++j) {
        const double s = grid.s[j];
        prob.r.push_back(grid.r[j]);
        prob.left.push_back(j == 0 ? 0.0 : A[j - 1]);
        prob.right.push_back(A[j]);
        const double ldv = log_abs_dv(prob.v, dim, grid.r[j]);
        prob.pot.push_back(ang == 0.0 ? 0.0 : ang * std::exp((p - 2.0) * ldv + (n - 2.0) * s) * grid.wds[j]);
        prob.mass.push_back(std::exp((ps - 2.0) * log_v(prob.v, dim, s) + n * s) * grid.wds[j]);
    }
    for (double m : prob.mass)
        if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorCode::SingularityUnresolved, "mass entry not positive");
    for (double a : prob.right)
        if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::SingularityUnresolved, "stiffness edge not positive");
    cauchy_check(prob, ell == 0 ? dim.q() : regular_exponent(ell, dim));
    return prob;
}

double mass_cosine(const SectorProblem& prob, const std::vector<double>& f, const std::vector<double>& g) {
    return mass_dot(prob, f, g) / std::sqrt(mass_dot(prob, f, f) * mass_dot(prob, g, g));
}

SectorEigenResult solve_sector(const SectorProblem& prob, int k) {
    const std::size_t U = prob.size();
    if (k < 1 || static_cast<std::size_t>(k) > U) throw Error(ErrorCode::InvalidArgument, "bad eigenpair count");
    SectorEigenResult res;
    res.ell = prob.ell;
    res.r = prob.r;
    Rng rng(mix_seed(0x5ec7u, static_cast<std::uint64_t>(prob.ell)));
    std::vector<double> D, E, x(U), dx(U);
    for (int j = 0; j < k; ++j) {
        const double mu = kth_eigenvalue(prob, static_cast<std::size_t>(j));
        pivots(prob, mu, D, &E);
        for (double& xi : x) xi = rng.uniform(0.5, 1.5);
        for (int it = 0; it < 4; ++it) {
            for (std::size_t i = 0; i < U; ++i) x[i] *= prob.mass[i];
            ldl_solve(prob, D, E, x, dx);
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t e = 0; e < res.eigenvectors.size(); ++e) {
                    const double c = mass_dot(prob, x, res.eigenvectors[e]);
                    for (std::size_t i = 0; i < U; ++i) {
                        x[i] -= c * res.eigenvectors[e][i];
                        dx[i] -= c * res.increments[e][i];
                    }
                }
            const double nrm = std::sqrt(mass_dot(prob, x, x));
            if (!(nrm > 0.0) || !std::isfinite(nrm))
                throw Error(ErrorCode::EigenSolverFailed, "inverse iteration broke down");
            for (std::size_t i = 0; i < U; ++i) {
                x[i] /= nrm;
                dx[i] /= nrm;
            }
        }
        // fix the sign: positive M-weighted mean
        double mean = 0.0;
        for (std::size_t i = 0; i < U; ++i) mean += prob.mass[i] * x[i];
        if (mean < 0.0)
            for (std::size_t i = 0; i < U; ++i) {
                x[i] = -x[i];
                dx[i] = -dx[i];
            }

        const std::vector<double> Kx = prob.apply_K(x, dx);
        double rn = 0.0, mn = 0.0;
        for (std::size_t i = 0; i < U; ++i) {
            const double mx = prob.mass[i] * x[i];
            const double r = Kx[i] - mu * mx;
            rn += r * r;
            mn += mx * mx;
        }
        res.eigenvalues.push_back(mu);
        res.eigenvectors.push_back(x);
        res.increments.push_back(dx);
        res.residuals.push_back(std::sqrt(rn / mn));
    }
    for (std::size_t j = 0; j < res.residuals.size(); ++j)
        if (!(res.residuals[j] < 1e-8))
            throw Error(ErrorCode::NotConverged, "sector " + std::to_string(prob.ell) + " eigenpair " +
                                                     std::to_string(j) +
                                                     " residual " + std::to_string(res.residuals[j]));
    return res;
}

SpectralGap spectral_gap(const Dim& dim, const GridSpec& spec) {
    SpectralGap gap;
    gap.S = sobolev_constant(dim, spec);
    gap.c = std::pow(gap.S, dim.p());
    const std::array<int, 4> counts{3, 3, 3, 1};
    gap.sectors.resize(4);
    std::vector<std::exception_ptr> errors(4);
    parallel_for(4, [&](std::size_t ell) {
        try {
            gap.sectors[ell] = solve_sector(assemble_sector(static_cast<int>(ell), dim, spec), counts[ell]);
        } catch (...) {
            errors[ell] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    gap.mu_perp = std::min({gap.sectors[0].eigenvalues[2], gap.sectors[1].eigenvalues[1],
                            gap.sectors[2].eigenvalues[0]});
    gap.lambda = 0.5 * (gap.mu_perp - (dim.pstar() - 1.0) * gap.c);
    if (gap.sectors[3].eigenvalues[0] < gap.sectors[2].eigenvalues[0])
        throw Error(ErrorCode::SectorOrderingUnexpected, "sector 3 undercuts sector 2");
    if (!(gap.lambda > 0.0)) throw Error(ErrorCode::NegativeGap, "spectral gap is not positive");
    return gap;
}

// ---------------------------------------------------------------- weighted inequalities

GapCase gap_case(const Dim& dim) {
    if (dim.low_exponent()) return GapCase::I;
    return dim.p() < 2.0 ? GapCase::II : GapCase::III;
}

namespace {

std::array<MeridianSample, 3> tangent_at(const NodeSet& ns, std::size_t i, const Bubble& v, const Dim& dim) {
    const ZonalTangent t = zonal_tangent(v, dim, ns.rho[i], ns.z[i]);
    return {t.v, t.db, t.dz};
}

}  // namespace

double orthogonalize(const NodeSet& ns, FieldTable& phi, const Bubble& v, const Dim& dim) {
    if (phi.size() != ns.size()) throw Error(ErrorCode::InvalidArgument, "field table does not match the node set");
    const double ps = dim.pstar();
    const std::size_t N = ns.size();
    std::vector<std::array<MeridianSample, 3>> xi(N);
    std::vector<double> wt(N);
    for (std::size_t i = 0; i < N; ++i) {
        xi[i] = tangent_at(ns, i, v, dim);
        wt[i] = std::pow(xi[i][0].u, ps - 2.0);
    }
    std::array<std::array<double, 3>, 3> G{};
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            G[a][b] = integrate_value(ns, [&](std::size_t i) { return wt[i] * xi[i][a].u * xi[i][b].u; });
            G[b][a] = G[a][b];
        }
    auto pairings = [&] {
        std::array<double, 3> c{};
        for (int a = 0; a < 3; ++a)
            c[a] = integrate_value(ns, [&](std::size_t i) { return wt[i] * xi[i][a].u * phi.u[i]; });
        return c;
    };
    for (int pass = 0; pass < 3; ++pass) {
        std::array<double, 3> c = pairings();
        // Gram solve by Cholesky; the zonal tangent directions are linearly independent
        std::array<std::array<double, 3>, 3> L{};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b <= a; ++b) {
                double s = G[a][b];
                for (int k = 0; k < b; ++k) s -= L[a][k] * L[b][k];
                if (a == b) {
                    if (!(s > 0.0)) throw Error(ErrorCode::OrthogonalizationFailed, "tangent Gram matrix is singular");
                    L[a][a] = std::sqrt(s);
                } else {
                    L[a][b] = s / L[b][b];
                }
            }
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < a; ++k) c[a] -= L[a][k] * c[k];
            c[a] /= L[a][a];
        }
        for (int a = 2; a >= 0; --a) {
            for (int k = a + 1; k < 3; ++k) c[a] -= L[k][a] * c[k];
            c[a] /= L[a][a];
        }
        for (std::size_t i = 0; i < N; ++i)
            for (int a = 0; a < 3; ++a) {
                phi.u[i] -= c[a] * xi[i][a].u;
                phi.g_rho[i] -= c[a] * xi[i][a].g_rho;
                phi.g_z[i] -= c[a] * xi[i][a].g_z;
            }
    }
    const double pp = integrate_value(ns, [&](std::size_t i) { return wt[i] * phi.u[i] * phi.u[i]; });
    if (!(pp > 0.0)) throw Error(ErrorCode::OrthogonalizationFailed, "nothing left after removing the tangent part");
    const std::array<double, 3> c = pairings();
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(c[a]) / std::sqrt(G[a][a] * pp));
    return worst;
}

void scale_gradient_norm(const NodeSet& ns, FieldTable& phi, const Dim& dim, double target) {
    const double g = gradient_norm(ns, phi, dim);
    if (!(g > 0.0)) throw Error(ErrorCode::DegenerateInput, "gradient norm vanishes");
    const double f = target / g;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        phi.u[i] *= f;
        phi.g_rho[i] *= f;
        phi.g_z[i] *= f;
    }
}

GapInequality check_spectral_gap_inequality(const NodeSet& ns, const FieldTable& phi, const Bubble& v, const Dim& dim,
                                            double lambda, double S) {
    const double p = dim.p(), ps = dim.pstar();
    const FieldTable vt = bubble_field(v, dim).tabulate(ns);
    IntegralResult q = integrate(ns, [&](std::size_t i) {
        const double g2 = phi.g_rho[i] * phi.g_rho[i] + phi.g_z[i] * phi.g_z[i];
        if (g2 == 0.0) return 0.0;
        const double gv = vt.at(i).grad_norm();
        const double dot = gv > 0.0 ? (vt.g_rho[i] * phi.g_rho[i] + vt.g_z[i] * phi.g_z[i]) / gv : 0.0;
        return std::pow(gv, p - 2.0) * (g2 + (p - 2.0) * dot * dot);
    });
    check_tails(q, "linearized quadratic form", 1e-8);
    GapInequality out;
    out.quad = q.value;
    out.weighted_l2 = weighted_seminorm(ns, phi, vt, dim, SeminormWeight::VPstarMinus2).value;
    const double vnorm = std::pow(integrate_value(ns, [&](std::size_t i) { return std::pow(vt.u[i], ps); }), 1.0 / ps);
    out.lhs = out.quad;
    out.rhs = ((ps - 1.0) * std::pow(S, p) + 2.0 * lambda) * std::pow(vnorm, p - ps) * out.weighted_l2;
    return out;
}

GapInequality check_prop_gap_inequality(const NodeSet& ns, const FieldTable& phi, const Bubble& v, const Dim& dim,
                                        GapCase which, double gamma0, double C1, double lambda, double S) {
    if (which != gap_case(dim)) throw Error(ErrorCode::InvalidArgument, "case does not match the exponent range");
    const double p = dim.p(), ps = dim.pstar();
    FieldTable vt;
    vt.resize(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const MeridianSample s = bubble_sample(v, dim, ns.rho[i], ns.z[i]);
        vt.u[i] = s.u;
        vt.g_rho[i] = s.g_rho;
        vt.g_z[i] = s.g_z;
    }
    GapInequality out;
    out.quad = weighted_seminorm(ns, phi, vt, dim, SeminormWeight::GradVPMinus2).value;
    out.w_term = integrate_value(ns, [&](std::size_t i) {
        if (p == 2.0) return 0.0;
        const double nx = vt.at(i).grad_norm();
        const double nxy = std::hypot(vt.g_rho[i] + phi.g_rho[i], vt.g_z[i] + phi.g_z[i]);
        const double d = nxy - nx;
        if (d == 0.0) return 0.0;
        return (p - 2.0) * weight_factor(nx, nxy, p) * d * d;
    });
    if (which != GapCase::III) {
        out.min_term = integrate_value(ns, [&](std::size_t i) {
            const double g = phi.at(i).grad_norm();
            if (g == 0.0) return 0.0;
            return std::min(std::pow(g, p), std::pow(vt.at(i).grad_norm(), p - 2.0) * g * g);
        });
    }
    const double vnorm = std::pow(integrate_value(ns, [&](std::size_t i) { return std::pow(vt.u[i], ps); }), 1.0 / ps);
    out.weighted_l2 = which == GapCase::I
                          ? weighted_seminorm(ns, phi, vt, dim, SeminormWeight::Orlicz, {1.0, C1}).value
                          : weighted_seminorm(ns, phi, vt, dim, SeminormWeight::VPstarMinus2).value;
    out.lhs = out.quad + out.w_term + gamma0 * out.min_term;
    out.rhs = ((ps - 1.0) * std::pow(S, p) + lambda) * std::pow(vnorm, p - ps) * out.weighted_l2;
    return out;
}

EmbeddingRatios embedding_ratios(const NodeSet& ns, const FieldTable& phi, const FieldTable& v, const Dim& dim,
                                 double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
    const double ps = dim.pstar();
    const double den = weighted_seminorm(ns, phi, v, dim, SeminormWeight::GradVPMinus2).value;
    if (!(den > 0.0)) throw Error(ErrorCode::DegenerateInput, "gradient form vanishes");
    // Share of each node's radial cell lying on the kept side of log r = cut: the structured rows own
    // [s - h/2, s + h/2], so a sharp cutoff between nodes is integrated to second order. Patch nodes
    // are tested pointwise.
    const double h = ns.N > 1 ? ns.s[1] - ns.s[0] : 0.0;
    auto part = [&](double cut, int side) {
        return integrate_value(ns, [&](std::size_t i) {
            const double f = phi.u[i];
            if (f == 0.0) return 0.0;
            double share = 1.0;
            if (side != 0) {
                if (i < ns.structured() && h > 0.0) {
                    const double s = ns.s[i / static_cast<std::size_t>(ns.M)];
                    share = std::clamp(0.5 + side * (s - cut) / h, 0.0, 1.0);
                } else {
                    share = side * (std::log(ns.r[i]) - cut) > 0.0 ? 1.0 : 0.0;
                }
                if (share == 0.0) return 0.0;
            }
            return share * std::pow(v.u[i], ps - 2.0) * f * f;
        });
    };
    EmbeddingRatios out;
    const double lr = std::log(rho);
    out.global = part(0.0, 0) / den;
    out.small = part(lr, -1) / den;
    out.large = part(-lr, 1) * lr * lr / den;
    return out;
}

double orlicz_poincare_ratio(const NodeSet& ns, const FieldTable& phi, const FieldTable& v, const Dim& dim,
                             double eps) {
    if (!dim.low_exponent()) throw Error(ErrorCode::InvalidArgument, "needs p <= 2n/(n+2)");
    if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
    const double p = dim.p(), ps = dim.pstar();
    auto den = [&](double t) {
        return integrate_value(ns, [&](std::size_t i) {
            const double g = t * phi.at(i).grad_norm();
            if (g == 0.0) return 0.0;
            return std::pow(v.at(i).grad_norm() + eps * g, p - 2.0) * g * g;
        });
    };
    // the denominator increases with t, so bisect in log t down to <= 1
    double t = 1.0;
    if (den(1.0) > 1.0) {
        double lo = 0.0, hi = 0.0;
        while (den(std::exp(lo)) > 1.0) lo -= 1.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (den(std::exp(mid)) > 1.0) hi = mid;
            else lo = mid;
        }
        t = std::exp(lo);
    }
    const double d = den(t);
    if (!(d > 0.0)) throw Error(ErrorCode::DegenerateInput, "gradient form vanishes");
    const double num = integrate_value(ns, [&](std::size_t i) {
        const double f = t * std::abs(phi.u[i]);
        if (f == 0.0) return 0.0;
        return std::pow(v.u[i] + eps * f, ps - 2.0) * f * f;
    });
    return num / d;
}

double hardy_poincare_ratio(const RadialProfile& u, double alpha, double R, const Dim& dim, int nodes,
                            double decades) {
    const double n = dim.n(), p = dim.p();
    if (!(alpha < n)) throw Error(ErrorCode::InvalidArgument, "alpha must be below n");
    if (!(R > 0.0) || nodes < 16) throw Error(ErrorCode::InvalidArgument, "bad radial window");
    const double s0 = std::log(R), h = decades * std::log(10.0) / (nodes - 1);
    std::vector<double> num(nodes), den(nodes);
    for (int k = 0; k < nodes; ++k) {
        const double s = s0 + k * h, r = std::exp(s);
        const auto [f, df] = u(r);
        const double w = (k == 0 || k == nodes - 1) ? 0.5 * h : h;
        num[k] = f == 0.0 ? 0.0 : w * std::pow(std::abs(f), p) * std::exp((n - alpha) * s);
        den[k] = df == 0.0 ? 0.0 : w * std::pow(std::abs(df), p) * std::exp((n - alpha + p) * s);
    }
    const double d = pairwise_sum(den);
    if (!(d > 0.0)) throw Error(ErrorCode::DegenerateInput, "profile has no gradient beyond R");
    return pairwise_sum(num) / d;
}

}  // namespace sobolev
