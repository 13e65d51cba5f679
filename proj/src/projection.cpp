#include "sobolev/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sobolev/nelder_mead.hpp"
#include "sobolev/parallel.hpp"

namespace sobolev {

namespace {

void require_same_size(const NodeSet& ns, const FieldTable& u) {
    if (u.size() != ns.size()) throw Error(ErrorCode::InvalidArgument, "field table does not match the node set");
}

double pstar_norm_pow(const NodeSet& ns, const FieldTable& u, double ps) {
    return integrate_value(ns, [&](std::size_t i) { return std::pow(std::abs(u.u[i]), ps); });
}

double grad_norm_pow(const NodeSet& ns, const FieldTable& u, double p) {
    return integrate_value(ns, [&](std::size_t i) { return std::pow(std::hypot(u.g_rho[i], u.g_z[i]), p); });
}

// length scale of the bubble, b^{-(p-1)/p}
double bubble_length(const Bubble& b, const Dim& dim) { return std::pow(b.b, -1.0 / dim.q()); }

struct Param {
    double sign, L;  // sign of a and the x0 scale of the starting point
    Bubble unpack(const std::vector<double>& x) const {
        Bubble b;
        b.a = sign * std::exp(x[0]);
        b.b = std::exp(x[1]);
        b.x0 = x[2] * L;
        return b;
    }
    std::vector<double> pack(const Bubble& b) const { return {std::log(std::abs(b.a)), std::log(b.b), b.x0 / L}; }
};

}  // namespace

double ProjectionResult::max_zonal_defect() const {
    if (orthogonality_defect.empty()) return 0.0;
    return std::max({std::abs(orthogonality_defect.front()), std::abs(orthogonality_defect[1]),
                     std::abs(orthogonality_defect.back())});
}

double functional_Fu(const NodeSet& ns, const FieldTable& u, const Bubble& bub, const Dim& dim) {
    require_same_size(ns, u);
    validate(bub);
    const double ps = dim.pstar();
    return integrate_value(ns, [&](std::size_t i) {
        const double v = bubble_sample(bub, dim, ns.rho[i], ns.z[i]).u;
        const double av = std::pow(std::abs(v), ps - 2.0);
        return av * v * v / ps - av * v * u.u[i] / (ps - 1.0);
    });
}

double gradient_distance(const NodeSet& ns, const FieldTable& u, const Bubble& bub, const Dim& dim) {
    require_same_size(ns, u);
    validate(bub);
    const double p = dim.p();
    const double num = integrate_value(ns, [&](std::size_t i) {
        const MeridianSample v = bubble_sample(bub, dim, ns.rho[i], ns.z[i]);
        return std::pow(std::hypot(u.g_rho[i] - v.g_rho, u.g_z[i] - v.g_z), p);
    });
    const double den = grad_norm_pow(ns, u, p);
    return std::pow(std::max(num, 0.0) / den, 1.0 / p);
}

namespace {

// first-order condition g_k = int v^{p*-2} xi_k (v - u) and Gram matrix int v^{p*-2} xi_j xi_k for
// xi = (d_a v, d_b v, d_{x0} v)
struct FirstOrder {
    std::array<double, 3> g{};
    std::array<double, 9> H{};
    std::array<double, 3> xi_norm{};  // ||xi||_{p*} for (v, d_b v, d_{x0} v)
    double v_norm = 0.0;
};

FirstOrder first_order(const NodeSet& ns, const FieldTable& u, const Bubble& bub, const Dim& dim) {
    const double ps = dim.pstar();
    const std::size_t N = ns.size();
    std::vector<std::array<double, 3>> xi(N);
    std::vector<double> w(N), diff(N);
    for (std::size_t i = 0; i < N; ++i) {
        const ZonalTangent t = zonal_tangent(bub, dim, ns.rho[i], ns.z[i]);
        xi[i] = {t.v.u, t.db.u, t.dz.u};
        w[i] = std::pow(std::abs(t.v.u), ps - 2.0);
        diff[i] = t.v.u - u.u[i];
    }
    FirstOrder fo;
    for (int k = 0; k < 3; ++k) {
        fo.g[k] = integrate_value(ns, [&](std::size_t i) { return w[i] * xi[i][k] * diff[i]; });
        for (int j = k; j < 3; ++j) {
            const double h = integrate_value(ns, [&](std::size_t i) { return w[i] * xi[i][j] * xi[i][k]; });
            fo.H[3 * k + j] = fo.H[3 * j + k] = h;
        }
        fo.xi_norm[k] =
            std::pow(integrate_value(ns, [&](std::size_t i) { return std::pow(std::abs(xi[i][k]), ps); }), 1.0 / ps);
    }
    fo.v_norm = fo.xi_norm[0];
    // derivative in a is xi_0 / a
    fo.g[0] /= bub.a;
    for (int j = 0; j < 3; ++j) {
        fo.H[j] /= bub.a;
        fo.H[3 * j] /= bub.a;
    }
    return fo;
}

bool solve3(std::array<double, 9> A, std::array<double, 3> b, std::array<double, 3>& x) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(A[3 * r + c]) > std::abs(A[3 * piv + c])) piv = r;
        if (A[3 * piv + c] == 0.0) return false;
        if (piv != c) {
            for (int k = 0; k < 3; ++k) std::swap(A[3 * c + k], A[3 * piv + k]);
            std::swap(b[c], b[piv]);
        }
        for (int r = c + 1; r < 3; ++r) {
            const double f = A[3 * r + c] / A[3 * c + c];
            for (int k = c; k < 3; ++k) A[3 * r + k] -= f * A[3 * c + k];
            b[r] -= f * b[c];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < 3; ++k) s -= A[3 * r + k] * x[k];
        x[r] = s / A[3 * r + r];
    }
    return true;
}

void fill_defect(ProjectionResult& res, const NodeSet& ns, const FieldTable& u, const Dim& dim) {
    const std::array<double, 3> d = orthogonality_defect(ns, u, res.bubble, dim);
    res.orthogonality_defect.assign(static_cast<std::size_t>(dim.n()) + 2, 0.0);
    res.orthogonality_defect[0] = d[0];
    res.orthogonality_defect[1] = d[1];
    res.orthogonality_defect.back() = d[2];
}

template <class Objective>
ProjectionResult run_restarts(const NodeSet& ns, const FieldTable& u, const Dim& dim, const Bubble& init,
                              const ProjectionOptions& opt, double f_floor, Objective&& objective) {
    validate(init);
    if (opt.restarts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one restart");
    // initial scan: the supplied point and the moment guess
    Bubble start = init;
    double d0 = gradient_distance(ns, u, init, dim);
    {
        Bubble mg;
        bool have = true;
        try {
            mg = moment_guess(ns, u, dim);
        } catch (const Error&) {
            have = false;
        }
        if (have) {
            const double d1 = gradient_distance(ns, u, mg, dim);
            if (d1 < d0) {
                d0 = d1;
                start = mg;
            }
        }
    }
    if (!(d0 <= opt.max_init_distance))
        throw Error(ErrorCode::NoNearbyBubble,
                    "no bubble within gradient distance " + std::to_string(opt.max_init_distance) + " (best " +
                        std::to_string(d0) + ")");
    const Param par{start.a < 0 ? -1.0 : 1.0, bubble_length(start, dim)};
    const std::vector<double> x_start = par.pack(start);
    std::vector<NelderMeadResult> runs(opt.restarts);
    parallel_for(static_cast<std::size_t>(opt.restarts), [&](std::size_t r) {
        std::vector<double> x0 = x_start;
        if (r > 0) {
            // deterministic perturbations of the start
            const double sg = (r % 2 == 1) ? 1.0 : -1.0;
            const double mag = 0.02 * static_cast<double>((r + 1) / 2);
            x0[0] += sg * mag;
            x0[1] -= sg * 2.0 * mag;
            x0[2] += sg * mag;
        }
        NelderMeadOptions nm;
        nm.f_tol = opt.f_tol;
        nm.f_floor = f_floor;
        nm.x_tol = opt.x_tol;
        nm.max_evals = opt.max_evals;
        nm.step = {0.05, 0.1, 0.05};
        runs[r] = nelder_mead([&](const std::vector<double>& x) { return objective(par.unpack(x)); }, x0, nm);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].f < runs[best].f) best = r;
    ProjectionResult res;
    res.bubble = par.unpack(runs[best].x);
    res.objective = runs[best].f;
    res.converged = runs[best].converged;
    for (const auto& r : runs) {
        res.evaluations += r.evals;
        res.iterations += r.iterations;
    }
    if (!res.converged)
        throw Error(ErrorCode::NotConverged, "projection did not converge within " + std::to_string(opt.max_evals) +
                                                 " evaluations");
    return res;
}

}  // namespace

std::array<double, 3> orthogonality_defect(const NodeSet& ns, const FieldTable& u, const Bubble& bub,
                                           const Dim& dim) {
    require_same_size(ns, u);
    const FirstOrder fo = first_order(ns, u, bub, dim);
    const double ps = dim.pstar();
    const double un = std::pow(pstar_norm_pow(ns, u, ps), 1.0 / ps);
    std::array<double, 3> d{};
    // g holds int v^{p*-2} xi (v - u); the defect is int v^{p*-2} xi (u - v)
    const std::array<double, 3> raw = {-fo.g[0] * bub.a, -fo.g[1], -fo.g[2]};
    for (int k = 0; k < 3; ++k) {
        const double scale = std::pow(fo.v_norm, ps - 2.0) * fo.xi_norm[k] * un;
        d[k] = scale > 0.0 ? raw[k] / scale : 0.0;
    }
    return d;
}

Bubble moment_guess(const NodeSet& ns, const FieldTable& u, const Dim& dim) {
    require_same_size(ns, u);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < ns.structured(); ++i)
        if (std::abs(u.u[i]) > std::abs(u.u[imax])) imax = i;
    const double a = u.u[imax];
    if (a == 0.0) throw Error(ErrorCode::DegenerateInput, "field vanishes on the grid");
    const double ps = dim.pstar();
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < ns.structured(); ++i) {
        const double w = ns.w[i] * std::pow(std::abs(u.u[i]), ps);
        m0 += w;
        m1 += w * ns.z[i];
    }
    Bubble b;
    b.a = a;
    b.x0 = m0 > 0.0 ? m1 / m0 : ns.z[imax];
    // half-height radius R: v(R) = a/2 gives b R^q = 2^{1/m} - 1; R from the nodes on the structured grid
    double R = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ns.structured(); ++i) {
        const double diff = std::abs(std::abs(u.u[i]) - 0.5 * std::abs(a));
        const double d = std::hypot(ns.rho[i], ns.z[i] - b.x0);
        if (diff < best) {
            best = diff;
            R = d;
        }
    }
    if (!(R > 0.0)) R = 1.0;
    b.b = (std::pow(2.0, 1.0 / dim.m()) - 1.0) / std::pow(R, dim.q());
    return b;
}

ProjectionResult project_Fu(const NodeSet& ns, const FieldTable& u, const Dim& dim, const Bubble& init,
                            const ProjectionOptions& opt) {
    require_same_size(ns, u);
    ProjectionResult res = run_restarts(ns, u, dim, init, opt, 1.0, [&](const Bubble& b) {
        return functional_Fu(ns, u, b, dim);
    });
    // Gauss–Newton on the first-order condition (the Gram matrix is the Hessian at u in M)
    Bubble cur = res.bubble;
    double fcur = functional_Fu(ns, u, cur, dim);
    for (int it = 0; it < 30; ++it) {
        const FirstOrder fo = first_order(ns, u, cur, dim);
        std::array<double, 3> step{};
        if (!solve3(fo.H, {-fo.g[0], -fo.g[1], -fo.g[2]}, step)) break;
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            Bubble trial = cur;
            trial.a += t * step[0];
            trial.b += t * step[1];
            trial.x0 += t * step[2];
            if (!(trial.b > 0.0) || trial.a * cur.a <= 0.0) continue;
            const double ft = functional_Fu(ns, u, trial, dim);
            if (ft <= fcur) {
                const bool tiny = std::abs(t * step[0]) <= 1e-15 * std::abs(cur.a) &&
                                  std::abs(t * step[1]) <= 1e-15 * cur.b &&
                                  std::abs(t * step[2]) <= 1e-15 * bubble_length(cur, dim);
                cur = trial;
                fcur = ft;
                moved = !tiny;
                break;
            }
        }
        res.iterations += 1;
        if (!moved) break;
    }
    res.bubble = cur;
    res.objective = fcur;
    fill_defect(res, ns, u, dim);
    res.distance = gradient_distance(ns, u, res.bubble, dim);
    return res;
}

ProjectionResult project_gradient_distance(const NodeSet& ns, const FieldTable& u, const Dim& dim,
                                           const Bubble& init, const ProjectionOptions& opt) {
    require_same_size(ns, u);
    const double p = dim.p();
    const double den = grad_norm_pow(ns, u, p);
    // minimizes the p-th power, which is smooth at a zero distance; the distance can be tiny, so the
    // value tolerance is relative down to a small floor
    ProjectionResult res = run_restarts(ns, u, dim, init, opt, 1e-6, [&](const Bubble& b) {
        const double num = integrate_value(ns, [&](std::size_t i) {
            const MeridianSample v = bubble_sample(b, dim, ns.rho[i], ns.z[i]);
            return std::pow(std::hypot(u.g_rho[i] - v.g_rho, u.g_z[i] - v.g_z), p);
        });
        return std::max(num, 0.0) / den;
    });
    res.distance = std::pow(res.objective, 1.0 / p);
    res.objective = res.distance;
    fill_defect(res, ns, u, dim);
    return res;
}

}  // namespace sobolev
