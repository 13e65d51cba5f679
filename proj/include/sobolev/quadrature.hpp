#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sobolev/core.hpp"
#include "sobolev/parallel.hpp"

namespace sobolev {

// Radial/angular resolution. N nodes uniformly in s = log r on [s_min, s_max], M angular nodes.
struct GridSpec {
    int N = 2048;
    int M = 64;
    double s_min = -14.0;
    double s_max = 14.0;
    double z_center = 0.0;  // axial point the polar grid is centered on

    [[nodiscard]] double h() const { return (s_max - s_min) / (N - 1); }

    // Reference density: N_ref nodes across [-14, 14]. The outer end is pushed out (same spacing)
    // until the slowest bubble tail, which decays like r^{-(n-p)/(p-1)} in ds-measure, is below
    // 10^{-tail_digits}. For p < 2 the inner end is pushed in the same way for the singular weight
    // |Dv|^{p-2} against a smooth gradient.
    static GridSpec for_dim(const Dim& dim, int N_ref = 2048, int M = 64, double tail_digits = 12.0);
    // Same window at half the spacing (nested nodes) and twice the angular nodes.
    [[nodiscard]] GridSpec refined() const;
};

class RadialGrid {
public:
    RadialGrid(int N, double s_min, double s_max, int n);

    [[nodiscard]] int size() const { return static_cast<int>(r.size()); }
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] int n() const { return n_; }

    std::vector<double> s, r;
    std::vector<double> wds;  // trapezoid weights in s
    std::vector<double> vol;  // wds * r^n  (r^{n-1} dr = r^n ds)

private:
    double h_;
    int n_;
};

// Gauss nodes for the weight (1-mu^2)^{(n-3)/2} on [-1,1] (Gauss–Legendre for n = 3), which is the
// polar-angle density of the sphere S^{n-1} for zonal integrands.
class AngularGrid {
public:
    AngularGrid(int M, int n);

    [[nodiscard]] int size() const { return static_cast<int>(mu.size()); }
    [[nodiscard]] int n() const { return n_; }
    // orthonormal polynomials for the weight, evaluated by the three-term recurrence
    void orthonormal(double x, int count, double* p, double* dp = nullptr) const;
    // d/dmu on the nodes, exact for polynomials of degree < M
    [[nodiscard]] std::vector<double> diff_matrix() const;

    std::vector<double> mu, w, sin_theta;
    double sphere_factor;  // |S^{n-2}|
    double mass;           // integral of the weight

private:
    int n_;
    std::vector<double> beta_;  // recurrence coefficients, beta_[k] for k >= 1
};

// Symmetric tridiagonal eigenvalues by Sturm bisection (zero diagonal allowed). Ascending.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag);

// Flat quadrature node list in the meridian half-plane (rho >= 0, z) with full R^n volume weights.
// The first N*M nodes form the structured (log-radius x angle) grid, row-major in the radius;
// any further nodes are extras (ball patches) with possibly negative weights.
struct NodeSet {
    int n = 3;
    int N = 0, M = 0;
    double z_center = 0.0;
    std::vector<double> s, wds;             // per radial row
    std::vector<double> rho, z, r, mu, w;   // per node
    [[nodiscard]] std::size_t size() const { return w.size(); }
    [[nodiscard]] std::size_t structured() const { return static_cast<std::size_t>(N) * M; }
};

class AxisymGrid {
public:
    AxisymGrid(const GridSpec& spec, int n);

    [[nodiscard]] const GridSpec& spec() const { return spec_; }
    [[nodiscard]] const RadialGrid& radial() const { return radial_; }
    [[nodiscard]] const AngularGrid& angular() const { return angular_; }
    [[nodiscard]] const NodeSet& nodes() const { return nodes_; }
    [[nodiscard]] int n() const { return radial_.n(); }

private:
    GridSpec spec_;
    RadialGrid radial_;
    AngularGrid angular_;
    NodeSet nodes_;
};

// Nodes covering the ball of given radius around (0,...,0,center_z): Gauss–Legendre in the local
// radius times the angular rule. Used for perturbations localized far from the structured grid's
// resolution.
struct BallPatch {
    double center_z = 0.0;
    double radius = 1.0;
    std::vector<double> rho, z, r, mu, w;
};
BallPatch make_ball_patch(int n, double center_z, double radius, int Nr, int M);

// Value and gradient of an axisymmetric function; gradient in meridian components
// (transverse radial direction, axial direction).
struct MeridianSample {
    double u = 0.0, g_rho = 0.0, g_z = 0.0;
    [[nodiscard]] double grad_norm() const { return std::hypot(g_rho, g_z); }
};

struct FieldTable {
    std::vector<double> u, g_rho, g_z;
    [[nodiscard]] std::size_t size() const { return u.size(); }
    [[nodiscard]] MeridianSample at(std::size_t i) const { return {u[i], g_rho[i], g_z[i]}; }
    void resize(std::size_t n) {
        u.assign(n, 0.0);
        g_rho.assign(n, 0.0);
        g_z.assign(n, 0.0);
    }
};

using MeridianFn = std::function<MeridianSample(double rho, double z)>;

class AxisymField {
public:
    enum class Kind { Analytic, Gridded };

    static AxisymField analytic(int n, MeridianFn fn, std::string description);
    // Values on the structured grid; gradients by 4th-order differences in s and spectral
    // differentiation in mu.
    static AxisymField gridded(const AxisymGrid& grid, std::vector<double> values, std::string description);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] const std::string& description() const { return description_; }
    [[nodiscard]] const MeridianFn& fn() const { return fn_; }
    [[nodiscard]] const GridSpec& grid_spec() const { return spec_; }
    [[nodiscard]] const FieldTable& table() const { return table_; }

    // Samples at every node. Gridded fields only tabulate onto the grid they were built on.
    [[nodiscard]] FieldTable tabulate(const NodeSet& nodes) const;
    [[nodiscard]] MeridianSample at(double rho, double z) const;

    void save(const std::string& path) const;
    static AxisymField load(const std::string& path);

private:
    Kind kind_ = Kind::Analytic;
    int n_ = 3;
    std::string description_;
    MeridianFn fn_;
    GridSpec spec_;
    FieldTable table_;
};

struct IntegralResult {
    double value = 0.0;
    double abs_value = 0.0;   // integral of |f|, the scale for tail tolerances
    double tail_outer = 0.0;  // estimated mass beyond r_max
    double tail_inner = 0.0;  // estimated mass below r_min
    bool inner_decays = true;
    [[nodiscard]] double tail() const { return tail_outer + tail_inner; }
};

// Power-law tail estimates from the per-ds density of the structured rows.
void estimate_tails(std::span<const double> s, std::span<const double> density, IntegralResult& res);

// Throws TAIL_TOO_LARGE / DIVERGENT_NEAR_ORIGIN when the tails exceed tol * abs_value.
void check_tails(const IntegralResult& res, const std::string& what, double tol = 1e-8);

// Integral over R^n of f(i) where i indexes nodes. Structured rows are summed over the angle and
// then pairwise over radius; extras are summed pairwise and added.
template <class F>
IntegralResult integrate(const NodeSet& ns, F&& f, bool with_tails = true) {
    IntegralResult res;
    const int N = ns.N, M = ns.M;
    std::vector<double> rows(N), arows(N);
    for (int k = 0; k < N; ++k) {
        double acc = 0.0, aacc = 0.0;
        const std::size_t base = static_cast<std::size_t>(k) * M;
        for (int j = 0; j < M; ++j) {
            const double v = ns.w[base + j] * f(base + j);
            acc += v;
            aacc += std::abs(v);
        }
        rows[k] = acc;
        arows[k] = aacc;
    }
    res.value = pairwise_sum(rows);
    res.abs_value = pairwise_sum(arows);
    if (ns.size() > ns.structured()) {
        std::vector<double> extra;
        extra.reserve(ns.size() - ns.structured());
        double aextra = 0.0;
        for (std::size_t i = ns.structured(); i < ns.size(); ++i) {
            const double v = ns.w[i] * f(i);
            extra.push_back(v);
            aextra += std::abs(v);
        }
        res.value += pairwise_sum(extra);
        res.abs_value += aextra;
    }
    if (with_tails) {
        for (int k = 0; k < N; ++k) rows[k] = rows[k] / ns.wds[k];
        estimate_tails(ns.s, rows, res);
    }
    return res;
}

// Fast variant without tail analysis (objective functions inside optimizers).
template <class F>
double integrate_value(const NodeSet& ns, F&& f) {
    return integrate(ns, std::forward<F>(f), false).value;
}

// Integral over R^n of a radial function g(r) on a radial grid.
IntegralResult integrate_radial(const RadialGrid& grid, const std::function<double(double)>& g);

// Append a patch to a node set; the patch nodes are added twice when `paired` (weights +w then -w),
// which is how a localized perturbation is integrated against the structured base.
NodeSet with_patch(const NodeSet& base, const BallPatch& patch, bool paired);

}  // namespace sobolev
