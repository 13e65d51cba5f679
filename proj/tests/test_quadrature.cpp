#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sobolev/bubble.hpp"
#include "sobolev/quadrature.hpp"

using namespace sobolev;

TEST_CASE("radial moment matches Gamma(n)") {
    for (int n : {2, 3, 4, 5, 6}) {
        const RadialGrid g(2048, -14.0, 14.0, n);
        const IntegralResult res = integrate_radial(g, [](double r) { return std::exp(-r); });
        const double value = res.value / sphere_area(n - 1);
        CHECK(std::abs(value / std::tgamma(n) - 1.0) < 1e-8);
        for (int k = 1; k < g.size(); ++k) CHECK(g.r[k] > g.r[k - 1]);
        for (double w : g.vol) CHECK(w > 0.0);
    }
}

TEST_CASE("Gaussian integral in three dimensions") {
    GridSpec spec;
    const AxisymGrid grid(spec, 3);
    const NodeSet& ns = grid.nodes();
    const IntegralResult res = integrate(ns, [&](std::size_t i) { return std::exp(-ns.r[i] * ns.r[i]); });
    CHECK(std::abs(res.value / std::pow(std::numbers::pi, 1.5) - 1.0) < 1e-10);
    CHECK(res.tail() < 1e-12);
}

TEST_CASE("angular rule integrates polynomials exactly") {
    const int M = 12;
    for (int n : {2, 3, 4, 5, 7}) {
        const AngularGrid ang(M, n);
        const double a = 0.5 * (n - 3);
        for (int k = 0; k <= 2 * M - 1; ++k) {
            double q = 0.0;
            for (int j = 0; j < M; ++j) q += ang.w[j] * std::pow(ang.mu[j], k);
            // moments of (1-x^2)^a: zero for odd k, Beta function for even k
            double exact = 0.0;
            if (k % 2 == 0) exact = std::tgamma(0.5 * (k + 1)) * std::tgamma(a + 1.0) / std::tgamma(0.5 * (k + 1) + a + 1.0);
            CHECK(std::abs(q - exact) < 1e-14 * std::max(1.0, std::abs(exact)));
        }
        double total = 0.0;
        for (double w : ang.w) {
            CHECK(w > 0.0);
            total += w;
        }
        // sphere_factor * mass is the area of S^{n-1}
        CHECK(std::abs(total * ang.sphere_factor / oracle::sphere_area(n) - 1.0) < 1e-14);
    }
}

TEST_CASE("angular differentiation is exact on polynomials") {
    const AngularGrid ang(10, 4);
    const auto D = ang.diff_matrix();
    for (int j = 0; j < 10; ++j) {
        double d = 0.0;
        for (int k = 0; k < 10; ++k) d += D[j * 10 + k] * std::pow(ang.mu[k], 7);
        CHECK(std::abs(d - 7.0 * std::pow(ang.mu[j], 6)) < 1e-12);
    }
}

TEST_CASE("tridiagonal eigenvalues of the discrete Laplacian") {
    const int n = 20;
    std::vector<double> d(n, 2.0), e(n - 1, -1.0);
    const auto ev = tridiagonal_eigenvalues(d, e);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(ev[k] - (2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1)))) < 1e-13);
}

TEST_CASE("hemisphere and its mirror integrate to the same value") {
    GridSpec spec;
    spec.N = 512;
    spec.M = 16;
    const AxisymGrid grid(spec, 4);
    const NodeSet& ns = grid.nodes();
    auto f = [&](double z, double r) { return z > 0 ? z * z * std::exp(-r * r - z) : 0.0; };
    const double up = integrate_value(ns, [&](std::size_t i) { return f(ns.z[i], ns.r[i]); });
    const double down = integrate_value(ns, [&](std::size_t i) { return f(-ns.z[i], ns.r[i]); });
    CHECK(up > 0.0);
    CHECK(std::abs(up - down) <= 1e-15 * up);
}

TEST_CASE("bubble L^p* mass matches the Beta-integral oracle") {
    for (auto [n, p] : {std::pair{3, 2.0}, {3, 1.5}, {4, 2.5}, {5, 1.2}}) {
        const Dim dim(n, p);
        const GridSpec spec = GridSpec::for_dim(dim);
        const AxisymGrid grid(spec, n);
        const NodeSet& ns = grid.nodes();
        const Bubble bub;
        const IntegralResult res = integrate(ns, [&](std::size_t i) {
            return std::pow(bubble_sample(bub, dim, ns.rho[i], ns.z[i]).u, dim.pstar());
        });
        CHECK_NOTHROW(check_tails(res, "mass"));
        CHECK(std::abs(res.value / oracle::bubble_pstar_mass(n, p) - 1.0) < 1e-8);
    }
}

TEST_CASE("tail estimation flags slow decay and origin singularities") {
    const RadialGrid g(1024, -14.0, 14.0, 3);
    // r^{-3.2}: the ds-density decays like r^{-0.2}; the tail beyond r_max is large
    const IntegralResult slow = integrate_radial(g, [](double r) { return std::pow(1.0 + r, -3.2); });
    CHECK_THROWS_AS(check_tails(slow, "slow"), Error);
    try {
        check_tails(slow, "slow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TailTooLarge);
    }
    // r^{-3.5} near the origin: not integrable
    const IntegralResult sing = integrate_radial(g, [](double r) { return std::pow(r, -3.5) * std::exp(-r); });
    try {
        check_tails(sing, "sing");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivergentNearOrigin);
    }
    const IntegralResult ok = integrate_radial(g, [](double r) { return std::exp(-r); });
    CHECK_NOTHROW(check_tails(ok, "ok"));
}

TEST_CASE("grid refinement keeps the nodes nested") {
    const Dim dim(3, 2.0);
    const GridSpec a = GridSpec::for_dim(dim, 512, 16);
    const GridSpec b = a.refined();
    CHECK(b.N == 2 * a.N - 1);
    CHECK(b.M == 2 * a.M);
    CHECK(b.s_min == a.s_min);
    CHECK(b.s_max == a.s_max);
    CHECK(std::abs(b.h() - 0.5 * a.h()) < 1e-15);
    // the bubble tail decays like r^{-(n-p)/(p-1)}: s_max pushed out to 12 digits
    CHECK(std::exp(-1.0 * a.s_max) < 1e-12);
    CHECK(std::abs(a.h() - 28.0 / 511) < 1e-14);
}

TEST_CASE("gridded gradients converge to the analytic gradient") {
    const Dim dim(3, 2.0);
    auto f = [](double rho, double z) {
        const double e = std::exp(-(rho * rho + z * z));
        return MeridianSample{(1.0 + z) * e, -2.0 * rho * (1.0 + z) * e, e - 2.0 * z * (1.0 + z) * e};
    };
    double errs[2];
    GridSpec spec;
    spec.N = 513;
    spec.M = 24;
    spec.s_min = -8;
    spec.s_max = 4;
    for (int level = 0; level < 2; ++level) {
        const AxisymGrid grid(spec, 3);
        const NodeSet& ns = grid.nodes();
        std::vector<double> vals(ns.size());
        for (std::size_t i = 0; i < ns.size(); ++i) vals[i] = f(ns.rho[i], ns.z[i]).u;
        const AxisymField fld = AxisymField::gridded(grid, vals, "gauss");
        const FieldTable t = fld.tabulate(ns);
        double err = 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const MeridianSample ex = f(ns.rho[i], ns.z[i]);
            err = std::max(err, std::hypot(t.g_rho[i] - ex.g_rho, t.g_z[i] - ex.g_z));
        }
        errs[level] = err;
        spec.N = 2 * spec.N - 1;
    }
    CHECK(errs[0] < 1e-5);
    // fourth order in s: halving the spacing gains at least a factor 8
    CHECK(errs[1] < errs[0] / 8.0);
}

TEST_CASE("gridded field container round trip") {
    GridSpec spec;
    spec.N = 64;
    spec.M = 8;
    spec.s_min = -3;
    spec.s_max = 3;
    spec.z_center = 0.25;
    const AxisymGrid grid(spec, 4);
    std::vector<double> vals(grid.nodes().size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::sin(0.1 * static_cast<double>(i));
    const AxisymField fld = AxisymField::gridded(grid, vals, "fixture");
    const std::string path = "quadrature_roundtrip.sblf";
    fld.save(path);
    const AxisymField back = AxisymField::load(path);
    std::remove(path.c_str());
    CHECK(back.n() == 4);
    CHECK(back.description() == "fixture");
    CHECK(back.grid_spec().z_center == 0.25);
    const FieldTable a = fld.tabulate(grid.nodes()), b = back.tabulate(grid.nodes());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        CHECK(a.u[i] == b.u[i]);
        CHECK(a.g_z[i] == b.g_z[i]);
    }
    CHECK_THROWS_AS(AxisymField::load("does_not_exist.sblf"), Error);
}

TEST_CASE("ball patch volume") {
    for (int n : {3, 4}) {
        const BallPatch b = make_ball_patch(n, 5.0, 0.5, 16, 16);
        double vol = 0.0;
        for (double w : b.w) vol += w;
        const double exact = oracle::sphere_area(n) / n * std::pow(0.5, n);
        CHECK(std::abs(vol / exact - 1.0) < 1e-13);
    }
}
