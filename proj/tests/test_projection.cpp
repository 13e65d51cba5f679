#include <cmath>

#include "doctest.h"
#include "sobolev/corpus.hpp"
#include "sobolev/deficit.hpp"
#include "sobolev/projection.hpp"
#include "sobolev/random.hpp"
#include "sobolev/spectrum.hpp"

using namespace sobolev;

namespace {

AxisymGrid make_grid(const Dim& dim, double z_center = 0.0) {
    GridSpec spec = GridSpec::for_dim(dim, 512, 16);
    spec.z_center = z_center;
    return AxisymGrid(spec, dim.n());
}

FieldTable scaled(FieldTable t, double f) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        t.u[i] *= f;
        t.g_rho[i] *= f;
        t.g_z[i] *= f;
    }
    return t;
}

FieldTable plus(const FieldTable& a, const FieldTable& b, double eps) {
    FieldTable t = a;
    for (std::size_t i = 0; i < t.size(); ++i) {
        t.u[i] += eps * b.u[i];
        t.g_rho[i] += eps * b.g_rho[i];
        t.g_z[i] += eps * b.g_z[i];
    }
    return t;
}

}  // namespace

TEST_CASE("F_u identities") {
    const Dim dim(3, 1.5);
    const AxisymGrid g = make_grid(dim);
    const NodeSet& ns = g.nodes();
    const double ps = dim.pstar();
    const Bubble v{1.3, 0.8, 0.0};
    const FieldTable vt = bubble_field(v, dim).tabulate(ns);
    const double mass = integrate_value(ns, [&](std::size_t i) { return std::pow(vt.u[i], ps); });
    CHECK(functional_Fu(ns, vt, v, dim) == doctest::Approx(-mass / (ps * (ps - 1.0))).epsilon(1e-12));

    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        const Bubble w{rng.log_uniform(0.3, 3.0), rng.log_uniform(0.3, 3.0), rng.uniform(-0.3, 0.3)};
        CHECK(functional_Fu(ns, vt, w, dim) >= -mass / (ps * (ps - 1.0)) * (1.0 + 1e-12));
        const Bubble w2{2.0 * w.a, w.b, w.x0};
        CHECK(functional_Fu(ns, scaled(vt, 2.0), w2, dim) ==
              doctest::Approx(std::pow(2.0, ps) * functional_Fu(ns, vt, w, dim)).epsilon(1e-12));
    }
}

TEST_CASE("a bubble projects onto itself") {
    for (auto [n, p] : {std::pair{3, 2.0}, {5, 1.2}}) {
        const Dim dim(n, p);
        const AxisymGrid g = make_grid(dim);
        const Bubble v{1.3, 0.7, 0.05};
        const FieldTable u = bubble_field(v, dim).tabulate(g.nodes());
        const ProjectionResult r = project_Fu(g.nodes(), u, dim, Bubble{1.2, 0.8, 0.0});
        CHECK(r.converged);
        CHECK(r.bubble.a == doctest::Approx(v.a).epsilon(1e-8));
        CHECK(r.bubble.b == doctest::Approx(v.b).epsilon(1e-8));
        CHECK(std::abs(r.bubble.x0 - v.x0) < 1e-8);
        CHECK(r.max_zonal_defect() < 1e-8);
        REQUIRE(r.orthogonality_defect.size() == static_cast<std::size_t>(n + 2));
        for (int k = 2; k < n + 1; ++k) CHECK(r.orthogonality_defect[k] == 0.0);

        const ProjectionResult d = project_gradient_distance(g.nodes(), u, dim, Bubble{1.2, 0.8, 0.0});
        CHECK(d.distance < 1e-7);
    }
}

TEST_CASE("perturbed bubbles: orthogonality, distance bound and recovery") {
    for (auto [n, p] : {std::pair{3, 2.0}, {4, 2.5}, {5, 1.2}}) {
        const Dim dim(n, p);
        const AxisymGrid g = make_grid(dim);
        const NodeSet& ns = g.nodes();
        const Bubble v{};
        const FieldTable vt = bubble_field(v, dim).tabulate(ns);
        double worst_fu = 0.0, worst_gd = 0.0;
        for (const TestFunction& tf : make_corpus(dim, 3, 17)) {
            FieldTable phi = test_field(tf, n).tabulate(ns);
            orthogonalize(ns, phi, v, dim);
            scale_gradient_norm(ns, phi, dim, 1.0);
            for (double eps : {1e-3, 5e-2}) {
                const FieldTable u = plus(vt, phi, eps);
                const ProjectionResult r = project_Fu(ns, u, dim, Bubble{1.01, 0.99, 0.01});
                CHECK(r.max_zonal_defect() < 1e-5);
                worst_fu = std::max(worst_fu, r.max_zonal_defect());
                if (eps == 1e-3) {
                    // phi is already orthogonal, so v itself is (up to O(eps^2)) the projection
                    CHECK(std::abs(r.bubble.a - 1.0) < 1e-2 * eps);
                    CHECK(std::abs(r.bubble.b - 1.0) < 1e-2 * eps);
                    CHECK(std::abs(r.bubble.x0) < 1e-2 * eps);
                }
                const ProjectionResult d = project_gradient_distance(ns, u, dim, Bubble{1.01, 0.99, 0.01});
                const double bound = eps / gradient_norm(ns, u, dim);
                CHECK(d.distance <= bound * (1.0 + 1e-9));
                worst_gd = std::max(worst_gd, d.max_zonal_defect());
            }
        }
        CHECK(worst_gd > worst_fu);
    }
}

TEST_CASE("projections are covariant under axial shifts and scaling") {
    const Dim dim(3, 2.0);
    const double shift = 0.25;
    const AxisymGrid g0 = make_grid(dim, 0.0), g1 = make_grid(dim, shift);
    TestFunction tf;
    tf.kind = TestFunction::Radial::AnnulusBump;
    tf.ell = 1;
    tf.r0 = 1.0;
    tf.width = 0.5;
    auto build = [&](const AxisymGrid& g, double z) {
        TestFunction t = tf;
        t.center_z = z;
        const PerturbedBubble pb(Bubble{1.0, 1.0, z}, test_field(t, 3), 0.05, dim, g.nodes());
        return pb.u_table(g.nodes());
    };
    const FieldTable u0 = build(g0, 0.0), u1 = build(g1, shift);
    const ProjectionResult a = project_Fu(g0.nodes(), u0, dim, Bubble{});
    const ProjectionResult b = project_Fu(g1.nodes(), u1, dim, Bubble{1.0, 1.0, shift});
    CHECK(b.bubble.x0 - a.bubble.x0 == doctest::Approx(shift).epsilon(1e-8));
    CHECK(b.bubble.a == doctest::Approx(a.bubble.a).epsilon(1e-8));
    const ProjectionResult c = project_gradient_distance(g0.nodes(), u0, dim, Bubble{});
    const ProjectionResult d = project_gradient_distance(g1.nodes(), u1, dim, Bubble{1.0, 1.0, shift});
    CHECK(d.bubble.x0 - c.bubble.x0 == doctest::Approx(shift).epsilon(1e-6));
    const ProjectionResult e = project_gradient_distance(g0.nodes(), scaled(u0, 2.0), dim, Bubble{2.0, 1.0, 0.0});
    CHECK(e.distance == doctest::Approx(c.distance).epsilon(1e-6));
}

TEST_CASE("no nearby bubble is reported") {
    const Dim dim(3, 2.0);
    const AxisymGrid g = make_grid(dim);
    TestFunction tf;
    tf.kind = TestFunction::Radial::AnnulusBump;
    tf.ell = 2;
    tf.r0 = 2.0;
    tf.width = 0.5;
    const FieldTable u = test_field(tf, 3).tabulate(g.nodes());
    try {
        (void)project_Fu(g.nodes(), u, dim, Bubble{});
        FAIL("expected NO_NEARBY_BUBBLE");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoNearbyBubble);
    }
}
