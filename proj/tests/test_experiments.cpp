#include <cmath>

#include "doctest.h"
#include "sobolev/bubble.hpp"
#include "sobolev/experiments.hpp"

using namespace sobolev;

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(hi / lo, k / (count - 1.0)));
    return out;
}

}  // namespace

TEST_CASE("log-log fit") {
    const std::vector<double> x = log_spaced(1.0, 100.0, 6);
    std::vector<double> y;
    for (double t : x) y.push_back(3.0 * std::pow(t, -1.7));
    const LogLogFit f = fit_loglog(x, y);
    CHECK(f.slope == doctest::Approx(-1.7).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    // alternating +-10% noise is visible in the residual
    for (std::size_t k = 0; k < y.size(); ++k) y[k] *= k % 2 ? 1.1 : 1.0 / 1.1;
    CHECK(fit_loglog(x, y).residual == doctest::Approx(std::log(1.1)).epsilon(0.05));

    auto code = [](const std::vector<double>& a, const std::vector<double>& b) {
        try {
            (void)fit_loglog(a, b);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code({1, 2, 3, 4}, {1, 2, 3, 4}) == ErrorCode::FitFailed);
    CHECK(code(log_spaced(1, 10, 6), log_spaced(1, 10, 6)) == ErrorCode::FitFailed);
    std::vector<double> bad = y;
    bad[2] = -1e-9;
    CHECK(code(x, bad) == ErrorCode::FitFailed);
}

TEST_CASE("anisotropic members: analytic gradients and the limit i -> infinity") {
    const Dim dim(3, 2.0);
    const AxisymField u = anisotropic_member(dim, 4.0);
    for (auto [rho, z] : {std::pair{0.3, 0.2}, {1.5, -0.8}, {0.05, 2.0}}) {
        const MeridianSample s = u.at(rho, z);
        const double h = 1e-6;
        CHECK((u.at(rho + h, z).u - u.at(rho - h, z).u) / (2 * h) == doctest::Approx(s.g_rho).epsilon(1e-7));
        CHECK((u.at(rho, z + h).u - u.at(rho, z - h).u) / (2 * h) == doctest::Approx(s.g_z).epsilon(1e-7));
        // u_i(rho, z) = v(rho, (1 + 1/i) z)
        CHECK(s.u == doctest::Approx(bubble_sample(Bubble{}, dim, rho, 1.25 * z).u).epsilon(1e-14));
        const MeridianSample far = anisotropic_member(dim, 1e12).at(rho, z);
        CHECK(far.u == doctest::Approx(bubble_sample(Bubble{}, dim, rho, z).u).epsilon(1e-11));
    }
    CHECK_THROWS_AS(anisotropic_member(dim, 0.0), Error);
}

TEST_CASE("anisotropic family: deficit ~ i^-2, distance ~ i^-1") {
    const Dim dim(3, 2.0);
    const std::vector<double> i_list = {8, 16, 32, 64, 128, 256};
    const SlopeFit f = anisotropic_family(dim, i_list, GridSpec::for_dim(dim, 512, 16));
    CHECK(f.deficit_fit.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(f.distance_fit.slope == doctest::Approx(-1.0).epsilon(0.1));
    CHECK(f.deficit_fit.residual < 0.05);
    CHECK(f.distance_fit.residual < 0.05);
    for (double d : f.deficit) CHECK(d >= -1e-7);
    CHECK(f.deficit.back() < f.deficit.front());
    // dist_i * i settles: successive relative changes shrink
    double prev = 1e300;
    for (std::size_t k = 1; k + 1 < i_list.size(); ++k) {
        const double a = f.distance[k] * i_list[k], b = f.distance[k + 1] * i_list[k + 1];
        const double change = std::abs(b / a - 1.0);
        CHECK(change < prev);
        prev = change;
    }
}

TEST_CASE("bump family: deficit ~ eps^p and exponent sharpness") {
    const Dim dim(3, 2.5);
    const std::vector<double> eps = log_spaced(1e-4, 1e-1, 7);
    const BumpFamily b = bump_family(dim, eps, 0.0, GridSpec::for_dim(dim, 512, 8));
    CHECK(b.v_far < 1e-6);
    CHECK(b.alpha == 2.5);
    CHECK(b.fit.deficit_fit.slope == doctest::Approx(2.5).epsilon(0.04));
    CHECK(b.fit.deficit_fit.residual < 0.05);
    CHECK(b.fit.distance_fit.slope == doctest::Approx(1.0).epsilon(0.1));
    const double remainder = b.v_far + std::abs(bubble_profile(Bubble{}, dim, b.x_far).dv);
    for (std::size_t k = 0; k < eps.size(); ++k) {
        CHECK(b.fit.deficit[k] >= -1e-7);
        // the bump is far from the bubble, so the norms split up to O(v(x_far))
        CHECK(std::abs(b.split_grad[k]) + std::abs(b.split_func[k]) <= remainder);
        // v itself is (to first order) the nearest bubble
        CHECK(b.fit.distance[k] <= b.proxy_distance[k] * (1.0 + 1e-9));
        CHECK(b.fit.distance[k] == doctest::Approx(b.proxy_distance[k]).epsilon(1e-2));
        if (k > 0) CHECK(b.ratio_reduced[k] > b.ratio_reduced[k - 1]);
    }
    CHECK(b.ratio_reduced.back() / b.ratio_reduced.front() >= 10.0);
    // with the true exponent the ratio is flat
    CHECK(b.ratio.back() / b.ratio.front() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bump family edge cases") {
    const Dim dim(3, 2.0);
    const GridSpec spec = GridSpec::for_dim(dim, 256, 8);
    const std::vector<double> eps = {0.0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    const BumpFamily b = bump_family(dim, eps, 0.0, spec);
    CHECK(b.fit.deficit[0] == 0.0);
    CHECK(b.fit.deficit_fit.slope == doctest::Approx(2.0).epsilon(0.05));
    CHECK(bubble_value_at(Bubble{}, dim, default_x_far(dim, eps)) < 1e-6);
    try {
        (void)bump_family(dim, eps, 40.0, spec);
        FAIL("expected CONDITION_VIOLATED");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConditionViolated);
    }
    CHECK_THROWS_AS(bump_family(dim, {}, 0.0, spec), Error);
    CHECK_THROWS_AS(bump_family(dim, {-1e-3, 1e-2}, 0.0, spec), Error);
}

TEST_CASE("stability ratio scan: positive, deterministic, grid-stable") {
    const Dim dim(3, 2.0);
    RatioScanOptions opt;
    opt.count = 12;
    opt.seed = 7;
    opt.projection.restarts = 2;
    const GridSpec spec = GridSpec::for_dim(dim, 512, 8);
    const RatioScan a = stability_ratio_scan(dim, spec, opt);
    CHECK(a.alpha == 2.0);
    CHECK(a.samples.size() + a.excluded == opt.count);
    CHECK(a.min_ratio > 0.0);
    CHECK(a.min_ratio <= a.median_ratio);
    CHECK(a.median_ratio <= a.max_ratio);
    for (const RatioSample& s : a.samples) {
        CHECK(s.deficit >= -1e-7);
        CHECK(s.eps <= 0.1);
        CHECK(s.eps >= 0.01);
    }
    const RatioScan b = stability_ratio_scan(dim, spec, opt);
    REQUIRE(b.samples.size() == a.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        CHECK(a.samples[k].phi == b.samples[k].phi);
        CHECK(a.samples[k].ratio == b.samples[k].ratio);
    }
    const RatioScan c = stability_ratio_scan(dim, spec.refined(), opt);
    CHECK(std::abs(c.min_ratio / a.min_ratio - 1.0) < 0.2);

    opt.eps_max = 0.5;
    CHECK_THROWS_AS(stability_ratio_scan(dim, spec, opt), Error);
}
