#include "sobolev/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sobolev/corpus.hpp"
#include "sobolev/deficit.hpp"
#include "sobolev/parallel.hpp"
#include "sobolev/random.hpp"

namespace sobolev {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "fit: size mismatch");
    if (x.size() < 5) throw Error(ErrorCode::FitFailed, "fit needs at least 5 points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
            throw Error(ErrorCode::FitFailed, "fit needs positive finite data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
    if (*hi - *lo < 1.5 * std::log(10.0) * (1.0 - 1e-12))
        throw Error(ErrorCode::FitFailed, "fit range spans less than 1.5 decades");
    const double k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    LogLogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (f.intercept + f.slope * lx[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / k);
    return f;
}

namespace {

void finish_fit(SlopeFit& fit) {
    fit.deficit_fit = fit_loglog(fit.param, fit.deficit);
    fit.distance_fit = fit_loglog(fit.param, fit.distance);
}

}  // namespace

// ---------------------------------------------------------------- anisotropic family

AxisymField anisotropic_member(const Dim& dim, double i) {
    if (!(i > 0.0)) throw Error(ErrorCode::InvalidArgument, "anisotropic index must be positive");
    const double lam = 1.0 + 1.0 / i;
    std::ostringstream os;
    os << "anisotropic(i=" << i << ")";
    return AxisymField::analytic(
        dim.n(),
        [dim, lam](double rho, double z) {
            const double d = std::hypot(rho, lam * z);
            const BubbleProfile b = bubble_profile(Bubble{}, dim, d);
            if (d == 0.0) return MeridianSample{b.v, 0.0, 0.0};
            return MeridianSample{b.v, b.dv * rho / d, b.dv * lam * lam * z / d};
        },
        os.str());
}

SlopeFit anisotropic_family(const Dim& dim, const std::vector<double>& i_list, const GridSpec& spec,
                            const ProjectionOptions& opt) {
    for (double i : i_list)
        if (!(i >= 1.0)) throw Error(ErrorCode::InvalidArgument, "anisotropic indices must be >= 1");
    const AxisymGrid grid(spec, dim.n());
    const NodeSet& ns = grid.nodes();
    const double S = grid_sobolev_constant(ns, dim);
    SlopeFit fit;
    fit.param = i_list;
    fit.deficit.resize(i_list.size());
    fit.distance.resize(i_list.size());
    parallel_for(i_list.size(), [&](std::size_t k) {
        const FieldTable u = anisotropic_member(dim, i_list[k]).tabulate(ns);
        fit.deficit[k] = deficit_on_nodes(ns, u, dim, S).deficit;
        fit.distance[k] = project_gradient_distance(ns, u, dim, Bubble{}, opt).distance;
    });
    finish_fit(fit);
    return fit;
}

// ---------------------------------------------------------------- bump family

double default_x_far(const Dim& dim, const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps list");
    double eps_min = HUGE_VAL;
    for (double e : eps_list)
        if (e > 0.0) eps_min = std::min(eps_min, e);
    if (eps_min == HUGE_VAL) throw Error(ErrorCode::InvalidArgument, "eps list needs a positive entry");
    const double target = std::min(1e-6, 0.1 * eps_min);
    for (int k = 1; k <= 300; ++k) {
        const double x = std::pow(10.0, k);
        if (bubble_value_at(Bubble{}, dim, x) < target) return x;
    }
    throw Error(ErrorCode::SearchFailed, "no x_far found");
}

BumpFamily bump_family(const Dim& dim, const std::vector<double>& eps_list, double x_far, const GridSpec& spec,
                       const ProjectionOptions& opt) {
    if (eps_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps list");
    double eps_min = HUGE_VAL;
    for (double e : eps_list) {
        if (!(e >= 0.0) || !std::isfinite(e)) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0");
        if (e > 0.0) eps_min = std::min(eps_min, e);
    }
    if (eps_min == HUGE_VAL) throw Error(ErrorCode::InvalidArgument, "eps list needs a positive entry");
    if (x_far <= 0.0) x_far = default_x_far(dim, eps_list);
    if (!(x_far > 2.0) || !std::isfinite(x_far)) throw Error(ErrorCode::InvalidArgument, "x_far must exceed 2");

    const double p = dim.p(), ps = dim.pstar();
    const Bubble v{};
    BumpFamily out;
    out.x_far = x_far;
    out.v_far = bubble_value_at(v, dim, x_far);
    out.alpha = std::max(2.0, p);
    if (!(out.v_far < 0.1 * eps_min)) {
        std::ostringstream os;
        os << "v(x_far) = " << out.v_far << " is not below 0.1 * min eps = " << 0.1 * eps_min;
        throw Error(ErrorCode::ConditionViolated, os.str());
    }

    // the bump in local coordinates y = x - x_far e_n, and the same nodes placed at x_far for v
    constexpr int kNr = 96, kM = 8;
    const BallPatch local = make_ball_patch(dim.n(), 0.0, 1.0, kNr, kM);
    const BallPatch far = make_ball_patch(dim.n(), x_far, 1.0, kNr, kM);
    TestFunction bump;
    bump.kind = TestFunction::Radial::BallBump;
    bump.ell = 0;
    bump.width = 1.0;
    const std::size_t P = local.w.size();
    std::vector<MeridianSample> phi(P), vp(P);
    double gphi = 0.0, fphi = 0.0;
    for (std::size_t j = 0; j < P; ++j) {
        phi[j] = eval_test_function(bump, dim.n(), local.rho[j], local.z[j]);
        vp[j] = bubble_sample(v, dim, far.rho[j], far.z[j]);
        gphi += local.w[j] * std::pow(phi[j].grad_norm(), p);
        fphi += local.w[j] * std::pow(std::abs(phi[j].u), ps);
    }
    out.bump_grad_norm = std::pow(gphi, 1.0 / p);
    out.bump_pstar_norm = std::pow(fphi, 1.0 / ps);

    const AxisymGrid grid(spec, dim.n());
    const NodeSet& base = grid.nodes();
    const FieldTable vt = bubble_field(v, dim).tabulate(base);
    const double G0 = integrate_value(base, [&](std::size_t i) { return std::pow(vt.at(i).grad_norm(), p); });
    const double F0 = integrate_value(base, [&](std::size_t i) { return std::pow(vt.u[i], ps); });
    const double S_grid = std::pow(G0, 1.0 / p) / std::pow(F0, 1.0 / ps);
    const NodeSet paired = with_patch(base, far, true);
    const std::size_t Ns = base.structured();

    const std::size_t K = eps_list.size();
    out.fit.param = eps_list;
    out.fit.deficit.resize(K);
    out.fit.distance.resize(K);
    out.proxy_distance.resize(K);
    out.split_grad.resize(K);
    out.split_func.resize(K);
    out.ratio.resize(K);
    out.ratio_reduced.resize(K);
    parallel_for(K, [&](std::size_t k) {
        const double eps = eps_list[k];
        // patch increments of the two integrals, formed node by node so nothing cancels globally
        std::vector<double> dg(P), df(P);
        for (std::size_t j = 0; j < P; ++j) {
            const MeridianSample a = vp[j];
            const MeridianSample u{a.u + eps * phi[j].u, a.g_rho + eps * phi[j].g_rho, a.g_z + eps * phi[j].g_z};
            dg[j] = local.w[j] * (std::pow(u.grad_norm(), p) - std::pow(a.grad_norm(), p));
            df[j] = local.w[j] * (std::pow(std::abs(u.u), ps) - std::pow(std::abs(a.u), ps));
        }
        const double Gp = pairwise_sum(dg), Fp = pairwise_sum(df);
        out.split_grad[k] = Gp - std::pow(eps, p) * gphi;
        out.split_func[k] = Fp - std::pow(eps, ps) * fphi;
        const double delta = S_grid * std::expm1(std::log1p(Gp / G0) / p - std::log1p(Fp / F0) / ps);
        const double grad_u = std::pow(G0 + Gp, 1.0 / p);
        out.fit.deficit[k] = delta;
        out.proxy_distance[k] = eps * out.bump_grad_norm / grad_u;

        FieldTable u = vt;
        u.u.resize(paired.size());
        u.g_rho.resize(paired.size());
        u.g_z.resize(paired.size());
        for (std::size_t j = 0; j < P; ++j) {
            const MeridianSample a = vp[j];
            u.u[Ns + j] = a.u + eps * phi[j].u;
            u.g_rho[Ns + j] = a.g_rho + eps * phi[j].g_rho;
            u.g_z[Ns + j] = a.g_z + eps * phi[j].g_z;
            u.u[Ns + P + j] = a.u;
            u.g_rho[Ns + P + j] = a.g_rho;
            u.g_z[Ns + P + j] = a.g_z;
        }
        const double dist = project_gradient_distance(paired, u, dim, v, opt).distance;
        out.fit.distance[k] = dist;
        if (eps > 0.0) {
            out.ratio[k] = delta / std::pow(dist, out.alpha);
            out.ratio_reduced[k] = delta / std::pow(dist, out.alpha - 0.5);
        }
    });
    // eps = 0 members (u = v) are reported but carry no rate information
    SlopeFit positive;
    for (std::size_t k = 0; k < K; ++k) {
        if (!(eps_list[k] > 0.0)) continue;
        positive.param.push_back(eps_list[k]);
        positive.deficit.push_back(out.fit.deficit[k]);
        positive.distance.push_back(out.fit.distance[k]);
    }
    finish_fit(positive);
    out.fit.deficit_fit = positive.deficit_fit;
    out.fit.distance_fit = positive.distance_fit;
    return out;
}

// ---------------------------------------------------------------- main-theorem ratio

RatioScan stability_ratio_scan(const Dim& dim, const GridSpec& spec, const RatioScanOptions& opt) {
    if (opt.count == 0) throw Error(ErrorCode::InvalidArgument, "ratio scan needs at least one sample");
    if (!(opt.eps_min > 0.0) || !(opt.eps_max >= opt.eps_min) || opt.eps_max > 0.1)
        throw Error(ErrorCode::InvalidArgument, "ratio scan eps range must lie in (0, 0.1]");
    if (opt.deficit_refinement < 0 || opt.deficit_refinement > 4)
        throw Error(ErrorCode::InvalidArgument, "deficit_refinement must lie in [0, 4]");
    const AxisymGrid grid(spec, dim.n());
    const NodeSet& ns = grid.nodes();
    GridSpec dspec = spec;
    for (int k = 0; k < opt.deficit_refinement; ++k) dspec.N = 2 * dspec.N - 1;
    const AxisymGrid dgrid(dspec, dim.n());
    const NodeSet& dns = dgrid.nodes();
    const double S = grid_sobolev_constant(dns, dim);
    const Bubble v{};
    const std::vector<TestFunction> corpus = make_corpus(dim, opt.count, opt.seed);
    RatioScan scan;
    scan.alpha = std::max(2.0, dim.p());
    std::vector<RatioSample> all(opt.count);
    std::vector<char> ok(opt.count, 0);
    parallel_for(opt.count, [&](std::size_t k) {
        Rng rng(mix_seed(opt.seed, 1000003 + k));
        RatioSample& s = all[k];
        s.phi = corpus[k].describe();
        s.eps = rng.log_uniform(opt.eps_min, opt.eps_max);
        const PerturbedBubble pb(v, test_field(corpus[k], dim.n()), s.eps, dim, ns);
        s.deficit = deficit_on_nodes(dns, pb.u_table(dns), dim, S).deficit;
        const FieldTable u = pb.u_table(ns);
        try {
            s.distance = project_gradient_distance(ns, u, dim, v, opt.projection).distance;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotConverged && e.code() != ErrorCode::NoNearbyBubble) throw;
            return;
        }
        s.ratio = s.deficit / std::pow(s.distance, scan.alpha);
        ok[k] = 1;
    });
    for (std::size_t k = 0; k < opt.count; ++k) {
        if (ok[k]) scan.samples.push_back(all[k]);
        else ++scan.excluded;
    }
    if (scan.samples.empty()) throw Error(ErrorCode::NotConverged, "every projection in the ratio scan failed");
    std::vector<double> r;
    for (const RatioSample& s : scan.samples) r.push_back(s.ratio);
    std::sort(r.begin(), r.end());
    scan.min_ratio = r.front();
    scan.max_ratio = r.back();
    scan.median_ratio = r.size() % 2 ? r[r.size() / 2] : 0.5 * (r[r.size() / 2 - 1] + r[r.size() / 2]);
    return scan;
}

}  // namespace sobolev
