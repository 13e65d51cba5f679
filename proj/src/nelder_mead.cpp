#include "sobolev/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sobolev {

namespace {
double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }
}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return safe(f(x));
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double h = opt.step.size() == n ? opt.step[i] : 0.1;
        pts[i + 1][i] += h;
    }
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    NelderMeadResult res;
    auto trial = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + t * (worst[d] - centroid[d]);
    };

    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        {
            std::vector<std::vector<double>> p2(n + 1);
            std::vector<double> v2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                p2[i] = pts[order[i]];
                v2[i] = vals[order[i]];
            }
            pts.swap(p2);
            vals.swap(v2);
        }
        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d) diam = std::max(diam, std::abs(pts[i][d] - pts[0][d]));
        const double spread = vals[n] - vals[0];
        res.diameter = diam;
        if (diam < opt.x_tol && spread <= opt.f_tol * std::max(opt.f_floor, std::abs(vals[0]))) {
            res.converged = true;
            break;
        }
        if (evals >= opt.max_evals) break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);

        const auto& worst = pts[n];
        trial(-1.0, xr, worst);
        const double fr = eval(xr);
        if (fr < vals[0]) {
            trial(-2.0, xe, worst);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        const bool outside = fr < vals[n];
        trial(outside ? -0.5 : 0.5, xc, worst);
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[n])) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
            vals[i] = eval(pts[i]);
        }
    }
    res.x = pts[0];
    res.f = vals[0];
    res.evals = evals;
    return res;
}

}  // namespace sobolev
