#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sobolev/bubble.hpp"
#include "sobolev/core.hpp"
#include "sobolev/projection.hpp"
#include "sobolev/quadrature.hpp"

namespace sobolev {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root-mean-square residual of the natural-log fit
};

// Least-squares fit of log y against log x; needs >= 5 points spanning >= 1.5 decades with y > 0.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SlopeFit {
    std::vector<double> param;     // i or eps
    std::vector<double> deficit;
    std::vector<double> distance;  // projected gradient distance / ||Du||
    LogLogFit deficit_fit, distance_fit;
};

// ---------------------------------------------------------------- anisotropic family

// u_i(x) = v(A_i x), A_i = diag(1, ..., 1, 1 + 1/i), v the unit bubble at the origin.
AxisymField anisotropic_member(const Dim& dim, double i);

SlopeFit anisotropic_family(const Dim& dim, const std::vector<double>& i_list, const GridSpec& spec,
                            const ProjectionOptions& opt = {});

// ---------------------------------------------------------------- bump family

struct BumpFamily {
    SlopeFit fit;
    double x_far = 0.0;
    double v_far = 0.0;                 // v(x_far)
    double alpha = 0.0;                 // max{2, p}
    double bump_grad_norm = 0.0;        // ||D phi||_p of the bump
    double bump_pstar_norm = 0.0;       // ||phi||_{p*}
    std::vector<double> proxy_distance; // eps ||D phi|| / ||D u||
    std::vector<double> split_grad;     // ||Du||^p - ||Dv||^p - eps^p ||D phi||^p
    std::vector<double> split_func;     // ||u||^{p*} - ||v||^{p*} - eps^{p*} ||phi||^{p*}
    std::vector<double> ratio;          // delta / distance^alpha
    std::vector<double> ratio_reduced;  // delta / distance^{alpha - 1/2}
};

// Smallest 10^k (k >= 1) with v(10^k) below min(1e-6, 0.1 min eps), min over the positive eps.
double default_x_far(const Dim& dim, const std::vector<double>& eps_list);

// u = v + eps phi(. - x_far e_n) with phi(y) = B(|y|) supported in the unit ball. The bump lives on a
// local ball patch (its coordinates are never added to x_far), so x_far can be astronomically large.
// x_far <= 0 selects default_x_far. Throws CONDITION_VIOLATED if v(x_far) >= 0.1 min eps. Entries eps = 0
// are evaluated (u = v) but left out of the fits and ratios.
BumpFamily bump_family(const Dim& dim, const std::vector<double>& eps_list, double x_far, const GridSpec& spec,
                       const ProjectionOptions& opt = {});

// ---------------------------------------------------------------- main-theorem ratio

struct RatioSample {
    std::string phi;
    double eps = 0.0;
    double deficit = 0.0;
    double distance = 0.0;
    double ratio = 0.0;  // delta / distance^alpha
};

struct RatioScan {
    double alpha = 0.0;
    std::vector<RatioSample> samples;
    std::size_t excluded = 0;  // projection failures
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    double max_ratio = 0.0;
};

struct RatioScanOptions {
    std::size_t count = 200;
    std::uint64_t seed = 1;
    double eps_min = 1e-2, eps_max = 1e-1;
    // the deficit is evaluated with 2^k times the radial density of the projection grid (nested)
    int deficit_refinement = 2;
    ProjectionOptions projection;
};

// u = v + eps phi / ||D phi|| over the standard corpus with eps log-uniform in [eps_min, eps_max].
// The first-order terms of delta cancel only up to quadrature error, which the ratio divides by
// eps^2, so delta gets a denser grid than the (much more expensive) projection.
RatioScan stability_ratio_scan(const Dim& dim, const GridSpec& spec, const RatioScanOptions& opt = {});

}  // namespace sobolev
