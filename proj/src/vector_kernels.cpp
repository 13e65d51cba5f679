#include "sobolev/vector_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "sobolev/nelder_mead.hpp"
#include "sobolev/parallel.hpp"
#include "sobolev/random.hpp"

namespace sobolev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

// (1+u)^k - 1 - k u, accurate for small u
double binomial_remainder(double u, double k) {
    if (std::abs(u) < 1e-2) {
        double term = 1.0, sum = 0.0;
        for (int j = 1; j <= 16; ++j) {
            term *= (k - (j - 1)) / j * u;
            if (j >= 2) sum += term;
        }
        return sum;
    }
    return std::pow(1.0 + u, k) - 1.0 - k * u;
}

}  // namespace

WeightBranch weight_branch(double p) { return p < 2.0 ? WeightBranch::PLess2 : WeightBranch::PGe2; }

Weight weight_w(std::span<const double> x, std::span<const double> x_plus_y, double p) {
    const double nx = norm(x), nxy = norm(x_plus_y);
    Weight out;
    out.w.assign(x.begin(), x.end());
    if (p < 2.0) {
        if (nx == 0.0) {
            out.degenerate = true;
            std::fill(out.w.begin(), out.w.end(), 0.0);
            return out;
        }
        if (nx < nxy) {
            const double f = std::pow(nxy / ((2.0 - p) * nxy + (p - 1.0) * nx), 1.0 / (p - 2.0));
            for (double& c : out.w) c *= f;
        }
        return out;
    }
    out.degenerate = nx == 0.0 || nxy == 0.0;
    if (p == 2.0 || nx <= nxy) return out;
    // |x+y| < |x|
    const double f = nxy == 0.0 ? 0.0 : std::pow(nxy / nx, 1.0 / (p - 2.0));
    for (std::size_t i = 0; i < out.w.size(); ++i) out.w[i] = f * x_plus_y[i];
    return out;
}

double weight_factor(double nx, double nxy, double p) {
    if (p == 2.0) return 1.0;
    if (p < 2.0) {
        if (nx == 0.0) return kInf;
        if (nxy <= nx) return std::pow(nx, p - 2.0);
        return nxy / ((2.0 - p) * nxy + (p - 1.0) * nx) * std::pow(nx, p - 2.0);
    }
    if (nx <= nxy) return std::pow(nx, p - 2.0);
    return std::pow(nxy, p - 1.0) / nx;
}

PairInvariants invariants(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "vectors of different dimension");
    PairInvariants pr;
    double sxy = 0.0, s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        s += (x[i] + y[i]) * (x[i] + y[i]);
    }
    pr.nx = norm(x);
    pr.ny = norm(y);
    pr.xy = sxy;
    pr.nxy = std::sqrt(s);
    return pr;
}

PairInvariants invariants(double nx, double ny, double xy) {
    return {nx, ny, xy, std::sqrt(std::max(0.0, nx * nx + ny * ny + 2.0 * xy))};
}

PairInvariants planar_pair(double rho, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {1.0, rho, rho * c, std::hypot(1.0 + rho * c, rho * s)};
}

namespace {

// |x| - |x+y| without cancellation
double norm_change(const PairInvariants& pr) {
    const double den = pr.nx + pr.nxy;
    return den > 0.0 ? -(pr.ny * pr.ny + 2.0 * pr.xy) / den : 0.0;
}

// |x+y|^p - |x|^p - p|x|^{p-2} x.y
double taylor_remainder(const PairInvariants& pr, double p) {
    if (pr.nx == 0.0) return std::pow(pr.ny, p);
    const double u = (pr.ny * pr.ny + 2.0 * pr.xy) / (pr.nx * pr.nx);
    return std::pow(pr.nx, p) * binomial_remainder(u, 0.5 * p) + 0.5 * p * std::pow(pr.nx, p - 2.0) * pr.ny * pr.ny;
}

}  // namespace

double quad_form_G(const PairInvariants& pr, double p) {
    if (pr.nx == 0.0) {
        // limits as |x| -> 0 with y fixed
        if (p == 2.0) return 2.0 * pr.ny * pr.ny;
        return 0.0;
    }
    const double d = norm_change(pr);
    double g = p * std::pow(pr.nx, p - 2.0) * pr.ny * pr.ny;
    if (p != 2.0) g += p * (p - 2.0) * weight_factor(pr.nx, pr.nxy, p) * d * d;
    return g;
}

double quad_form_G(std::span<const double> x, std::span<const double> y, double p) {
    return quad_form_G(invariants(x, y), p);
}

double lemma21_normalizer(const PairInvariants& pr, double p) {
    const double yp = std::pow(pr.ny, p);
    if (p >= 2.0 || pr.nx == 0.0) return yp;
    return std::min(yp, std::pow(pr.nx, p - 2.0) * pr.ny * pr.ny);
}

double lemma21_gap(const PairInvariants& pr, double p, double kappa, double c0) {
    return taylor_remainder(pr, p) - 0.5 * (1.0 - kappa) * quad_form_G(pr, p) - c0 * lemma21_normalizer(pr, p);
}

double lemma21_gap(std::span<const double> x, std::span<const double> y, double p, double kappa, double c0) {
    return lemma21_gap(invariants(x, y), p, kappa, c0);
}

double lemma21_ratio(const PairInvariants& pr, double p, double kappa) {
    const double nrm = lemma21_normalizer(pr, p);
    if (!(nrm > 0.0)) return kInf;
    return (taylor_remainder(pr, p) - 0.5 * (1.0 - kappa) * quad_form_G(pr, p)) / nrm;
}

// ---------------------------------------------------------------- scalar inequalities

namespace {

// |1+t|^{p*} - 1 - p* t
double power_remainder(double t, double ps) {
    if (std::abs(t) < 0.5) return binomial_remainder(t, ps);
    return std::pow(std::abs(1.0 + t), ps) - 1.0 - ps * t;
}

double lemma23_A(double ps, double kappa) { return 0.5 * ps * (ps - 1.0) + kappa; }

}  // namespace

double lemma23_gap(double a, double b, const Dim& dim, double kappa, double C1) {
    if (a == 0.0) throw Error(ErrorCode::InvalidArgument, "a must be nonzero");
    const double ps = dim.pstar();
    const double A = lemma23_A(ps, kappa);
    const double t = b / a;
    const double at = std::abs(t);
    double bound;
    if (dim.low_exponent())
        bound = A * std::pow(1.0 + C1 * at, ps) * (t * t / (1.0 + t * t));
    else
        bound = A * t * t + C1 * std::pow(at, ps);
    return std::pow(std::abs(a), ps) * (bound - power_remainder(t, ps));
}

double lemma23_requirement(double t, const Dim& dim, double kappa) {
    if (t == 0.0) return 0.0;
    const double ps = dim.pstar();
    const double A = lemma23_A(ps, kappa);
    const double D = power_remainder(t, ps);
    const double at = std::abs(t);
    if (dim.low_exponent()) {
        const double R = (1.0 + t * t) * D / (A * t * t);
        return R > 1.0 ? (std::pow(R, 1.0 / ps) - 1.0) / at : 0.0;
    }
    return (D - A * t * t) / std::pow(at, ps);
}

namespace {

void require_low_exponent(const Dim& dim) {
    if (!dim.low_exponent())
        throw Error(ErrorCode::InvalidArgument, "the appendix-B inequality needs p <= 2n/(n+2)");
}

struct BParts {
    double lhs = 0.0, eps0_term = 0.0, bterm = 0.0;
};

BParts appendixB_parts(const AppendixBPoint& x, double eps0, double zeta, const Dim& dim, AppendixBForm form) {
    require_low_exponent(dim);
    if (!(x.eps > 0.0 && x.eps < 1.0) || x.r < 0.0 || x.a < 0.0 || x.b < 0.0)
        throw Error(ErrorCode::ConstraintViolated, "need eps in (0,1) and r, a, b >= 0");
    const double amax = appendixB_amax(x.eps, x.r, zeta, dim);
    if (x.a > amax * (1.0 + 1e-12))
        throw Error(ErrorCode::ConstraintViolated, "eps a exceeds zeta (1 + r^{p/(p-1)})^{1-n/p}");
    const double n = dim.n(), p = dim.p(), q = dim.q(), ps = dim.pstar();
    const double rq = std::pow(x.r, q);
    const double W = 1.0 + rq;
    const double e0 = (1.0 - n / p) * (ps - 2.0);
    BParts out;
    const double inner = x.a * x.a * std::pow(zeta, p) * rq * std::pow(W, -p) +
                         x.a * x.a * std::pow(x.eps, p) * std::pow(x.b, p) * std::pow(W, n - p) +
                         std::pow(x.a, 2.0 - p) * std::pow(x.b, p);
    out.lhs = std::pow(W, e0 + p - 1.0) * inner;
    out.eps0_term = eps0 * std::pow(W, e0) * x.a * x.a;
    if (x.b > 0.0) {
        const double base = std::pow(W, -n / p) * std::pow(x.r, 1.0 / (p - 1.0)) + x.eps * x.b;
        out.bterm = std::pow(base, p - 2.0) * x.b * x.b;
        if (form == AppendixBForm::Inter) out.bterm *= std::pow(1.0 + x.r, -q);
    }
    return out;
}

}  // namespace

double appendixB_zeta(double eps0, const Dim& dim) { return std::pow(eps0 / 3.0, 1.0 / dim.p()); }

double appendixB_amax(double eps, double r, double zeta, const Dim& dim) {
    return zeta * std::pow(1.0 + std::pow(r, dim.q()), 1.0 - dim.n() / dim.p()) / eps;
}

double appendixB_gap(const AppendixBPoint& x, double eps0, double zeta, double C, const Dim& dim, AppendixBForm form) {
    const BParts b = appendixB_parts(x, eps0, zeta, dim, form);
    return b.eps0_term + C * b.bterm - b.lhs;
}

double appendixB_requirement(const AppendixBPoint& x, double eps0, double zeta, const Dim& dim, AppendixBForm form) {
    const BParts b = appendixB_parts(x, eps0, zeta, dim, form);
    const double excess = b.lhs - b.eps0_term;
    if (excess <= 0.0) return 0.0;
    return b.bterm > 0.0 ? excess / b.bterm : kInf;
}

// ---------------------------------------------------------------- sampling machinery

namespace {

constexpr std::size_t kChunks = 64;
constexpr std::size_t kKeep = 100;

struct Candidate {
    double value;
    std::array<double, 4> x;
};

// Samples `budget` points split into fixed chunks (independent of the worker count). Even
// samples come from a shifted Sobol sequence, odd ones from a pseudo-random stream. `eval`
// maps a point of [0,1)^dim to (value, stored coordinates); the `kKeep` smallest values are kept.
template <class Eval>
std::vector<Candidate> sample_worst(std::size_t budget, std::uint64_t seed, int sdim, const Eval& eval) {
    std::vector<std::vector<Candidate>> kept(kChunks);
    parallel_for(kChunks, [&](std::size_t c) {
        const std::size_t lo = budget * c / kChunks, hi = budget * (c + 1) / kChunks;
        Sobol sob(sdim, mix_seed(seed, 2 * c));
        Rng rng(mix_seed(seed, 2 * c + 1));
        std::vector<Candidate> local;
        std::array<double, 8> u{};
        for (std::size_t i = lo; i < hi; ++i) {
            if (i % 2 == 0)
                sob.next(u.data());
            else
                for (int d = 0; d < sdim; ++d) u[d] = rng.uniform();
            Candidate cand = eval(u);
            if (std::isnan(cand.value)) continue;
            local.push_back(cand);
            if (local.size() >= 4 * kKeep) {
                std::nth_element(local.begin(), local.begin() + kKeep, local.end(),
                                 [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
                local.resize(kKeep);
            }
        }
        kept[c] = std::move(local);
    });
    std::vector<Candidate> all;
    for (auto& k : kept) all.insert(all.end(), k.begin(), k.end());
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    if (all.size() > kKeep) all.resize(kKeep);
    return all;
}

double log_map(double u, double lo, double hi) { return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))); }

double clamp_log(double x, double lo, double hi) { return std::exp(std::clamp(x, std::log(lo), std::log(hi))); }

}  // namespace

ConstantSearch search_c0(double p, double kappa, std::size_t budget, std::uint64_t seed) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be in (0,1)");
    if (budget < 10000) throw Error(ErrorCode::InvalidArgument, "sample budget must be >= 1e4");
    if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be > 1");
    using R = SampleRanges;
    auto eval = [&](const std::array<double, 8>& u) {
        const double rho = log_map(u[0], R::y_min, R::y_max);
        const double th = std::numbers::pi * u[1];
        return Candidate{lemma21_ratio(planar_pair(rho, th), p, kappa), {std::log(rho), th, 0, 0}};
    };
    std::vector<Candidate> worst = sample_worst(budget, seed, 2, eval);
    ConstantSearch out;
    out.samples = budget;
    out.extreme = kInf;
    auto objective = [&](const std::vector<double>& x) {
        return lemma21_ratio(planar_pair(clamp_log(x[0], R::y_min, R::y_max), x[1]), p, kappa);
    };
    std::vector<Candidate> polished(worst.size());
    parallel_for(worst.size(), [&](std::size_t i) {
        NelderMeadOptions opt;
        opt.step = {0.2, 0.1};
        opt.max_evals = 2000;
        opt.f_tol = 1e-14;
        opt.x_tol = 1e-10;
        const NelderMeadResult r = nelder_mead(objective, {worst[i].x[0], worst[i].x[1]}, opt);
        polished[i] = r.f < worst[i].value ? Candidate{r.f, {r.x[0], r.x[1], 0, 0}} : worst[i];
    });
    for (const Candidate& c : polished)
        if (c.value < out.extreme) {
            out.extreme = c.value;
            out.argument = {clamp_log(c.x[0], R::y_min, R::y_max), std::fmod(std::abs(c.x[1]), 2 * std::numbers::pi)};
        }
    out.estimate = out.extreme;
    if (!(out.estimate > 0.0) || !std::isfinite(out.estimate))
        throw Error(ErrorCode::SearchFailed, "c0 estimate is not positive (" + std::to_string(out.estimate) + ")");
    return out;
}

Verification verify_c0(double p, double kappa, double c0, std::size_t samples, std::uint64_t seed, double tol) {
    using R = SampleRanges;
    std::vector<Verification> parts(kChunks);
    parallel_for(kChunks, [&](std::size_t c) {
        const std::size_t lo = samples * c / kChunks, hi = samples * (c + 1) / kChunks;
        Rng rng(mix_seed(seed, 1000 + c));
        Verification& v = parts[c];
        v.worst_gap = kInf;
        std::array<double, 4> x{}, y{};
        for (std::size_t i = lo; i < hi; ++i) {
            const int d = 2 + static_cast<int>(i % 3);
            double nx = 0, ny = 0;
            for (int k = 0; k < d; ++k) {
                x[k] = rng.normal();
                y[k] = rng.normal();
                nx += x[k] * x[k];
                ny += y[k] * y[k];
            }
            nx = std::sqrt(nx);
            ny = std::sqrt(ny);
            const double rho = rng.log_uniform(R::y_min, R::y_max);
            for (int k = 0; k < d; ++k) {
                x[k] /= nx;
                y[k] *= rho / ny;
            }
            const std::span<const double> xs(x.data(), d), ys(y.data(), d);
            const double gap = lemma21_gap(xs, ys, p, kappa, c0);
            ++v.samples;
            if (nx == 0.0) ++v.flagged;
            if (gap < v.worst_gap) {
                v.worst_gap = gap;
                v.worst_input.assign(x.begin(), x.begin() + d);
                v.worst_input.insert(v.worst_input.end(), y.begin(), y.begin() + d);
            }
            if (!(gap >= -tol)) ++v.violations;
        }
    });
    Verification out;
    out.worst_gap = kInf;
    for (const Verification& v : parts) {
        out.samples += v.samples;
        out.violations += v.violations;
        out.flagged += v.flagged;
        if (v.worst_gap < out.worst_gap) {
            out.worst_gap = v.worst_gap;
            out.worst_input = v.worst_input;
        }
    }
    return out;
}

ConstantSearch search_C1(const Dim& dim, double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be > 0");
    using R = SampleRanges;
    const double ps = dim.pstar();
    const int per_sign = 32001;
    const double lo = std::log10(R::t_min), hi = std::log10(R::t_max) + 2.0;
    ConstantSearch out;
    out.extreme = -kInf;
    double best_k = 0.0, best_sign = 1.0;
    for (double sign : {-1.0, 1.0})
        for (int i = 0; i < per_sign; ++i) {
            const double k = lo + (hi - lo) * i / (per_sign - 1);
            const double val = lemma23_requirement(sign * std::pow(10.0, k), dim, kappa);
            if (val > out.extreme) {
                out.extreme = val;
                best_k = k;
                best_sign = sign;
            }
        }
    out.samples = 2 * per_sign;
    // golden-section refinement of the maximum in log10|t|
    {
        const double step = (hi - lo) / (per_sign - 1);
        double a = best_k - step, b = best_k + step;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        auto f = [&](double k) { return lemma23_requirement(best_sign * std::pow(10.0, k), dim, kappa); };
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 80; ++it) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        const double km = 0.5 * (a + b);
        const double fm = f(km);
        if (fm > out.extreme) {
            out.extreme = fm;
            best_k = km;
        }
    }
    out.argument = {best_sign * std::pow(10.0, best_k)};
    double est = out.extreme;
    if (dim.low_exponent()) {
        // |t| -> infinity limit of the requirement, and the Taylor-window floor 1/p*
        est = std::max({est, std::pow(lemma23_A(ps, kappa), -1.0 / ps), 1.0 / ps});
    } else {
        est = std::max(est, 1.0);
    }
    // round up past the refinement tolerance
    out.estimate = est * (1.0 + 1e-9);
    return out;
}

Verification verify_C1(const Dim& dim, double kappa, double C1, std::size_t samples, std::uint64_t seed, double tol) {
    using R = SampleRanges;
    const double ps = dim.pstar();
    std::vector<Verification> parts(kChunks);
    parallel_for(kChunks, [&](std::size_t c) {
        const std::size_t lo = samples * c / kChunks, hi = samples * (c + 1) / kChunks;
        Rng rng(mix_seed(seed, 2000 + c));
        Verification& v = parts[c];
        v.worst_gap = kInf;
        for (std::size_t i = lo; i < hi; ++i) {
            const double a = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.log_uniform(1e-3, 1e3);
            const double t = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.log_uniform(R::t_min, R::t_max);
            const double g = lemma23_gap(a, t * a, dim, kappa, C1) / std::pow(std::abs(a), ps);
            ++v.samples;
            if (g < v.worst_gap) {
                v.worst_gap = g;
                v.worst_input = {a, t * a};
            }
            if (!(g >= -tol)) ++v.violations;
        }
    });
    Verification out;
    out.worst_gap = kInf;
    for (const Verification& v : parts) {
        out.samples += v.samples;
        out.violations += v.violations;
        if (v.worst_gap < out.worst_gap) {
            out.worst_gap = v.worst_gap;
            out.worst_input = v.worst_input;
        }
    }
    return out;
}

namespace {

// maps [0,1)^4 to a constrained appendix-B point
AppendixBPoint appendixB_sample(const std::array<double, 8>& u, double zeta, const Dim& dim) {
    using R = SampleRanges;
    AppendixBPoint x;
    x.eps = log_map(u[0], R::eps_min, 1.0);
    if (x.eps >= 1.0) x.eps = std::nextafter(1.0, 0.0);
    x.r = log_map(u[1], R::r_min, R::r_max);
    const double amax = appendixB_amax(x.eps, x.r, zeta, dim);
    // half the samples on a log scale below the constraint, the rest quadratically clustered at it
    const double w = u[2];
    x.a = w < 0.5 ? amax * std::pow(10.0, -12.0 * (1.0 - 2.0 * w)) : amax * (1.0 - (2.0 * w - 1.0) * (2.0 * w - 1.0));
    x.b = log_map(u[3], R::b_min, R::b_max);
    return x;
}

AppendixBPoint appendixB_unpack(const std::vector<double>& y, double zeta, const Dim& dim) {
    using R = SampleRanges;
    AppendixBPoint x;
    x.eps = std::min(clamp_log(y[0], R::eps_min, 1.0), std::nextafter(1.0, 0.0));
    x.r = clamp_log(y[1], R::r_min, R::r_max);
    x.a = appendixB_amax(x.eps, x.r, zeta, dim) * std::exp(-std::abs(y[2]));
    x.b = clamp_log(y[3], R::b_min, R::b_max);
    return x;
}

}  // namespace

ConstantSearch search_appendixB_C(const Dim& dim, double eps0, std::size_t budget, std::uint64_t seed) {
    require_low_exponent(dim);
    if (!(eps0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps0 must be > 0");
    const double zeta = appendixB_zeta(eps0, dim);
    auto eval = [&](const std::array<double, 8>& u) {
        const AppendixBPoint x = appendixB_sample(u, zeta, dim);
        const double req = appendixB_requirement(x, eps0, zeta, dim, AppendixBForm::Inter);
        const double amax = appendixB_amax(x.eps, x.r, zeta, dim);
        return Candidate{-req, {std::log(x.eps), std::log(x.r), std::log(amax / x.a), std::log(x.b)}};
    };
    std::vector<Candidate> worst = sample_worst(budget, seed, 4, eval);
    auto objective = [&](const std::vector<double>& y) {
        return -appendixB_requirement(appendixB_unpack(y, zeta, dim), eps0, zeta, dim, AppendixBForm::Inter);
    };
    std::vector<Candidate> polished(worst.size());
    parallel_for(worst.size(), [&](std::size_t i) {
        NelderMeadOptions opt;
        opt.step = {0.3, 0.3, 0.3, 0.3};
        opt.max_evals = 4000;
        opt.f_tol = 1e-13;
        opt.x_tol = 1e-9;
        const auto& x = worst[i].x;
        const NelderMeadResult r = nelder_mead(objective, {x[0], x[1], x[2], x[3]}, opt);
        polished[i] = r.f < worst[i].value ? Candidate{r.f, {r.x[0], r.x[1], r.x[2], r.x[3]}} : worst[i];
    });
    ConstantSearch out;
    out.samples = budget;
    out.extreme = 0.0;
    for (const Candidate& c : polished)
        if (-c.value > out.extreme) {
            out.extreme = -c.value;
            const AppendixBPoint x = appendixB_unpack({c.x[0], c.x[1], c.x[2], c.x[3]}, zeta, dim);
            out.argument = {x.eps, x.r, x.a, x.b};
        }
    if (!std::isfinite(out.extreme)) throw Error(ErrorCode::SearchFailed, "appendix-B requirement is unbounded");
    out.estimate = out.extreme * (1.0 + 1e-9);
    return out;
}

Verification verify_appendixB(const Dim& dim, double eps0, double C, std::size_t samples, std::uint64_t seed,
                              double tol) {
    require_low_exponent(dim);
    const double zeta = appendixB_zeta(eps0, dim);
    std::vector<Verification> parts(kChunks);
    parallel_for(kChunks, [&](std::size_t c) {
        const std::size_t lo = samples * c / kChunks, hi = samples * (c + 1) / kChunks;
        Rng rng(mix_seed(seed, 3000 + c));
        Verification& v = parts[c];
        v.worst_gap = kInf;
        std::array<double, 8> u{};
        for (std::size_t i = lo; i < hi; ++i) {
            for (int d = 0; d < 4; ++d) u[d] = rng.uniform();
            const AppendixBPoint x = appendixB_sample(u, zeta, dim);
            const BParts bi = appendixB_parts(x, eps0, zeta, dim, AppendixBForm::Inter);
            const BParts by = appendixB_parts(x, eps0, zeta, dim, AppendixBForm::Young);
            const double scale = bi.lhs + bi.eps0_term + C * by.bterm;
            const double gi = bi.eps0_term + C * bi.bterm - bi.lhs;
            const double gy = by.eps0_term + C * by.bterm - by.lhs;
            const double worst = std::min(gi, gy - gi) / (scale > 0 ? scale : 1.0);
            ++v.samples;
            (x.r <= 1.0 ? v.case_small_r : v.case_large_r) += 1;
            if (worst < v.worst_gap) {
                v.worst_gap = worst;
                v.worst_input = {x.eps, x.r, x.a, x.b};
            }
            if (!(worst >= -tol)) ++v.violations;
        }
    });
    Verification out;
    out.worst_gap = kInf;
    for (const Verification& v : parts) {
        out.samples += v.samples;
        out.violations += v.violations;
        out.case_small_r += v.case_small_r;
        out.case_large_r += v.case_large_r;
        if (v.worst_gap < out.worst_gap) {
            out.worst_gap = v.worst_gap;
            out.worst_input = v.worst_input;
        }
    }
    return out;
}

}  // namespace sobolev
