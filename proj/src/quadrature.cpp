#include "sobolev/quadrature.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

namespace sobolev {

// ---------------------------------------------------------------- grids

GridSpec GridSpec::for_dim(const Dim& dim, int N_ref, int M, double tail_digits) {
    if (N_ref < 16 || M < 2) throw Error(ErrorCode::InvalidConfig, "grid too small");
    GridSpec g;
    g.M = M;
    g.s_min = -14.0;
    // for p < 2 the weight |Dv|^{p-2} ~ r^{(p-2)/(p-1)} is singular at the center; a gradient that does
    // not vanish there gives a ds-density ~ r^{n + (p-2)/(p-1)}, so the inner end is pushed in as well
    if (dim.p() < 2.0) {
        const double inner = dim.n() + (dim.p() - 2.0) / (dim.p() - 1.0);
        if (inner > 0.0) g.s_min = -std::min(60.0, std::max(14.0, tail_digits * std::numbers::ln10 / inner + 1.0));
    }
    const double h = 28.0 / (N_ref - 1);
    const double rate = (dim.n() - dim.p()) / (dim.p() - 1.0);
    const double need = tail_digits * std::numbers::ln10 / rate + 1.0;
    const double s_max = std::max(14.0, need);
    g.N = static_cast<int>(std::ceil((s_max - g.s_min) / h - 1e-9)) + 1;
    g.s_max = g.s_min + (g.N - 1) * h;
    return g;
}

GridSpec GridSpec::refined() const {
    GridSpec g = *this;
    g.N = 2 * N - 1;
    g.M = 2 * M;
    return g;
}

RadialGrid::RadialGrid(int N, double s_min, double s_max, int n) : n_(n) {
    if (N < 8 || !(s_max > s_min)) throw Error(ErrorCode::InvalidConfig, "invalid radial grid");
    h_ = (s_max - s_min) / (N - 1);
    s.resize(N);
    r.resize(N);
    wds.resize(N);
    vol.resize(N);
    for (int k = 0; k < N; ++k) {
        s[k] = s_min + k * h_;
        r[k] = std::exp(s[k]);
        wds[k] = (k == 0 || k == N - 1) ? 0.5 * h_ : h_;
        vol[k] = wds[k] * std::exp(n * s[k]);
    }
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> off) {
    const std::size_t n = diag.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double rad = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - rad);
        hi = std::max(hi, diag[i] + rad);
    }
    auto count_below = [&](double x) {
        int c = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double b2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
            d = (diag[i] - x) - (i > 0 ? b2 / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++c;
        }
        return c;
    };
    std::vector<double> ev(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (count_below(mid) > static_cast<int>(idx))
                b = mid;
            else
                a = mid;
            if (b - a <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)) + 1e-300)
                break;
        }
        ev[idx] = 0.5 * (a + b);
    }
    return ev;
}

AngularGrid::AngularGrid(int M, int n) : n_(n) {
    if (M < 1) throw Error(ErrorCode::InvalidConfig, "angular grid needs M >= 1");
    const double a = 0.5 * (n - 3);
    mass = std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
    sphere_factor = sphere_area(n - 2);
    beta_.assign(M + 1, 0.0);
    for (int k = 1; k <= M; ++k) {
        if (n == 2)
            beta_[k] = k == 1 ? 0.5 : 0.25;
        else
            beta_[k] = k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0));
    }
    std::vector<double> diag(M, 0.0), off(M > 1 ? M - 1 : 0);
    for (int k = 1; k < M; ++k) off[k - 1] = std::sqrt(beta_[k]);
    mu = tridiagonal_eigenvalues(diag, off);
    std::vector<double> p(M + 1), dp(M + 1);
    for (double& x : mu) {
        for (int it = 0; it < 3; ++it) {
            orthonormal(x, M + 1, p.data(), dp.data());
            if (dp[M] != 0.0) x -= p[M] / dp[M];
        }
    }
    w.resize(M);
    for (int i = 0; i < M; ++i) {
        orthonormal(mu[i], M, p.data());
        double s = 0.0;
        for (int k = 0; k < M; ++k) s += p[k] * p[k];
        w[i] = 1.0 / s;
    }
    // exact mirror symmetry
    for (int i = 0; i < M / 2; ++i) {
        const double x = 0.5 * (mu[M - 1 - i] - mu[i]);
        const double ww = 0.5 * (w[i] + w[M - 1 - i]);
        mu[i] = -x;
        mu[M - 1 - i] = x;
        w[i] = w[M - 1 - i] = ww;
    }
    if (M % 2 == 1) mu[M / 2] = 0.0;
    sin_theta.resize(M);
    for (int i = 0; i < M; ++i) sin_theta[i] = std::sqrt(std::max(0.0, (1.0 - mu[i]) * (1.0 + mu[i])));
}

void AngularGrid::orthonormal(double x, int count, double* p, double* dp) const {
    if (count <= 0) return;
    p[0] = 1.0 / std::sqrt(mass);
    if (dp) dp[0] = 0.0;
    if (count == 1) return;
    double sb = std::sqrt(beta_[1]);
    p[1] = x * p[0] / sb;
    if (dp) dp[1] = p[0] / sb;
    for (int k = 1; k + 1 < count; ++k) {
        const double sk = std::sqrt(beta_[k]);
        const double sk1 = std::sqrt(beta_[k + 1]);
        p[k + 1] = (x * p[k] - sk * p[k - 1]) / sk1;
        if (dp) dp[k + 1] = (p[k] + x * dp[k] - sk * dp[k - 1]) / sk1;
    }
}

std::vector<double> AngularGrid::diff_matrix() const {
    const int M = size();
    std::vector<double> P(static_cast<std::size_t>(M) * M), D(static_cast<std::size_t>(M) * M);
    std::vector<double> p(M), dp(M);
    for (int i = 0; i < M; ++i) {
        orthonormal(mu[i], M, p.data(), dp.data());
        for (int j = 0; j < M; ++j) {
            P[static_cast<std::size_t>(i) * M + j] = p[j];
            D[static_cast<std::size_t>(i) * M + j] = dp[j];
        }
    }
    std::vector<double> out(static_cast<std::size_t>(M) * M, 0.0);
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < M; ++k) {
            double s = 0.0;
            for (int j = 0; j < M; ++j)
                s += D[static_cast<std::size_t>(i) * M + j] * P[static_cast<std::size_t>(k) * M + j];
            out[static_cast<std::size_t>(i) * M + k] = s * w[k];
        }
    return out;
}

AxisymGrid::AxisymGrid(const GridSpec& spec, int n)
    : spec_(spec), radial_(spec.N, spec.s_min, spec.s_max, n), angular_(spec.M, n) {
    auto& ns = nodes_;
    ns.n = n;
    ns.N = spec.N;
    ns.M = spec.M;
    ns.z_center = spec.z_center;
    ns.s = radial_.s;
    ns.wds = radial_.wds;
    const std::size_t total = static_cast<std::size_t>(spec.N) * spec.M;
    ns.rho.resize(total);
    ns.z.resize(total);
    ns.r.resize(total);
    ns.mu.resize(total);
    ns.w.resize(total);
    for (int k = 0; k < spec.N; ++k)
        for (int j = 0; j < spec.M; ++j) {
            const std::size_t i = static_cast<std::size_t>(k) * spec.M + j;
            ns.r[i] = radial_.r[k];
            ns.mu[i] = angular_.mu[j];  // relative to the grid center
            ns.rho[i] = radial_.r[k] * angular_.sin_theta[j];
            ns.z[i] = spec.z_center + radial_.r[k] * angular_.mu[j];
            ns.w[i] = angular_.sphere_factor * angular_.w[j] * radial_.vol[k];
        }
}

BallPatch make_ball_patch(int n, double center_z, double radius, int Nr, int M) {
    const AngularGrid gl(Nr, 3);  // plain Gauss–Legendre
    const AngularGrid ang(M, n);
    BallPatch b;
    b.center_z = center_z;
    b.radius = radius;
    for (int k = 0; k < Nr; ++k) {
        const double rl = 0.5 * radius * (gl.mu[k] + 1.0);
        const double wr = 0.5 * radius * gl.w[k] * std::pow(rl, n - 1);
        for (int j = 0; j < M; ++j) {
            const double rho = rl * ang.sin_theta[j];
            const double z = center_z + rl * ang.mu[j];
            const double r = std::hypot(rho, z);
            b.rho.push_back(rho);
            b.z.push_back(z);
            b.r.push_back(r);
            b.mu.push_back(r > 0.0 ? z / r : 1.0);
            b.w.push_back(ang.sphere_factor * ang.w[j] * wr);
        }
    }
    return b;
}

NodeSet with_patch(const NodeSet& base, const BallPatch& patch, bool paired) {
    NodeSet ns = base;
    ns.rho.resize(ns.structured());
    ns.z.resize(ns.structured());
    ns.r.resize(ns.structured());
    ns.mu.resize(ns.structured());
    ns.w.resize(ns.structured());
    const int copies = paired ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
        const double sign = c == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < patch.w.size(); ++i) {
            ns.rho.push_back(patch.rho[i]);
            ns.z.push_back(patch.z[i]);
            ns.r.push_back(patch.r[i]);
            ns.mu.push_back(patch.mu[i]);
            ns.w.push_back(sign * patch.w[i]);
        }
    }
    return ns;
}

// ---------------------------------------------------------------- integration

namespace {

// least-squares slope of y against x
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return den > 0 ? num / den : 0.0;
}

}  // namespace

void estimate_tails(std::span<const double> s, std::span<const double> density, IntegralResult& res) {
    const std::size_t N = s.size();
    if (N < 10) return;
    // outer: last 10% of nodes
    {
        const std::size_t win = std::max<std::size_t>(5, N / 10);
        const double last = density[N - 1];
        if (last == 0.0) {
            res.tail_outer = 0.0;
        } else {
            std::vector<double> xs, ys;
            for (std::size_t k = N - win; k < N; ++k)
                if (density[k] != 0.0) {
                    xs.push_back(s[k]);
                    ys.push_back(std::log(std::abs(density[k])));
                }
            const double slope = xs.size() >= 3 ? ls_slope(xs, ys) : 0.0;
            res.tail_outer = slope < -1e-3 ? std::abs(last) / (-slope) : std::numeric_limits<double>::infinity();
        }
    }
    // inner: first decade of radius
    {
        const double first = density[0];
        if (first == 0.0) {
            res.tail_inner = 0.0;
            res.inner_decays = true;
        } else {
            std::vector<double> xs, ys;
            for (std::size_t k = 0; k < N && (s[k] <= s[0] + std::numbers::ln10 || xs.size() < 5); ++k)
                if (density[k] != 0.0) {
                    xs.push_back(s[k]);
                    ys.push_back(std::log(std::abs(density[k])));
                }
            const double slope = xs.size() >= 3 ? ls_slope(xs, ys) : 0.0;
            res.inner_decays = slope > 1e-3;
            res.tail_inner = res.inner_decays ? std::abs(first) / slope : std::numeric_limits<double>::infinity();
        }
    }
}

void check_tails(const IntegralResult& res, const std::string& what, double tol) {
    const double scale = std::max(res.abs_value, std::numeric_limits<double>::min());
    if (!res.inner_decays && res.tail_inner > tol * scale)
        throw Error(ErrorCode::DivergentNearOrigin, what + ": integrand does not decay on the first radial decade");
    if (!(res.tail_outer <= tol * scale))
        throw Error(ErrorCode::TailTooLarge, what + ": estimated tail " + std::to_string(res.tail_outer) +
                                                 " exceeds tolerance (scale " + std::to_string(scale) + ")");
    if (!(res.tail_inner <= tol * scale))
        throw Error(ErrorCode::TailTooLarge, what + ": estimated inner tail " + std::to_string(res.tail_inner) +
                                                 " exceeds tolerance");
}

IntegralResult integrate_radial(const RadialGrid& grid, const std::function<double(double)>& g) {
    const int N = grid.size();
    const double area = sphere_area(grid.n() - 1);
    std::vector<double> dens(N), terms(N), aterms(N);
    for (int k = 0; k < N; ++k) {
        dens[k] = area * g(grid.r[k]) * std::exp(grid.n() * grid.s[k]);
        terms[k] = grid.wds[k] * dens[k];
        aterms[k] = std::abs(terms[k]);
    }
    IntegralResult res;
    res.value = pairwise_sum(terms);
    res.abs_value = pairwise_sum(aterms);
    estimate_tails(grid.s, dens, res);
    return res;
}

// ---------------------------------------------------------------- fields

AxisymField AxisymField::analytic(int n, MeridianFn fn, std::string description) {
    AxisymField f;
    f.kind_ = Kind::Analytic;
    f.n_ = n;
    f.fn_ = std::move(fn);
    f.description_ = std::move(description);
    return f;
}

AxisymField AxisymField::gridded(const AxisymGrid& grid, std::vector<double> values, std::string description) {
    const int N = grid.spec().N, M = grid.spec().M;
    if (values.size() != static_cast<std::size_t>(N) * M)
        throw Error(ErrorCode::InvalidArgument, "gridded field: value count does not match grid");
    AxisymField f;
    f.kind_ = Kind::Gridded;
    f.n_ = grid.n();
    f.spec_ = grid.spec();
    f.description_ = std::move(description);
    const double h = grid.radial().h();
    const auto& ang = grid.angular();
    const std::vector<double> D = ang.diff_matrix();
    FieldTable& t = f.table_;
    t.resize(values.size());
    auto at = [&](int k, int j) { return values[static_cast<std::size_t>(k) * M + j]; };
    for (int k = 0; k < N; ++k) {
        const double r = grid.radial().r[k];
        for (int j = 0; j < M; ++j) {
            double ds;
            if (k >= 2 && k + 2 < N)
                ds = (-at(k + 2, j) + 8.0 * at(k + 1, j) - 8.0 * at(k - 1, j) + at(k - 2, j)) / (12.0 * h);
            else if (k < 2) {
                const int o = k;  // one-sided, 4th order, at offset 0 or 1
                const double f0 = at(0, j), f1 = at(1, j), f2 = at(2, j), f3 = at(3, j), f4 = at(4, j);
                ds = o == 0 ? (-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12.0 * h)
                            : (-3 * f0 - 10 * f1 + 18 * f2 - 6 * f3 + f4) / (12.0 * h);
            } else {
                const int o = N - 1 - k;
                const double f0 = at(N - 1, j), f1 = at(N - 2, j), f2 = at(N - 3, j), f3 = at(N - 4, j),
                             f4 = at(N - 5, j);
                ds = o == 0 ? -(-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12.0 * h)
                            : -(-3 * f0 - 10 * f1 + 18 * f2 - 6 * f3 + f4) / (12.0 * h);
            }
            double dmu = 0.0;
            for (int l = 0; l < M; ++l) dmu += D[static_cast<std::size_t>(j) * M + l] * at(k, l);
            const double st = ang.sin_theta[j], ct = ang.mu[j];
            const double gr = ds / r;
            const double gt = -st * dmu / r;
            const std::size_t i = static_cast<std::size_t>(k) * M + j;
            t.u[i] = at(k, j);
            t.g_rho[i] = gr * st + gt * ct;
            t.g_z[i] = gr * ct - gt * st;
        }
    }
    return f;
}

FieldTable AxisymField::tabulate(const NodeSet& nodes) const {
    if (kind_ == Kind::Gridded) {
        if (nodes.N != spec_.N || nodes.M != spec_.M || nodes.size() != nodes.structured() ||
            std::abs(nodes.s.front() - spec_.s_min) > 1e-12 || std::abs(nodes.s.back() - spec_.s_max) > 1e-9 ||
            std::abs(nodes.z_center - spec_.z_center) > 0.0)
            throw Error(ErrorCode::InvalidArgument, "gridded field tabulated on a different grid");
        return table_;
    }
    FieldTable t;
    t.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const MeridianSample s = fn_(nodes.rho[i], nodes.z[i]);
        t.u[i] = s.u;
        t.g_rho[i] = s.g_rho;
        t.g_z[i] = s.g_z;
    }
    return t;
}

MeridianSample AxisymField::at(double rho, double z) const {
    if (kind_ != Kind::Analytic) throw Error(ErrorCode::InvalidArgument, "pointwise evaluation of a gridded field");
    return fn_(rho, z);
}

namespace {
constexpr char kMagic[4] = {'S', 'B', 'L', 'F'};
constexpr std::uint32_t kFormat = 1;
}  // namespace

void AxisymField::save(const std::string& path) const {
    if (kind_ != Kind::Gridded) throw Error(ErrorCode::InvalidArgument, "only gridded fields are serializable");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
    const std::int32_t dim = n_;
    const std::uint32_t N = spec_.N, M = spec_.M;
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kFormat), sizeof kFormat);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&N), sizeof N);
    out.write(reinterpret_cast<const char*>(&M), sizeof M);
    out.write(reinterpret_cast<const char*>(&spec_.s_min), sizeof(double));
    out.write(reinterpret_cast<const char*>(&spec_.s_max), sizeof(double));
    out.write(reinterpret_cast<const char*>(&spec_.z_center), sizeof(double));
    out.write(reinterpret_cast<const char*>(table_.u.data()), static_cast<std::streamsize>(table_.u.size() * sizeof(double)));
    const std::uint32_t len = static_cast<std::uint32_t>(description_.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(description_.data(), len);
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

AxisymField AxisymField::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    char magic[4];
    std::uint32_t fmt = 0, N = 0, M = 0, len = 0;
    std::int32_t dim = 0;
    GridSpec spec;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&fmt), sizeof fmt);
    if (!in || std::memcmp(magic, kMagic, 4) != 0 || fmt != kFormat)
        throw Error(ErrorCode::IoError, path + " is not a field container");
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&N), sizeof N);
    in.read(reinterpret_cast<char*>(&M), sizeof M);
    in.read(reinterpret_cast<char*>(&spec.s_min), sizeof(double));
    in.read(reinterpret_cast<char*>(&spec.s_max), sizeof(double));
    in.read(reinterpret_cast<char*>(&spec.z_center), sizeof(double));
    if (!in || dim < 2 || N < 8 || M < 1 || N > (1u << 20) || M > 4096)
        throw Error(ErrorCode::IoError, path + ": bad header");
    spec.N = static_cast<int>(N);
    spec.M = static_cast<int>(M);
    std::vector<double> values(static_cast<std::size_t>(N) * M);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    std::string desc;
    if (in.read(reinterpret_cast<char*>(&len), sizeof len) && len < (1u << 16)) {
        desc.resize(len);
        in.read(desc.data(), len);
    }
    if (!in) throw Error(ErrorCode::IoError, path + ": truncated");
    const AxisymGrid grid(spec, dim);
    return gridded(grid, std::move(values), desc);
}

}  // namespace sobolev
