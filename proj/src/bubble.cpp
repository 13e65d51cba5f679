#include "sobolev/bubble.hpp"

#include <cmath>
#include <limits>

namespace sobolev {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

void validate(const Bubble& bub) {
    if (!std::isfinite(bub.a) || bub.a == 0.0) throw Error(ErrorCode::InvalidBubble, "amplitude must be nonzero");
    if (!std::isfinite(bub.b) || !(bub.b > 0.0)) throw Error(ErrorCode::InvalidBubble, "concentration must be > 0");
    if (!std::isfinite(bub.x0)) throw Error(ErrorCode::InvalidBubble, "center must be finite");
}

BubbleProfile bubble_profile(const Bubble& bub, const Dim& dim, double d) {
    const double q = dim.q(), m = dim.m();
    BubbleProfile out;
    if (d <= 0.0) {
        out.v = bub.a;
        // v'' at the center: finite only for q >= 2
        if (q == 2.0)
            out.d2v = -m * q * bub.a * bub.b;
        else if (q < 2.0)
            out.d2v = -std::numeric_limits<double>::infinity() * bub.a;
        return out;
    }
    const double lt = std::log(bub.b) + q * std::log(d);
    const double L = softplus(lt);
    const double v = bub.a * std::exp(-m * L);
    const double s = std::exp(lt - L);  // t / (1 + t)
    out.v = v;
    out.dv = -m * q * v * s / d;
    out.d2v = -m * q * v * (s / (d * d)) * ((q - 1.0) - q * s * (1.0 + m));
    out.db = -m * v * s / bub.b;
    out.d_db = -(m * q / bub.b) * v * (s / d) * (1.0 - (1.0 + m) * s);
    return out;
}

double log_abs_dv(const Bubble& bub, const Dim& dim, double d) {
    if (d <= 0.0) return -std::numeric_limits<double>::infinity();
    const double q = dim.q(), m = dim.m();
    const double lt = std::log(bub.b) + q * std::log(d);
    const double L = softplus(lt);
    // |v'| = m q |a| e^{-mL} e^{lt-L} / d
    return std::log(m * q * std::abs(bub.a)) - m * L + (lt - L) - std::log(d);
}

double bubble_value_at(const Bubble& bub, const Dim& dim, double d) { return bubble_profile(bub, dim, d).v; }

namespace {

// distance to the center and the unit direction (x - x0)/d
double offset(const Bubble& bub, std::span<const double> x, std::vector<double>& dir) {
    const std::size_t n = x.size();
    dir.assign(x.begin(), x.end());
    dir[n - 1] -= bub.x0;
    double d2 = 0.0;
    for (double c : dir) d2 += c * c;
    const double d = std::sqrt(d2);
    for (double& c : dir) c = d > 0 ? c / d : 0.0;
    return d;
}

void check_point(const Dim& dim, std::span<const double> x) {
    if (static_cast<int>(x.size()) != dim.n())
        throw Error(ErrorCode::InvalidArgument, "point has the wrong number of coordinates");
}

}  // namespace

double eval_bubble(const Bubble& bub, const Dim& dim, std::span<const double> x) {
    check_point(dim, x);
    std::vector<double> dir;
    const double d = offset(bub, x, dir);
    return bubble_profile(bub, dim, d).v;
}

std::vector<double> eval_bubble_gradient(const Bubble& bub, const Dim& dim, std::span<const double> x) {
    check_point(dim, x);
    std::vector<double> dir;
    const double d = offset(bub, x, dir);
    const double dv = bubble_profile(bub, dim, d).dv;
    for (double& c : dir) c *= dv;
    return dir;
}

std::vector<double> tangent_basis_eval(const Bubble& bub, const Dim& dim, std::span<const double> x) {
    check_point(dim, x);
    std::vector<double> dir;
    const double d = offset(bub, x, dir);
    const BubbleProfile pr = bubble_profile(bub, dim, d);
    std::vector<double> out;
    out.reserve(x.size() + 2);
    out.push_back(pr.v);
    out.push_back(pr.db);
    // d/dx0_i v(x - x0) = -d_i v
    for (double c : dir) out.push_back(-pr.dv * c);
    return out;
}

MeridianSample bubble_sample(const Bubble& bub, const Dim& dim, double rho, double z) {
    const double dz = z - bub.x0;
    const double d = std::hypot(rho, dz);
    const BubbleProfile pr = bubble_profile(bub, dim, d);
    if (d <= 0.0) return {pr.v, 0.0, 0.0};
    return {pr.v, pr.dv * rho / d, pr.dv * dz / d};
}

ZonalTangent zonal_tangent(const Bubble& bub, const Dim& dim, double rho, double z) {
    const double dz = z - bub.x0;
    const double d = std::hypot(rho, dz);
    const BubbleProfile pr = bubble_profile(bub, dim, d);
    ZonalTangent t;
    if (d <= 0.0) {
        t.v = {pr.v, 0.0, 0.0};
        t.db = {pr.db, 0.0, 0.0};
        // gradient of -d_z v at the center is -v''(0) e_z
        t.dz = {0.0, 0.0, -pr.d2v};
        return t;
    }
    const double er = rho / d, ez = dz / d;
    t.v = {pr.v, pr.dv * er, pr.dv * ez};
    t.db = {pr.db, pr.d_db * er, pr.d_db * ez};
    // xi = -v'(d) ez; grad xi = -[v'' ez dhat + (v'/d)(e_z - ez dhat)]
    const double vd = pr.dv / d;
    t.dz.u = -pr.dv * ez;
    t.dz.g_rho = -(pr.d2v * ez * er - vd * ez * er);
    t.dz.g_z = -(pr.d2v * ez * ez + vd * (1.0 - ez * ez));
    return t;
}

AxisymField bubble_field(const Bubble& bub, const Dim& dim) {
    validate(bub);
    return AxisymField::analytic(
        dim.n(), [bub, dim](double rho, double z) { return bubble_sample(bub, dim, rho, z); }, "bubble");
}

BubbleNorms bubble_norms(const Bubble& bub, const Dim& dim, const GridSpec& spec, double tail_tol) {
    validate(bub);
    const RadialGrid grid(spec.N, spec.s_min, spec.s_max, dim.n());
    const double p = dim.p(), ps = dim.pstar();
    BubbleNorms out;
    out.grad = integrate_radial(grid, [&](double r) { return std::exp(p * log_abs_dv(bub, dim, r)); });
    out.func = integrate_radial(grid, [&](double r) { return std::pow(std::abs(bubble_profile(bub, dim, r).v), ps); });
    check_tails(out.grad, "bubble gradient norm", tail_tol);
    check_tails(out.func, "bubble L^p* norm", tail_tol);
    out.grad_norm = std::pow(out.grad.value, 1.0 / p);
    out.func_norm = std::pow(out.func.value, 1.0 / ps);
    return out;
}

double sobolev_ratio(const Bubble& bub, const Dim& dim, const GridSpec& spec) {
    const BubbleNorms nb = bubble_norms(bub, dim, spec);
    return nb.grad_norm / nb.func_norm;
}

double sobolev_constant(const Dim& dim, const GridSpec& spec) { return sobolev_ratio(Bubble{}, dim, spec); }

Bubble normalize_bubble(const Bubble& bub, const Dim& dim, const GridSpec& spec) {
    const BubbleNorms nb = bubble_norms(bub, dim, spec);
    if (!(nb.func_norm > 0.0) || !std::isfinite(nb.func_norm))
        throw Error(ErrorCode::NormalizationFailed, "bubble norm is not positive");
    Bubble out = bub;
    out.a = bub.a / nb.func_norm;
    return out;
}

}  // namespace sobolev
