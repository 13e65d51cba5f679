#include "sobolev/corpus.hpp"

#include <cmath>
#include <sstream>

#include "sobolev/random.hpp"

namespace sobolev {

double bump_profile(double t) {
    const double d = 1.0 - t * t;
    return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
}

double bump_profile_derivative(double t) {
    const double d = 1.0 - t * t;
    return d > 0.0 ? std::exp(-1.0 / d) * (-2.0 * t / (d * d)) : 0.0;
}

void zonal_harmonic(int n, int ell, double mu, double& value, double& derivative) {
    if (ell == 0) {
        value = 1.0;
        derivative = 0.0;
        return;
    }
    const double lam = 0.5 * (n - 2);
    // C_k and its derivative by the three-term recurrence, plus the value at mu = 1 for normalization
    double c0 = 1.0, d0 = 0.0, one0 = 1.0;
    double c1, d1, one1;
    if (lam == 0.0) {
        c1 = mu;
        d1 = 1.0;
        one1 = 1.0;
    } else {
        c1 = 2.0 * lam * mu;
        d1 = 2.0 * lam;
        one1 = 2.0 * lam;
    }
    for (int k = 1; k < ell; ++k) {
        double c2, d2, one2;
        if (lam == 0.0) {
            c2 = 2.0 * mu * c1 - c0;
            d2 = 2.0 * c1 + 2.0 * mu * d1 - d0;
            one2 = 1.0;
        } else {
            const double a = 2.0 * (k + lam), b = k + 2.0 * lam - 1.0;
            c2 = (a * mu * c1 - b * c0) / (k + 1);
            d2 = (a * c1 + a * mu * d1 - b * d0) / (k + 1);
            one2 = (a * one1 - b * one0) / (k + 1);
        }
        c0 = c1;
        d0 = d1;
        one0 = one1;
        c1 = c2;
        d1 = d2;
        one1 = one2;
    }
    value = c1 / one1;
    derivative = d1 / one1;
}

std::string TestFunction::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Radial::AnnulusBump: os << "annulus(r0=" << r0 << ",w=" << width; break;
        case Radial::BallBump: os << "ball(w=" << width; break;
        case Radial::Power: os << "power(q=" << q << ",k=" << k; break;
    }
    os << ",l=" << ell;
    if (center_z != 0.0) os << ",z=" << center_z;
    if (scale != 1.0) os << ",s=" << scale;
    os << ")";
    return os.str();
}

namespace {

// f(r) and f'(r) of the radial factor
void radial_factor(const TestFunction& tf, double r, double& f, double& df) {
    switch (tf.kind) {
        case TestFunction::Radial::AnnulusBump: {
            const double t = (r - tf.r0) / tf.width;
            f = bump_profile(t);
            df = bump_profile_derivative(t) / tf.width;
            return;
        }
        case TestFunction::Radial::BallBump: {
            const double t = r / tf.width;
            const double g = bump_profile(t), dg = bump_profile_derivative(t) / tf.width;
            const double rl = std::pow(r, tf.ell);
            f = rl * g;
            df = rl * dg + (tf.ell > 0 ? tf.ell * std::pow(r, tf.ell - 1) * g : 0.0);
            return;
        }
        case TestFunction::Radial::Power: {
            const double rq = std::pow(r, tf.q);
            const double g = std::pow(1.0 + rq, -tf.k);
            const double dg = r > 0.0 ? -tf.k * tf.q * g * rq / (r * (1.0 + rq)) : 0.0;
            const double rl = std::pow(r, tf.ell);
            f = rl * g;
            df = rl * dg + (tf.ell > 0 ? tf.ell * std::pow(r, tf.ell - 1) * g : 0.0);
            return;
        }
    }
}

}  // namespace

MeridianSample eval_test_function(const TestFunction& tf, int n, double rho, double z) {
    const double dz = z - tf.center_z;
    const double r = std::hypot(rho, dz);
    if (r == 0.0) {
        // only the solid-harmonic factors reach the center: the limit of r^ell Z_ell(mu) g(r)
        MeridianSample s;
        double f, df;
        radial_factor(tf, 0.0, f, df);
        if (tf.kind == TestFunction::Radial::AnnulusBump) return s;
        if (tf.ell == 0) s.u = tf.scale * f;
        if (tf.ell == 1) {
            double z1, dz1;
            zonal_harmonic(n, 1, 1.0, z1, dz1);
            // r Z_1(mu) g(r) = z * g(r) * Z_1'(mu) (Z_1 is linear)
            const double g0 = tf.kind == TestFunction::Radial::BallBump ? bump_profile(0.0) : 1.0;
            s.g_z = tf.scale * g0 * dz1;
        }
        return s;
    }
    const double mu = dz / r, er = rho / r;
    double f, df, Z, dZ;
    radial_factor(tf, r, f, df);
    zonal_harmonic(n, tf.ell, mu, Z, dZ);
    // grad = f' Z rhat + f Z'(mu) (e_z - mu rhat) / r
    const double ang = f * dZ / r;
    MeridianSample s;
    s.u = tf.scale * f * Z;
    s.g_rho = tf.scale * (df * Z * er - ang * mu * er);
    s.g_z = tf.scale * (df * Z * mu + ang * (1.0 - mu * mu));
    return s;
}

AxisymField test_field(const TestFunction& tf, int n) {
    if (tf.kind == TestFunction::Radial::AnnulusBump && !(tf.r0 >= tf.width && tf.width > 0.0))
        throw Error(ErrorCode::InvalidArgument, "annulus bump must not reach the center");
    if (tf.ell < 0) throw Error(ErrorCode::InvalidArgument, "harmonic degree must be >= 0");
    return AxisymField::analytic(
        n, [tf, n](double rho, double z) { return eval_test_function(tf, n, rho, z); }, tf.describe());
}

std::vector<TestFunction> make_corpus(const Dim& dim, std::size_t count, std::uint64_t seed,
                                      const CorpusOptions& opt) {
    std::vector<TestFunction::Radial> kinds;
    if (opt.annulus) kinds.push_back(TestFunction::Radial::AnnulusBump);
    if (opt.ball) kinds.push_back(TestFunction::Radial::BallBump);
    if (opt.power) kinds.push_back(TestFunction::Radial::Power);
    if (kinds.empty()) throw Error(ErrorCode::InvalidArgument, "empty corpus selection");
    std::vector<TestFunction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, i));
        TestFunction tf;
        tf.kind = kinds[i % kinds.size()];
        tf.ell = static_cast<int>(rng.next() % static_cast<std::uint64_t>(opt.max_ell + 1));
        switch (tf.kind) {
            case TestFunction::Radial::AnnulusBump:
                tf.r0 = rng.log_uniform(opt.r_min, opt.r_max);
                tf.width = tf.r0 * rng.uniform(0.2, 0.9);
                break;
            case TestFunction::Radial::BallBump: tf.width = rng.log_uniform(0.5, 4.0); break;
            case TestFunction::Radial::Power:
                tf.q = dim.q();
                tf.k = dim.m() + tf.ell / dim.q() + rng.uniform(0.2, 1.0);
                break;
        }
        tf.scale = rng.uniform() < 0.5 ? -1.0 : 1.0;
        out.push_back(tf);
    }
    return out;
}

AxisymField perturbed_field(const AxisymField& v, const AxisymField& phi, double eps, std::string description) {
    if (v.kind() != AxisymField::Kind::Analytic || phi.kind() != AxisymField::Kind::Analytic)
        throw Error(ErrorCode::InvalidArgument, "pointwise perturbation needs analytic fields");
    if (v.n() != phi.n()) throw Error(ErrorCode::InvalidArgument, "fields of different dimension");
    MeridianFn fv = v.fn(), fp = phi.fn();
    return AxisymField::analytic(
        v.n(),
        [fv, fp, eps](double rho, double z) {
            const MeridianSample a = fv(rho, z), b = fp(rho, z);
            return MeridianSample{a.u + eps * b.u, a.g_rho + eps * b.g_rho, a.g_z + eps * b.g_z};
        },
        std::move(description));
}

}  // namespace sobolev
