#include "sobolev/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sobolev/bubble.hpp"
#include "sobolev/corpus.hpp"
#include "sobolev/deficit.hpp"
#include "sobolev/experiments.hpp"
#include "sobolev/projection.hpp"
#include "sobolev/random.hpp"
#include "sobolev/spectrum.hpp"
#include "sobolev/vector_kernels.hpp"

namespace sobolev::cli {

using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* why) {
    throw Error(ErrorCode::InvalidConfig, key + "=" + value + ": " + why);
}

double to_double(const std::string& key, const std::string& s) {
    double x = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) bad(key, s, "not a finite number");
    return x;
}

long long to_int(const std::string& key, const std::string& s) {
    long long x = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc() || ptr != end) bad(key, s, "not an integer");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) bad(key, s, "empty list");
    return out;
}


Json config_json(const RunConfig& c) {
    Json j;
    j["n"] = c.n;
    j["p"] = c.p;
    j["grid-N"] = c.grid_N;
    j["grid-M"] = c.grid_M;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["field"] = c.field;
    j["a"] = c.a;
    j["b"] = c.b;
    j["x0"] = c.x0;
    j["eps"] = c.eps;
    j["i"] = c.i;
    j["kappa"] = c.kappa;
    j["eps0"] = c.eps0;
    j["samples"] = c.samples;
    j["sectors"] = c.sectors;
    j["k"] = c.k;
    j["family"] = c.family;
    j["eps-list"] = c.eps_list;
    j["i-list"] = c.i_list;
    j["x-far"] = c.x_far;
    j["count"] = c.count;
    j["restarts"] = c.restarts;
    return j;
}

Json grid_json(const GridSpec& g, int N_ref) {
    Json j;
    j["N_ref"] = N_ref;
    j["N"] = g.N;
    j["M"] = g.M;
    j["s_min"] = g.s_min;
    j["s_max"] = g.s_max;
    j["h"] = g.h();
    j["z_center"] = g.z_center;
    return j;
}

Json bubble_json(const Bubble& b) { return Json{{"a", b.a}, {"b", b.b}, {"x0", b.x0}}; }

Json projection_json(const ProjectionResult& r) {
    Json j;
    j["bubble"] = bubble_json(r.bubble);
    j["objective"] = r.objective;
    j["distance"] = r.distance;
    j["orthogonality_defect"] = r.orthogonality_defect;
    j["max_zonal_defect"] = r.max_zonal_defect();
    j["iterations"] = r.iterations;
    j["evaluations"] = r.evaluations;
    j["converged"] = r.converged;
    return j;
}

Json search_json(const ConstantSearch& s) {
    return Json{{"estimate", s.estimate}, {"extreme", s.extreme}, {"argument", s.argument}, {"samples", s.samples}};
}

Json verification_json(const Verification& v) {
    Json j{{"samples", v.samples},         {"violations", v.violations},    {"flagged", v.flagged},
           {"worst_gap", v.worst_gap},     {"worst_input", v.worst_input}};
    if (v.case_small_r + v.case_large_r > 0) {
        j["case_small_r"] = v.case_small_r;
        j["case_large_r"] = v.case_large_r;
    }
    return j;
}

Json fit_json(const LogLogFit& f) {
    return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}

struct Context {
    RunConfig cfg;
    std::string command;
    std::ostream& out;
};

Json report_head(const Context& ctx) {
    Json j;
    j["version"] = kVersion;
    j["command"] = ctx.command;
    j["config"] = config_json(ctx.cfg);
    return j;
}

std::string write_report(const Context& ctx, const std::string& name, const Json& j) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.cfg.out, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + ctx.cfg.out + ": " + ec.message());
    const std::string path = (std::filesystem::path(ctx.cfg.out) / (name + ".json")).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    f << j.dump(2) << "\n";
    if (!f) throw Error(ErrorCode::IoError, "write failed: " + path);
    return path;
}

std::string csv_path(const Context& ctx, const std::string& name) {
    return (std::filesystem::path(ctx.cfg.out) / (name + ".csv")).string();
}

GridSpec grid_for(const RunConfig& c, const Dim& dim, double z_center = 0.0) {
    if (c.grid_N < 16 || c.grid_M < 2) throw Error(ErrorCode::InvalidConfig, "grid-N >= 16 and grid-M >= 2 required");
    GridSpec g = GridSpec::for_dim(dim, c.grid_N, c.grid_M);
    g.z_center = z_center;
    return g;
}

ProjectionOptions projection_options(const RunConfig& c) {
    if (c.restarts < 1) throw Error(ErrorCode::InvalidConfig, "restarts must be >= 1");
    ProjectionOptions o;
    o.restarts = c.restarts;
    return o;
}

// ---------------------------------------------------------------- subcommands

int cmd_deficit(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Dim dim(c.n, c.p);
    const Bubble v{c.a, c.b, c.x0};
    validate(v);
    const GridSpec spec = grid_for(c, dim, c.x0);
    const AxisymGrid grid(spec, dim.n());
    const double S = grid_sobolev_constant(grid.nodes(), dim);
    AxisymField u = bubble_field(v, dim);
    if (c.field == "perturbed") {
        TestFunction tf = make_corpus(dim, 1, c.seed)[0];
        tf.center_z = c.x0;
        u = PerturbedBubble(v, test_field(tf, dim.n()), c.eps, dim, grid.nodes()).field();
    } else if (c.field == "anisotropic") {
        u = anisotropic_member(dim, c.i);
    } else if (c.field != "bubble") {
        throw Error(ErrorCode::InvalidConfig, "field must be bubble, perturbed or anisotropic");
    }
    const DeficitReport r = deficit(u, dim, grid, S);
    Json j = report_head(ctx);
    j["grid"] = grid_json(spec, c.grid_N);
    Json res;
    res["field"] = u.description();
    res["deficit"] = r.deficit;
    res["grad_norm"] = r.grad_norm;
    res["func_norm"] = r.func_norm;
    res["S_grid"] = S;
    res["S_radial"] = sobolev_constant(dim, spec);
    res["grad_tail"] = r.grad.tail();
    res["func_tail"] = r.func.tail();
    j["results"] = res;
    const std::string path = write_report(ctx, "deficit", j);
    ctx.out << "deficit " << u.description() << " delta=" << format_double(r.deficit) << " -> " << path << "\n";
    return 0;
}

int cmd_project(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Dim dim(c.n, c.p);
    const Bubble v{c.a, c.b, c.x0};
    validate(v);
    const GridSpec spec = grid_for(c, dim, c.x0);
    const AxisymGrid grid(spec, dim.n());
    TestFunction tf = make_corpus(dim, 1, c.seed)[0];
    tf.center_z = c.x0;
    const PerturbedBubble pb(v, test_field(tf, dim.n()), c.eps, dim, grid.nodes());
    const FieldTable u = pb.u_table(grid.nodes());
    const ProjectionOptions opt = projection_options(c);
    const ProjectionResult fu = project_Fu(grid.nodes(), u, dim, v, opt);
    const ProjectionResult gd = project_gradient_distance(grid.nodes(), u, dim, v, opt);
    Json j = report_head(ctx);
    j["grid"] = grid_json(spec, c.grid_N);
    Json res;
    res["field"] = pb.field().description();
    res["base"] = bubble_json(v);
    res["projection_Fu"] = projection_json(fu);
    res["projection_gradient_distance"] = projection_json(gd);
    j["results"] = res;
    const std::string path = write_report(ctx, "project", j);
    ctx.out << "project a=" << format_double(fu.bubble.a) << " b=" << format_double(fu.bubble.b)
            << " x0=" << format_double(fu.bubble.x0) << " distance=" << format_double(gd.distance) << " -> " << path
            << "\n";
    return 0;
}

int cmd_spectrum(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Dim dim(c.n, c.p);
    if (c.sectors < 1 || c.sectors > 16) throw Error(ErrorCode::InvalidConfig, "sectors must lie in [1, 16]");
    if (c.k < 1 || c.k > 16) throw Error(ErrorCode::InvalidConfig, "k must lie in [1, 16]");
    const GridSpec spec = grid_for(c, dim);
    const SpectralGap gap = spectral_gap(dim, spec);
    std::vector<SectorEigenResult> sectors(static_cast<std::size_t>(c.sectors));
    parallel_for(sectors.size(), [&](std::size_t l) {
        sectors[l] = solve_sector(assemble_sector(static_cast<int>(l), dim, spec), c.k);
    });
    Json j = report_head(ctx);
    j["grid"] = grid_json(spec, c.grid_N);
    Json res;
    res["lambda"] = gap.lambda;
    res["mu_perp"] = gap.mu_perp;
    res["c"] = gap.c;
    res["S"] = gap.S;
    const GapCase gc = gap_case(dim);
    res["gap_case"] = gc == GapCase::I ? "I" : gc == GapCase::II ? "II" : "III";
    const double c0 = (dim.p() - 1.0) * gap.c, c1 = (dim.pstar() - 1.0) * gap.c;
    const auto& s0 = gap.sectors[0].eigenvalues;
    const auto& s1 = gap.sectors[1].eigenvalues;
    res["known"] = Json{{"mu0_ell0", Json{{"value", s0[0]}, {"expected", c0}, {"rel_error", std::abs(s0[0] / c0 - 1)}}},
                        {"mu1_ell0", Json{{"value", s0[1]}, {"expected", c1}, {"rel_error", std::abs(s0[1] / c1 - 1)}}},
                        {"mu0_ell1", Json{{"value", s1[0]}, {"expected", c1}, {"rel_error", std::abs(s1[0] / c1 - 1)}}}};
    Json sj = Json::array();
    for (const SectorEigenResult& s : sectors)
        sj.push_back(Json{{"ell", s.ell}, {"eigenvalues", s.eigenvalues}, {"residuals", s.residuals}});
    res["sectors"] = sj;
    j["results"] = res;
    const std::string path = write_report(ctx, "spectrum", j);
    ctx.out << "spectrum lambda=" << format_double(gap.lambda) << " -> " << path << "\n";
    return 0;
}

int cmd_inequality_scan(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Dim dim(c.n, c.p);
    if (c.samples < 1) throw Error(ErrorCode::InvalidConfig, "samples must be >= 1");
    const ConstantSearch s0 = search_c0(dim.p(), c.kappa, 20000, c.seed);
    const Verification v0 = verify_c0(dim.p(), c.kappa, s0.estimate, c.samples, mix_seed(c.seed, 1));
    const ConstantSearch s1 = search_C1(dim, c.kappa);
    const Verification v1 = verify_C1(dim, c.kappa, s1.estimate, c.samples, mix_seed(c.seed, 2));
    Json j = report_head(ctx);
    Json res;
    res["vector_inequality"] = Json{{"search", search_json(s0)}, {"verification", verification_json(v0)}};
    res["scalar_inequality"] = Json{{"search", search_json(s1)}, {"verification", verification_json(v1)}};
    std::size_t violations = v0.violations + v1.violations;
    if (dim.low_exponent()) {
        const ConstantSearch sb = search_appendixB_C(dim, c.eps0, 100000, mix_seed(c.seed, 3));
        const Verification vb = verify_appendixB(dim, c.eps0, sb.estimate, c.samples, mix_seed(c.seed, 4));
        res["small_perturbation_inequality"] = Json{{"zeta", appendixB_zeta(c.eps0, dim)},
                                                    {"search", search_json(sb)},
                                                    {"verification", verification_json(vb)}};
        violations += vb.violations;
    }
    res["violations"] = violations;
    j["results"] = res;
    const std::string path = write_report(ctx, "inequality-scan", j);
    ctx.out << "inequality-scan c0=" << format_double(s0.estimate) << " C1=" << format_double(s1.estimate)
            << " violations=" << violations << " -> " << path << "\n";
    return 0;
}

int cmd_sharpness(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Dim dim(c.n, c.p);
    const GridSpec spec = grid_for(c, dim);
    const ProjectionOptions opt = projection_options(c);
    const double alpha = std::max(2.0, dim.p());
    Json j = report_head(ctx);
    j["grid"] = grid_json(spec, c.grid_N);
    Json res;
    res["family"] = c.family;
    res["alpha"] = alpha;
    SlopeFit fit;
    std::vector<double> ratio;
    if (c.family == "anisotropic") {
        fit = anisotropic_family(dim, c.i_list, spec, opt);
        for (std::size_t k = 0; k < fit.param.size(); ++k)
            ratio.push_back(fit.deficit[k] / std::pow(fit.distance[k], alpha));
    } else if (c.family == "bump") {
        const BumpFamily b = bump_family(dim, c.eps_list, c.x_far, spec, opt);
        fit = b.fit;
        ratio = b.ratio;
        res["x_far"] = b.x_far;
        res["v_far"] = b.v_far;
        res["bump_grad_norm"] = b.bump_grad_norm;
        res["bump_pstar_norm"] = b.bump_pstar_norm;
        res["proxy_distance"] = b.proxy_distance;
        res["split_grad"] = b.split_grad;
        res["split_func"] = b.split_func;
        res["ratio_reduced_exponent"] = b.ratio_reduced;
    } else {
        throw Error(ErrorCode::InvalidConfig, "family must be anisotropic or bump");
    }
    res["param"] = fit.param;
    res["deficit"] = fit.deficit;
    res["distance"] = fit.distance;
    res["ratio"] = ratio;
    res["deficit_fit"] = fit_json(fit.deficit_fit);
    res["distance_fit"] = fit_json(fit.distance_fit);
    j["results"] = res;
    const std::string name = "sharpness-" + c.family;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < fit.param.size(); ++k)
        rows.push_back({fit.param[k], fit.deficit[k], fit.distance[k], ratio[k]});
    const std::string path = write_report(ctx, name, j);
    write_csv(csv_path(ctx, name), {"param", "deficit", "distance", "ratio"}, rows);
    ctx.out << "sharpness " << c.family << " slope=" << format_double(fit.deficit_fit.slope)
            << " residual=" << format_double(fit.deficit_fit.residual) << " -> " << path << "\n";
    return 0;
}

int cmd_ratio_scan(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Dim dim(c.n, c.p);
    const GridSpec spec = grid_for(c, dim);
    RatioScanOptions opt;
    opt.count = c.count;
    opt.seed = c.seed;
    opt.projection = projection_options(c);
    const RatioScan scan = stability_ratio_scan(dim, spec, opt);
    Json j = report_head(ctx);
    j["grid"] = grid_json(spec, c.grid_N);
    Json res;
    res["alpha"] = scan.alpha;
    res["min_ratio"] = scan.min_ratio;
    res["median_ratio"] = scan.median_ratio;
    res["max_ratio"] = scan.max_ratio;
    res["evaluated"] = scan.samples.size();
    res["excluded"] = scan.excluded;
    Json sj = Json::array();
    std::vector<std::vector<double>> rows;
    for (const RatioSample& s : scan.samples) {
        sj.push_back(Json{{"phi", s.phi}, {"eps", s.eps}, {"deficit", s.deficit}, {"distance", s.distance},
                          {"ratio", s.ratio}});
        rows.push_back({s.eps, s.deficit, s.distance, s.ratio});
    }
    res["samples"] = sj;
    j["results"] = res;
    const std::string path = write_report(ctx, "ratio-scan", j);
    write_csv(csv_path(ctx, "ratio-scan"), {"param", "deficit", "distance", "ratio"}, rows);
    ctx.out << "ratio-scan min=" << format_double(scan.min_ratio) << " excluded=" << scan.excluded << " -> " << path
            << "\n";
    return 0;
}

int cmd_selftest(const Context& ctx) {
    struct Check {
        std::string name;
        double value, tolerance;
    };
    std::vector<Check> checks;
    // Gaussian moments: int exp(-(rho^2 + 2 z^2)) dx = pi^{n/2} / sqrt(2)
    for (int n : {3, 4, 5}) {
        GridSpec g;
        g.N = 1024;
        g.M = 16;
        g.s_min = -14.0;
        g.s_max = 4.0;
        const AxisymGrid grid(g, n);
        const NodeSet& ns = grid.nodes();
        const double I = integrate_value(ns, [&](std::size_t i) {
            return std::exp(-(ns.rho[i] * ns.rho[i] + 2.0 * ns.z[i] * ns.z[i]));
        });
        const double exact = std::pow(std::numbers::pi, 0.5 * n) / std::sqrt(2.0);
        checks.push_back({"gaussian_moment_n" + std::to_string(n), std::abs(I / exact - 1.0), 1e-10});
        // second angular moment: E[mu^2] = 1/n on the sphere
        const AngularGrid& ang = grid.angular();
        double m2 = 0.0;
        for (int j = 0; j < ang.size(); ++j) m2 += ang.w[j] * ang.mu[j] * ang.mu[j];
        checks.push_back({"angular_moment_n" + std::to_string(n), std::abs(m2 / ang.mass - 1.0 / n), 1e-13});
    }
    // known eigenpairs of the linearized operator
    for (auto [n, p] : {std::pair{3, 2.0}, {4, 2.5}}) {
        const Dim dim(n, p);
        const GridSpec spec = GridSpec::for_dim(dim, 2048);
        const double c = std::pow(sobolev_constant(dim, spec), p);
        const SectorEigenResult e0 = solve_sector(assemble_sector(0, dim, spec), 2);
        const SectorEigenResult e1 = solve_sector(assemble_sector(1, dim, spec), 1);
        const std::string tag = "_n" + std::to_string(n) + "_p" + format_double(p).substr(0, 3);
        checks.push_back({"eigen_p_minus_1" + tag, std::abs(e0.eigenvalues[0] / ((p - 1.0) * c) - 1.0), 1e-3});
        checks.push_back({"eigen_pstar_minus_1" + tag, std::abs(e0.eigenvalues[1] / ((dim.pstar() - 1.0) * c) - 1.0), 1e-3});
        checks.push_back({"eigen_translation" + tag, std::abs(e1.eigenvalues[0] / ((dim.pstar() - 1.0) * c) - 1.0), 1e-3});
    }
    // extremality of the bubble on the nodes
    {
        const Dim dim(3, 2.0);
        const AxisymGrid grid(GridSpec::for_dim(dim, 512, 8), 3);
        const double S = grid_sobolev_constant(grid.nodes(), dim);
        checks.push_back({"bubble_deficit", std::abs(deficit(bubble_field(Bubble{}, dim), dim, grid, S).deficit), 1e-10});
    }
    Json j = report_head(ctx);
    Json cj = Json::array();
    std::size_t failed = 0;
    for (const Check& ch : checks) {
        const bool ok = ch.value <= ch.tolerance;
        if (!ok) ++failed;
        cj.push_back(Json{{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"pass", ok}});
    }
    j["results"] = Json{{"checks", cj}, {"failed", failed}};
    const std::string path = write_report(ctx, "selftest", j);
    ctx.out << "selftest " << checks.size() - failed << "/" << checks.size() << " passed -> " << path << "\n";
    return failed == 0 ? 0 : 2;
}

struct Subcommand {
    const char* name;
    const char* help;
    std::vector<std::string> keys;  // beyond the common ones
    bool needs_dim;
    std::function<int(const Context&)> fn;
};

const std::vector<Subcommand>& subcommands() {
    static const std::vector<Subcommand> list = {
        {"deficit", "Sobolev deficit of a bubble, perturbed bubble or anisotropic member",
         {"field", "a", "b", "x0", "eps", "i"}, true, cmd_deficit},
        {"project", "nearest bubble by F_u and by gradient distance", {"a", "b", "x0", "eps", "restarts"}, true,
         cmd_project},
        {"spectrum", "sector eigenvalues and spectral gap of the linearized operator", {"sectors", "k"}, true,
         cmd_spectrum},
        {"inequality-scan", "constant searches and verification of the pointwise inequalities",
         {"kappa", "eps0", "samples"}, true, cmd_inequality_scan},
        {"sharpness", "anisotropic or bump family rates", {"family", "eps-list", "i-list", "x-far", "restarts"}, true,
         cmd_sharpness},
        {"ratio-scan", "deficit over distance^alpha on the corpus", {"count", "restarts"}, true, cmd_ratio_scan},
        {"selftest", "quadrature moments and known eigenpairs", {}, false, cmd_selftest},
    };
    return list;
}

const std::vector<std::string> kCommon = {"n", "p", "grid-N", "grid-M", "seed", "out"};

const std::map<std::string, std::string>& key_help() {
    static const std::map<std::string, std::string> h = {
        {"n", "dimension (>= 2)"},
        {"p", "exponent, 1 < p < n"},
        {"grid-N", "radial nodes across s = log r in [-14, 14] (window extended at the same spacing)"},
        {"grid-M", "angular nodes"},
        {"seed", "seed for corpus and sampling"},
        {"out", "output directory"},
        {"field", "bubble | perturbed | anisotropic"},
        {"a", "bubble amplitude"},
        {"b", "bubble concentration"},
        {"x0", "bubble center on the axis"},
        {"eps", "perturbation size"},
        {"i", "anisotropic index"},
        {"kappa", "kappa in (0, 1)"},
        {"eps0", "eps0 of the small-perturbation inequality"},
        {"samples", "verification samples"},
        {"sectors", "number of angular sectors (ell = 0 .. sectors-1)"},
        {"k", "eigenvalues per sector"},
        {"family", "anisotropic | bump"},
        {"eps-list", "comma-separated eps values"},
        {"i-list", "comma-separated indices"},
        {"x-far", "bump distance (0 = smallest power of ten meeting the separation condition)"},
        {"count", "corpus samples"},
        {"restarts", "projection restarts"},
    };
    return h;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"n",     "p",     "grid-N",  "grid-M",  "seed",     "out",
                                                  "field", "a",     "b",       "x0",      "eps",      "i",
                                                  "kappa", "eps0",  "samples", "sectors", "k",        "family",
                                                  "eps-list", "i-list", "x-far", "count", "restarts"};
    return keys;
}

void set_key(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    auto positive_int = [&](long long lo) {
        const long long x = to_int(key, v);
        if (x < lo) bad(key, v, "out of range");
        return x;
    };
    if (key == "n") c.n = static_cast<int>(positive_int(2));
    else if (key == "p") c.p = to_double(key, v);
    else if (key == "grid-N") c.grid_N = static_cast<int>(positive_int(16));
    else if (key == "grid-M") c.grid_M = static_cast<int>(positive_int(2));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(positive_int(0));
    else if (key == "out") {
        if (v.empty()) bad(key, v, "empty path");
        c.out = v;
    } else if (key == "field") c.field = v;
    else if (key == "a") c.a = to_double(key, v);
    else if (key == "b") c.b = to_double(key, v);
    else if (key == "x0") c.x0 = to_double(key, v);
    else if (key == "eps") c.eps = to_double(key, v);
    else if (key == "i") c.i = to_double(key, v);
    else if (key == "kappa") c.kappa = to_double(key, v);
    else if (key == "eps0") c.eps0 = to_double(key, v);
    else if (key == "samples") c.samples = static_cast<std::size_t>(positive_int(1));
    else if (key == "sectors") c.sectors = static_cast<int>(positive_int(1));
    else if (key == "k") c.k = static_cast<int>(positive_int(1));
    else if (key == "family") c.family = v;
    else if (key == "eps-list") c.eps_list = to_list(key, v);
    else if (key == "i-list") c.i_list = to_list(key, v);
    else if (key == "x-far") c.x_far = to_double(key, v);
    else if (key == "count") c.count = static_cast<std::size_t>(positive_int(1));
    else if (key == "restarts") c.restarts = static_cast<int>(positive_int(1));
    else throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw Error(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    for (std::size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
    f << "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << format_double(row[k]);
        f << "\n";
    }
    if (!f) throw Error(ErrorCode::IoError, "write failed: " + path);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for the quantitative Sobolev inequality", "sobolev-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::map<std::string, std::map<std::string, std::string>> flags;
    std::map<std::string, std::string> config_path;
    for (const Subcommand& sc : subcommands()) {
        CLI::App* sub = app.add_subcommand(sc.name, sc.help);
        auto& f = flags[sc.name];
        std::vector<std::string> keys = kCommon;
        keys.insert(keys.end(), sc.keys.begin(), sc.keys.end());
        for (const std::string& key : keys) sub->add_option("--" + key, f[key], key_help().at(key));
        sub->add_option("--config", config_path[sc.name], "key=value file; flags take precedence");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }
    for (const Subcommand& sc : subcommands()) {
        CLI::App* sub = app.get_subcommand(sc.name);
        if (!sub->parsed()) continue;
        Context ctx{RunConfig{}, sc.name, out};
        try {
            if (!config_path[sc.name].empty())
                for (const auto& [key, value] : read_config_file(config_path[sc.name])) set_key(ctx.cfg, key, value);
            for (const auto& [key, value] : flags[sc.name])
                if (sub->get_option("--" + key)->count() > 0) set_key(ctx.cfg, key, value);
            if (sc.needs_dim && !ctx.cfg.has_dim()) {
                err << "error: --n and --p are required\n" << sub->help();
                return 1;
            }
            return sc.fn(ctx);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            if (is_validation_error(e.code())) {
                err << sub->help();
                return 1;
            }
            return 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 1;
}

}  // namespace sobolev::cli
