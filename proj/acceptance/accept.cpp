// Acceptance gate: each numbered criterion prints one PASS or FAIL line per
// sub-item and the process exits with the number of failed sub-items, so a
// nonzero exit marks the criterion red without hiding which part broke.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include "oracle_eigen.hpp"
#include "spiral/chaos.hpp"
#include "spiral/cycles.hpp"
#include "spiral/equilibria.hpp"
#include "spiral/homoclinic.hpp"
#include "spiral/sweep.hpp"
#include "spiral/systems.hpp"

namespace {

using namespace spiral;

int failures = 0;

void check(const std::string& label, bool ok, const std::string& detail = "") {
    std::printf("%s  %s%s%s\n", ok ? "PASS" : "FAIL", label.c_str(),
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

bool near(double value, double target, double tol) {
    return std::abs(value - target) <= tol;
}

double spectrum_mismatch(const Spectrum3& s, const std::array<std::complex<double>, 3>& ref) {
    int idx[3] = {0, 1, 2};
    double best = kInf;
    do {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(s.ev[i] - ref[idx[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(idx, idx + 3));
    return best;
}

const BoundaryPoint* find_boundary(const std::vector<BoundaryPoint>& bounds, BoundaryKind kind) {
    for (const BoundaryPoint& b : bounds)
        if (b.kind == kind) return &b;
    return nullptr;
}

// --- 1: flow Hopf point of the cubic system ---------------------------------

void criterion_act_hopf() {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto hopf = locate_hopf(make, 0.3, 0.5, {1.0, 0.0, 0.0});
    check("Hopf crossing found in [0.3, 0.5]", hopf.has_value());
    if (hopf)
        check("Hopf parameter 0.400000 within 1e-4", near(hopf->param, 0.4, 1e-4),
              "mu=" + num(hopf->param));
    else
        check("Hopf parameter 0.400000 within 1e-4", false, "no crossing");
}

// --- 2: first period doubling of the cycle ----------------------------------

void criterion_act_period_doubling() {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto pd = locate_period_doubling(make, 0.60, 0.80, {1.1, 0.0, 0.0}, 400.0, 30.0);
    check("period doubling found in [0.60, 0.80]", pd.has_value());
    check("doubling parameter 0.72 within 0.01",
          pd && near(pd->param, 0.72, 0.01), pd ? "mu=" + num(pd->param) : "");
    check("doubling tagged supercritical",
          pd && pd->criticality == Criticality::Supercritical,
          pd ? to_string(pd->criticality) : "");
}

// --- 3: homoclinic loop of the (1,2) saddle focus and its attractor ---------

void criterion_act_homoclinic_12() {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto roots = locate_homoclinic(make, {1.0, 0.0, 0.0}, 0.85, 0.88, {});
    check("splitting zero with a close pass found in [0.85, 0.88]", !roots.empty());
    if (roots.empty()) {
        check("loop parameter 0.8631 within 0.002", false, "no root");
        check("loop saddle is saddle-focus(1,2)", false, "no root");
    } else {
        const HomoclinicPoint& h = roots.front();
        check("loop parameter 0.8631 within 0.002", near(h.param, 0.8631, 0.002),
              "mu=" + num(h.param));
        check("loop saddle is saddle-focus(1,2)",
              h.saddle.cls.type == PointType::SaddleFocus12, to_string(h.saddle.cls.type));
    }

    const Vec3 saddle{1.0, 0.0, 0.0};
    const auto far = attractor_pass_distance(make(0.8), saddle, {1.1, 0.1, 0.0}, 300.0, 5000.0);
    check("attractor stays farther than 0.05 from the saddle at mu=0.8",
          far.reason == Termination::TimeReached && far.d_min > 0.05,
          "d_min=" + num(far.d_min));

    const double mu_loop = roots.empty() ? 0.8631144 : roots.front().param;
    const auto close_pass =
        attractor_pass_distance(make(mu_loop), saddle, {1.1, 0.1, 0.0}, 200.0, 20000.0);
    check("attractor passes within 1e-2 of the saddle at the located parameter",
          close_pass.reason == Termination::TimeReached && close_pass.d_min < 1e-2,
          "d_min=" + num(close_pass.d_min));
}

// --- 4: boundary crisis of the spiral attractor -----------------------------

void criterion_act_crisis() {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto crisis = detect_crisis(make, {1.0, 0.0, 0.0}, 0.86, 0.90, 1000.0, 1e-4);
    check("crisis bracket found in [0.86, 0.90]", crisis.has_value());
    check("crisis parameter 0.873 within 0.005",
          crisis && near(crisis->param, 0.873, 0.005), crisis ? "mu=" + num(crisis->param) : "");
}

// --- 5: homoclinic loop of the (2,1) saddle focus at the origin -------------

void criterion_act_homoclinic_21() {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    HomoclinicOptions opt;
    opt.split.side = 1.0;
    const auto roots = locate_homoclinic(make, {0.0, 0.0, 0.0}, 1.60, 1.615, opt);
    check("splitting zero with a close pass found in [1.60, 1.615]", !roots.empty());
    if (roots.empty()) {
        check("loop parameter 1.6062 within 0.005", false, "no root");
        check("loop saddle is saddle-focus(2,1)", false, "no root");
    } else {
        const HomoclinicPoint& h = roots.front();
        check("loop parameter 1.6062 within 0.005", near(h.param, 1.6062, 0.005),
              "mu=" + num(h.param));
        check("loop saddle is saddle-focus(2,1)",
              h.saddle.cls.type == PointType::SaddleFocus21, to_string(h.saddle.cls.type));
    }
}

// --- 6: chemical-oscillator bifurcation chain -------------------------------

void criterion_gn_chain() {
    auto make = [](double beta) { return GnFlow{beta}; };
    const Vec3 interior{0.73, 1.30, 0.17};
    const Vec3 cycle_seed{0.8, 1.2, 0.2};
    IntegratorConfig cfg;
    cfg.max_step = 0.005;

    const auto hopf = locate_hopf(make, 0.2, 0.3, interior);
    check("Hopf parameter 0.261 within 0.002", hopf && near(hopf->param, 0.261, 0.002),
          hopf ? "beta=" + num(hopf->param) : "no crossing in [0.2, 0.3]");

    const auto nf = locate_cycle_focus_transition(make, 0.33, 0.45, cycle_seed, 600.0, 25.0, cfg);
    check("cycle node-to-focus transition 0.365 within 0.003",
          nf && near(nf->param, 0.365, 0.003),
          nf ? "beta=" + num(nf->param) : "discriminant keeps its sign in [0.33, 0.45]");

    const auto pd = locate_period_doubling(make, 0.33, 0.45, cycle_seed, 600.0, 25.0, cfg);
    check("period doubling 0.3817 within 0.002 tagged subcritical",
          pd && near(pd->param, 0.3817, 0.002) && pd->criticality == Criticality::Subcritical,
          pd ? "beta=" + num(pd->param) + " " + to_string(pd->criticality)
             : "no multiplier reaches -1 in [0.33, 0.45]");

    HomoclinicOptions hopt;
    hopt.split.t_max = 60.0;
    hopt.split.cfg.max_step = 0.005;
    const auto roots = locate_homoclinic(make, interior, 0.38, 0.40, hopt);
    const HomoclinicPoint* hit = nullptr;
    for (const HomoclinicPoint& h : roots)
        if (near(h.param, 0.3921, 0.001)) hit = &h;
    check("homoclinic connection 0.3921 within 0.001", hit != nullptr,
          roots.empty() ? "no splitting zero with a close pass in [0.38, 0.40]"
                        : "beta=" + num(roots.front().param));

    const auto scan = classify_attractor(make(0.385), cycle_seed, 600.0, 3000.0, 1e-3, cfg);
    check("largest Lyapunov exponent positive at beta=0.385",
          scan.lyap.reason == Termination::TimeReached && scan.lyap.lam[0] > 0.0,
          "lam1=" + num(scan.lyap.lam[0]) + " kind=" + to_string(scan.kind));
}

// --- 7: orientable quadratic map family -------------------------------------

void criterion_mira_orientable() {
    const double A = 1.49, B = 0.5;
    auto make = [&](double c) { return MiraCMap{A, B, c}; };
    const Vec3 origin{0.0, 0.0, 0.0};

    const auto bounds = scan_map_boundaries(make, origin, -1.6, -0.9);
    const BoundaryPoint* fold = find_boundary(bounds, BoundaryKind::Fold);
    const BoundaryPoint* ns = find_boundary(bounds, BoundaryKind::NeimarkSacker);
    const double fold_formula = 1.0 - A - B;
    const double ns_formula = -(1.0 + B * (A - B));

    check("fold boundary -0.99 within 1e-3", fold && near(fold->param, -0.99, 1e-3),
          fold ? "C=" + num(fold->param) : "not found");
    check("fold boundary matches 1 - A - B within 1e-3",
          fold && near(fold->param, fold_formula, 1e-3), "formula C=" + num(fold_formula));
    check("torus boundary -1.495 within 1e-3", ns && near(ns->param, -1.495, 1e-3),
          ns ? "C=" + num(ns->param) : "not found");
    check("torus boundary matches -(1 + B(A-B)) within 1e-3",
          ns && near(ns->param, ns_formula, 1e-3), "formula C=" + num(ns_formula));

    const struct { double c; int expect; } counts[] = {{-1.70, 1}, {-1.73, 2}, {-1.76, 4}};
    for (const auto& [c, expect] : counts) {
        const auto cc = count_curve_components(make(c), origin, {1e-3, 1e-3, 1e-3});
        check("curve components " + std::to_string(expect) + " at C=" + num(c),
              cc.ok && cc.total == expect,
              cc.ok ? "count=" + std::to_string(cc.total) : "count failed");
    }

    const auto chaos = classify_attractor(make(-1.8), Vec3{1e-3, 1e-3, 1e-3}, 100000, 200000);
    check("chaotic attractor at C=-1.8", chaos.kind == AttractorKind::Chaotic,
          std::string("kind=") + to_string(chaos.kind) + " lam1=" + num(chaos.lyap.lam[0]));

    const auto flag_scan = classify_attractor(make(-1.82), Vec3{1e-3, 1e-3, 1e-3}, 100000, 200000);
    const auto pass = map_pass_distance(make(-1.82), origin, {1e-3, 1e-3, 1e-3}, 200000, 2000000);
    const bool flag = flag_scan.kind == AttractorKind::Chaotic && pass.d_min < 1e-2;
    check("homoclinic-attractor flag true at C=-1.82 (chaotic and d_min < 1e-2)", flag,
          std::string("kind=") + to_string(flag_scan.kind) + " d_min=" + num(pass.d_min));
}

// --- 8: nonorientable quadratic map family ----------------------------------

void criterion_mira_nonorientable() {
    const double A = -2.786, B = -0.915;
    auto make = [&](double c) { return MiraCMap{A, B, c}; };
    const Vec3 origin{0.0, 0.0, 0.0};

    const auto low = scan_map_boundaries(make, origin, -2.75, -2.68);
    const BoundaryPoint* ns = find_boundary(low, BoundaryKind::NeimarkSacker);
    check("torus boundary -2.712 within 1e-3", ns && near(ns->param, -2.712, 1e-3),
          ns ? "C=" + num(ns->param) : "not found");

    const auto high = scan_map_boundaries(make, origin, 4.65, 4.75);
    const BoundaryPoint* fold = find_boundary(high, BoundaryKind::Fold);
    const double fold_formula = 1.0 - A - B;
    check("fold boundary 4.701 within 1e-3", fold && near(fold->param, 4.701, 1e-3),
          fold ? "C=" + num(fold->param) : "not found");
    check("fold boundary matches 1 - A - B within 1e-3",
          fold && near(fold->param, fold_formula, 1e-3), "formula C=" + num(fold_formula));

    const auto cc = count_curve_components(make(-2.733), origin, {1e-3, 1e-3, 1e-3});
    check("curve components 2 at C=-2.733", cc.ok && cc.total == 2,
          cc.ok ? "count=" + std::to_string(cc.total) : "count failed");

    const auto [seed, seeded] = detail::map_cold_seed(make(-2.743), origin, 1e-4);
    const auto flag_scan = classify_attractor(make(-2.743), seed, 100000, 200000);
    const auto pass = map_pass_distance(make(-2.743), origin, seed, 200000, 1000000);
    const bool flag =
        seeded && flag_scan.kind == AttractorKind::Chaotic && pass.d_min < 1e-2;
    check("homoclinic-attractor flag true at C=-2.743 (chaotic and d_min < 1e-2)", flag,
          std::string("kind=") + to_string(flag_scan.kind) + " d_min=" + num(pass.d_min));
}

// --- 9: structural properties with built-in oracles -------------------------

void criterion_properties() {
    {
        std::mt19937 rng(20240817u);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            Mat3 m;
            for (auto& v : m.a) v = u(rng);
            const Spectrum3 s = eigenvalues_3x3(m);
            worst = std::max(worst, spectrum_mismatch(s, oracle::qr_eigenvalues(m)));
        }
        check("eigenvalues match QR-iteration oracle within 1e-9 on 200 matrices",
              worst < 1e-9, "worst=" + num(worst));
    }

    {
        const auto scan =
            classify_attractor(ActFlow{0.84, 0.4}, Vec3{0.1, 0.1, 0.1}, 400.0, 3000.0);
        const double sum = scan.lyap.lam[0] + scan.lyap.lam[1] + scan.lyap.lam[2];
        check("flow exponent sum equals -beta within 1e-2", near(sum, -0.4, 1e-2),
              "sum=" + num(sum));
    }

    {
        const auto scan =
            classify_attractor(MiraCMap{1.49, 0.5, -1.8}, Vec3{1e-3, 1e-3, 1e-3}, 100000, 200000);
        const double sum = scan.lyap.lam[0] + scan.lyap.lam[1] + scan.lyap.lam[2];
        check("map exponent sum equals ln|B| within 1e-3", near(sum, std::log(0.5), 1e-3),
              "sum=" + num(sum));
    }

    {
        const ActFlow flow{0.5, 0.4};
        const Vec3 seed = settle_orbit(flow, {1.1, 0.0, 0.0}, 400.0, {});
        const auto orbit = refine_cycle(flow, seed, 30.0);
        if (!orbit) {
            check("Floquet product equals exp(-beta T) within 1 percent", false, "no cycle");
            check("trivial multiplier equals 1 within 1e-4", false, "no cycle");
        } else {
            const double product =
                std::abs(orbit->nontrivial[0] * orbit->nontrivial[1] * orbit->trivial);
            const double expected = std::exp(-0.4 * orbit->period);
            check("Floquet product equals exp(-beta T) within 1 percent",
                  std::abs(product / expected - 1.0) < 1e-2,
                  "product=" + num(product) + " expected=" + num(expected));
            check("trivial multiplier equals 1 within 1e-4",
                  near(std::abs(orbit->trivial), 1.0, 1e-4),
                  "trivial=" + num(std::abs(orbit->trivial)));
        }
    }

    {
        std::mt19937 rng(424242u);
        std::uniform_real_distribution<double> u(-0.8, 0.8);
        double worst = 0.0;
        auto fd_check = [&](const auto& sys, const Vec3& x, auto eval) {
            const Mat3 J = sys.jac(x);
            const double h = 1e-6;
            double scale = J.norm_inf() + 1.0;
            for (int j = 0; j < 3; ++j) {
                Vec3 xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                const Vec3 fp = eval(sys, xp), fm = eval(sys, xm);
                for (int i = 0; i < 3; ++i) {
                    const double fd = (fp[i] - fm[i]) / (2.0 * h);
                    worst = std::max(worst, std::abs(J(i, j) - fd) / scale);
                }
            }
        };
        auto rhs_of = [](const auto& f, const Vec3& x) { return f.rhs(x); };
        auto step_of = [](const auto& m, const Vec3& x) { return m.step(x); };
        for (int trial = 0; trial < 25; ++trial) {
            const Vec3 x{u(rng), u(rng), u(rng)};
            fd_check(ActFlow{0.86, 0.4}, x, rhs_of);
            fd_check(GnFlow{0.3}, x + Vec3{1.0, 1.0, 0.2}, rhs_of);
            fd_check(MiraCMap{1.49, 0.5, -1.8}, x, step_of);
            fd_check(MiraMMap{0.35, 0.8, 0.7}, x, step_of);
        }
        check("Jacobians match central differences within 1e-5 relative", worst < 1e-5,
              "worst=" + num(worst));
    }

    {
        auto make = [](double mu) { return ActFlow{mu, 0.4}; };
        const auto grid = param_grid(0.50, 0.56, 3);
        FlowSweepOptions opt;
        opt.transient = 300.0;
        opt.horizon = 1500.0;
        opt.want_d_min = true;
        opt.d_min_sample = 500.0;
        const auto a = sweep_flow(make, grid, {1.0, 0.0, 0.0}, opt);
        const auto b = sweep_flow(make, grid, {1.0, 0.0, 0.0}, opt);

        auto make_map = [](double c) { return MiraCMap{1.49, 0.5, c}; };
        const auto mgrid = param_grid(-1.74, -1.70, 3);
        MapSweepOptions mopt;
        mopt.transient = 20000;
        mopt.samples = 40000;
        mopt.want_d_min = true;
        mopt.d_min_samples = 40000;
        mopt.want_section = true;
        const auto ma = sweep_map(make_map, mgrid, {0.0, 0.0, 0.0}, mopt);
        const auto mb = sweep_map(make_map, mgrid, {0.0, 0.0, 0.0}, mopt);

        auto identical = [](const SweepRow& x, const SweepRow& y) {
            auto same = [](double p, double q) {
                return (std::isinf(p) && std::isinf(q) && (p > 0) == (q > 0)) || p == q;
            };
            if (x.param != y.param || x.kind != y.kind || x.flags != y.flags ||
                x.components != y.components || !same(x.d_min, y.d_min))
                return false;
            for (int i = 0; i < 3; ++i)
                if (x.lam[i] != y.lam[i]) return false;
            if (x.section.size() != y.section.size()) return false;
            for (std::size_t i = 0; i < x.section.size(); ++i)
                if (x.section[i] != y.section[i]) return false;
            return x.drift == y.drift && x.x_end.x == y.x_end.x && x.x_end.y == y.x_end.y &&
                   x.x_end.z == y.x_end.z;
        };
        bool ok = a.size() == b.size() && ma.size() == mb.size();
        for (std::size_t i = 0; ok && i < a.size(); ++i) ok = identical(a[i], b[i]);
        for (std::size_t i = 0; ok && i < ma.size(); ++i) ok = identical(ma[i], mb[i]);
        check("sweep reruns are byte-identical", ok);
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..9>\n");
        return 64;
    }
    const int n = std::atoi(argv[1]);
    switch (n) {
        case 1: criterion_act_hopf(); break;
        case 2: criterion_act_period_doubling(); break;
        case 3: criterion_act_homoclinic_12(); break;
        case 4: criterion_act_crisis(); break;
        case 5: criterion_act_homoclinic_21(); break;
        case 6: criterion_gn_chain(); break;
        case 7: criterion_mira_orientable(); break;
        case 8: criterion_mira_nonorientable(); break;
        case 9: criterion_properties(); break;
        default:
            std::fprintf(stderr, "usage: acceptance <criterion 1..9>\n");
            return 64;
    }
    return std::min(failures, 125);
}
