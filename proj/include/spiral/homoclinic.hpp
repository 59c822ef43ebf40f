#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "spiral/manifolds.hpp"

namespace spiral {

// Tight tolerances for splitting measurements: the signed offset of a
// returning branch is meaningful only well below the integration error.
inline IntegratorConfig splitting_config() {
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-13;
    cfg.max_step = 0.1;
    return cfg;
}

struct BranchSplit {
    double h = 0.0;        // signed offset of the closest return along the spiral normal
    double d_pass = kInf;  // distance of that return from the saddle
    double t_pass = 0.0;
    Vec3 x_pass;
};

struct SplitOptions {
    double side = -1.0;
    double delta = 1e-5;
    double t_max = 300.0;
    double r_far = 0.7;       // the branch must first leave this ball around the saddle
    double sample_dt = 0.005;
    IntegratorConfig cfg = splitting_config();
};

// Follows the one-dimensional branch of a saddle focus in its outgoing time
// direction and measures where it comes back: h is the signed distance of the
// closest post-excursion point from the spiral eigenplane, so a homoclinic
// connection corresponds to a sign change of h along a parameter path.
// Returns nothing when the branch never leaves the arming ball.
template <FlowLike F>
std::optional<BranchSplit> branch_split(const F& flow, const Equilibrium& saddle,
                                        const SplitOptions& opt = {}) {
    const int li = detail::lone_eigen_index(saddle.spectrum);
    const int pi = complex_pair_index(saddle.spectrum);
    if (li < 0 || !genuine_pair(saddle.spectrum, pi))
        throw PreconditionError("branch splitting needs a saddle focus");
    const Mat3 J = flow.jac(saddle.x);
    const double lr = saddle.spectrum.ev[li].real();
    const Vec3 e = real_eigenvector(J, lr);
    const EigenPlane plane = eigen_plane(J, saddle.spectrum.ev[pi]);
    const Vec3 x0 = saddle.x + opt.side * opt.delta * e;
    const double dir = lr > 0.0 ? 1.0 : -1.0;

    IntegratorConfig cfg = opt.cfg;
    if (!cfg.box) cfg.box = flow.box();

    bool armed = false;
    std::optional<BranchSplit> best;
    double next = 0.0;
    auto consider = [&](double t, const Vec3& p) {
        const double d = norm(p - saddle.x);
        if (!armed) {
            armed = d > opt.r_far;
            return;
        }
        if (!best || d < best->d_pass) {
            BranchSplit b;
            b.h = dot(p - saddle.x, plane.n);
            b.d_pass = d;
            b.t_pass = t;
            b.x_pass = p;
            best = b;
        }
    };
    integrate_stream(
        flow, x0, dir * opt.t_max, cfg, {},
        [&](const DenseStep<3>& ds) {
            while ((ds.t1 - next) * dir >= 0.0) {
                consider(next, ds.eval3(next));
                next += dir * opt.sample_dt;
            }
            return StepAction::Continue;
        },
        false);
    return best;
}

struct HomoclinicPoint {
    double param = 0.0;
    Equilibrium saddle;
    BranchSplit split;  // measured at the located parameter
};

struct HomoclinicOptions {
    int n_scan = 21;
    double param_tol = 1e-10;
    double d_pass_max = 0.3;  // a genuine connection must pass this close to the saddle
    SplitOptions split{};
};

// Scans h over [lo, hi] and bisects every strict sign change between valid
// samples. A root counts only if the branch actually dips near the saddle
// there; sign changes caused by distant passes are discarded.
template <class MakeFlow>
std::vector<HomoclinicPoint> locate_homoclinic(MakeFlow&& make, const Vec3& saddle_guess,
                                               double lo, double hi,
                                               const HomoclinicOptions& opt = {}) {
    using Eval = std::pair<std::optional<BranchSplit>, Equilibrium>;
    Vec3 guess = saddle_guess;
    auto eval = [&](double p) -> Eval {
        const auto flow = make(p);
        const auto x = newton_equilibrium(flow, guess);
        if (!x) return {std::nullopt, {}};
        guess = *x;
        const Equilibrium eq = classify_equilibrium(flow, *x);
        if (detail::lone_eigen_index(eq.spectrum) < 0 ||
            !genuine_pair(eq.spectrum, complex_pair_index(eq.spectrum)))
            return {std::nullopt, eq};
        return {branch_split(flow, eq, opt.split), eq};
    };

    std::vector<HomoclinicPoint> out;
    auto accept = [&](double p, const Eval& ev) {
        if (ev.first && ev.first->d_pass < opt.d_pass_max)
            out.push_back({p, ev.second, *ev.first});
    };

    std::optional<double> prev_h;
    double prev_p = lo;
    for (int i = 0; i < opt.n_scan; ++i) {
        const double p = lo + (hi - lo) * i / (opt.n_scan - 1);
        const Eval cur = eval(p);
        const std::optional<double> h =
            cur.first ? std::optional<double>(cur.first->h) : std::nullopt;
        if (h && *h == 0.0) {
            accept(p, cur);
        } else if (prev_h && h && *prev_h != 0.0 &&
                   ((*prev_h > 0.0 && *h < 0.0) || (*prev_h < 0.0 && *h > 0.0))) {
            double a = prev_p;
            double b = p;
            double ha = *prev_h;
            Eval root = cur;
            for (int it = 0; it < 64 && b - a > opt.param_tol; ++it) {
                const double m = 0.5 * (a + b);
                Eval mid = eval(m);
                if (!mid.first) break;
                root = std::move(mid);
                if (root.first->h == 0.0) {
                    a = b = m;
                    break;
                }
                if ((ha > 0.0) == (root.first->h > 0.0)) {
                    a = m;
                    ha = root.first->h;
                } else {
                    b = m;
                }
            }
            accept(0.5 * (a + b), root);
        }
        prev_h = h;
        prev_p = p;
    }
    return out;
}

struct PassDistance {
    double d_min = kInf;
    double t_min = 0.0;
    Vec3 x_min;
    Termination reason = Termination::TimeReached;
};

// Minimum distance of the post-transient orbit from a target point, sampled
// on dense output. An orbit that escapes during the transient reports an
// infinite distance.
template <FlowLike F>
PassDistance attractor_pass_distance(const F& flow, const Vec3& target, const Vec3& seed,
                                     double t_transient, double t_sample, double dt = 0.005,
                                     IntegratorConfig cfg = {}) {
    if (!cfg.box) cfg.box = flow.box();
    PassDistance out;
    const Trajectory settle = integrate_stream(
        flow, seed, t_transient, cfg, {},
        [](const DenseStep<3>&) { return StepAction::Continue; }, false);
    out.reason = settle.reason;
    if (settle.reason != Termination::TimeReached) return out;
    double next = 0.0;
    const Trajectory run = integrate_stream(
        flow, settle.x_end, t_sample, cfg, {},
        [&](const DenseStep<3>& ds) {
            while (ds.t1 - next >= 0.0) {
                const Vec3 p = ds.eval3(next);
                const double d = norm(p - target);
                if (d < out.d_min) {
                    out.d_min = d;
                    out.t_min = next;
                    out.x_min = p;
                }
                next += dt;
            }
            return StepAction::Continue;
        },
        false);
    out.reason = run.reason;
    return out;
}

// Map analog: minimum distance of the post-transient iterate sequence from a
// target fixed point.
template <MapLike M>
PassDistance map_pass_distance(const M& map, const Vec3& target, Vec3 x,
                               long long transient, long long samples) {
    PassDistance out;
    const Box box = map.box();
    for (long long i = 0; i < transient; ++i) {
        x = map.step(x);
        if (!box.contains(x)) {
            out.reason = Termination::Escaped;
            return out;
        }
    }
    for (long long i = 0; i < samples; ++i) {
        x = map.step(x);
        if (!box.contains(x)) {
            out.reason = Termination::Escaped;
            return out;
        }
        const double d = norm(x - target);
        if (d < out.d_min) {
            out.d_min = d;
            out.t_min = static_cast<double>(i);
            out.x_min = x;
        }
    }
    return out;
}

}  // namespace spiral
