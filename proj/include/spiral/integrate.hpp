#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spiral/systems.hpp"

namespace spiral {

struct IntegratorConfig {
    double rtol = 1e-9;
    double atol = 1e-12;
    double init_step = 0.0;  // 0 selects a conservative automatic value
    double max_step = kInf;
    long long max_steps = 500000000;
    double escape_radius = 1e3;       // sup-norm bound on the state
    std::optional<Box> box;           // optional absorbing box; leaving it = escaped
};

enum class Termination {
    TimeReached,
    Escaped,
    EventStop,
    StepFailure,   // step-size underflow (stiffness failure)
    StepLimit,
    CallbackStop,
};

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::TimeReached: return "time-reached";
        case Termination::Escaped: return "escaped";
        case Termination::EventStop: return "event";
        case Termination::StepFailure: return "step-failure";
        case Termination::StepLimit: return "step-limit";
        case Termination::CallbackStop: return "callback-stop";
    }
    return "?";
}

// Section plane with crossing direction: +1 fires when the signed distance
// rises through zero, -1 when it falls, 0 on both.
struct EventSpec {
    Vec3 point;
    Vec3 normal;
    int direction = 0;
    bool stop = false;
    double arm_time = 0.0;  // crossings within arm_time of the start are ignored

    double signed_dist(const Vec3& p) const { return dot(p - point, normal); }
};

struct EventHit {
    double t = 0.0;
    Vec3 state;
    int index = 0;      // which EventSpec fired
    int direction = 0;  // +1 rising, -1 falling
};

namespace rk {

// Dormand-Prince 5(4) coefficients.
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// embedded error weights (5th order minus 4th order)
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output weights
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace rk

// One accepted step with its quartic interpolant. Valid only inside the
// step callback that receives it.
template <int N>
struct DenseStep {
    using State = std::array<double, N>;
    double t0 = 0.0, t1 = 0.0;
    const State* y0 = nullptr;
    const State* y1 = nullptr;
    State r3{}, r4{}, r5{};  // interpolant tail (r1 = y0, r2 = y1 - y0)

    double h() const { return t1 - t0; }

    State eval(double t) const {
        const double th = (t - t0) / (t1 - t0);
        const double th1 = 1.0 - th;
        State out;
        for (int i = 0; i < N; ++i) {
            const double diff = (*y1)[i] - (*y0)[i];
            out[i] = (*y0)[i] + th * (diff + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        return out;
    }

    Vec3 eval3(double t) const {
        const State s = eval(t);
        return {s[0], s[1], s[2]};
    }

    Vec3 head3_y1() const { return {(*y1)[0], (*y1)[1], (*y1)[2]}; }
};

enum class StepAction { Continue, Stop };

// Adaptive integration of y' = rhs(y) over a signed span. The callback sees
// every accepted step with dense output; escape checks apply to the first
// three components (the state proper; the rest carry tangent vectors).
template <int N, class RHS, class StepCB>
Termination integrate_core(RHS&& rhs, std::array<double, N>& y, double t_start,
                           double t_span, const IntegratorConfig& cfg, StepCB&& on_step,
                           double* t_final = nullptr) {
    using State = std::array<double, N>;
    const double dir = t_span >= 0.0 ? 1.0 : -1.0;
    const double t_end = t_start + t_span;
    double t = t_start;

    auto finish = [&](Termination reason) {
        if (t_final) *t_final = t;
        return reason;
    };
    if (t_span == 0.0) return finish(Termination::TimeReached);

    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    rhs(y, k1);

    double h = cfg.init_step != 0.0 ? std::abs(cfg.init_step)
                                    : std::min(1e-3, std::abs(t_span) / 10.0);
    h = std::min(h, cfg.max_step) * dir;

    bool last = false;
    for (long long step = 0; step < cfg.max_steps; ++step) {
        if (std::abs(h) < 1e-13 * std::max(1.0, std::abs(t)))
            return finish(Termination::StepFailure);
        if ((t + h - t_end) * dir >= 0.0) {
            h = t_end - t;
            last = true;
        } else {
            last = false;
        }

        for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * rk::a21 * k1[i];
        rhs(ytmp, k2);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (rk::a31 * k1[i] + rk::a32 * k2[i]);
        rhs(ytmp, k3);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (rk::a41 * k1[i] + rk::a42 * k2[i] + rk::a43 * k3[i]);
        rhs(ytmp, k4);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (rk::a51 * k1[i] + rk::a52 * k2[i] + rk::a53 * k3[i] +
                                  rk::a54 * k4[i]);
        rhs(ytmp, k5);
        for (int i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (rk::a61 * k1[i] + rk::a62 * k2[i] + rk::a63 * k3[i] +
                                  rk::a64 * k4[i] + rk::a65 * k5[i]);
        rhs(ytmp, k6);
        for (int i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (rk::a71 * k1[i] + rk::a73 * k3[i] + rk::a74 * k4[i] +
                                  rk::a75 * k5[i] + rk::a76 * k6[i]);
        rhs(ynew, k7);

        double err2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double e = h * (rk::e1 * k1[i] + rk::e3 * k3[i] + rk::e4 * k4[i] +
                                  rk::e5 * k5[i] + rk::e6 * k6[i] + rk::e7 * k7[i]);
            const double sc =
                cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err2 += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(err2 / N);

        if (!(err <= 1.0) || !std::isfinite(err)) {
            double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= std::min(fac, 1.0);
            continue;
        }

        DenseStep<N> ds;
        ds.t0 = t;
        ds.t1 = t + h;
        ds.y0 = &y;
        ds.y1 = &ynew;
        for (int i = 0; i < N; ++i) {
            const double diff = ynew[i] - y[i];
            const double bspl = h * k1[i] - diff;
            ds.r3[i] = bspl;
            ds.r4[i] = diff - h * k7[i] - bspl;
            ds.r5[i] = h * (rk::d1 * k1[i] + rk::d3 * k3[i] + rk::d4 * k4[i] +
                            rk::d5 * k5[i] + rk::d6 * k6[i] + rk::d7 * k7[i]);
        }

        const StepAction act = on_step(ds);
        // the callback may have updated y (event stop rewrites the endpoint)
        if (act == StepAction::Stop) {
            t = ds.t1;
            return finish(Termination::CallbackStop);
        }

        t += h;
        y = ynew;
        k1 = k7;

        const Vec3 head{y[0], y[1], y[2]};
        if (!finite(head) || norm_inf(head) > cfg.escape_radius ||
            (cfg.box && !cfg.box->contains(head)))
            return finish(Termination::Escaped);

        if (last) return finish(Termination::TimeReached);

        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (std::abs(h) > cfg.max_step) h = cfg.max_step * dir;
    }
    return finish(Termination::StepLimit);
}

namespace detail {

// Locates crossings of the event planes inside one dense step. Crossing
// candidates are bracketed on a 5-point sign scan, then bisected on the
// interpolant; hits are reported in time order.
template <int N, class OnHit>
StepAction scan_events(const DenseStep<N>& ds, std::span<const EventSpec> events,
                       double t_origin, double dir, OnHit&& on_hit) {
    if (events.empty()) return StepAction::Continue;
    struct Cand {
        double th;
        double t;
        int index;
        int direction;
    };
    std::array<Cand, 16> cands;
    int n_cands = 0;

    const double thetas[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int ei = 0; ei < static_cast<int>(events.size()); ++ei) {
        const EventSpec& ev = events[ei];
        double g[5];
        for (int j = 0; j < 5; ++j)
            g[j] = ev.signed_dist(ds.eval3(ds.t0 + thetas[j] * ds.h()));
        for (int j = 0; j < 4 && n_cands < 16; ++j) {
            const bool rising = g[j] < 0.0 && g[j + 1] >= 0.0;
            const bool falling = g[j] > 0.0 && g[j + 1] <= 0.0;
            int cdir = 0;
            if (rising && ev.direction >= 0) cdir = +1;
            if (falling && ev.direction <= 0) cdir = -1;
            if (cdir == 0) continue;
            double lo = thetas[j], hi = thetas[j + 1];
            for (int it = 0; it < 64; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = ev.signed_dist(ds.eval3(ds.t0 + mid * ds.h()));
                const bool same_side = (cdir > 0) ? (gm < 0.0) : (gm > 0.0);
                if (same_side)
                    lo = mid;
                else
                    hi = mid;
            }
            const double th = 0.5 * (lo + hi);
            const double te = ds.t0 + th * ds.h();
            if ((te - t_origin) * dir < ev.arm_time) continue;
            cands[n_cands++] = {th, te, ei, cdir};
        }
    }
    if (n_cands == 0) return StepAction::Continue;
    std::sort(cands.begin(), cands.begin() + n_cands,
              [](const Cand& a, const Cand& b) { return a.th < b.th; });
    for (int i = 0; i < n_cands; ++i) {
        const StepAction act = on_hit(cands[i].t, ds.eval(cands[i].t), cands[i].index,
                                      cands[i].direction);
        if (act == StepAction::Stop) return StepAction::Stop;
    }
    return StepAction::Continue;
}

}  // namespace detail

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec3> x;
    std::vector<EventHit> events;
    Termination reason = Termination::TimeReached;
    double t_end = 0.0;
    Vec3 x_end;
};

// Streaming integration for flows: cb sees every accepted DenseStep<3>.
// Event hits are located on dense output; a stopping event rewrites the
// final state to the located crossing.
template <FlowLike F, class StepCB>
Trajectory integrate_stream(const F& flow, const Vec3& x0, double t_span,
                            IntegratorConfig cfg, std::span<const EventSpec> events,
                            StepCB&& cb, bool record_steps) {
    cfg.max_step = std::min(cfg.max_step, flow.max_step());
    Trajectory traj;
    std::array<double, 3> y{x0.x, x0.y, x0.z};
    const double dir = t_span >= 0.0 ? 1.0 : -1.0;

    if (record_steps) {
        traj.t.push_back(0.0);
        traj.x.push_back(x0);
    }

    auto rhs = [&flow](const std::array<double, 3>& s, std::array<double, 3>& ds) {
        const Vec3 f = flow.rhs({s[0], s[1], s[2]});
        ds = {f.x, f.y, f.z};
    };

    bool event_stopped = false;
    double t_fin = 0.0;
    auto on_step = [&](const DenseStep<3>& ds) -> StepAction {
        const StepAction ea = detail::scan_events<3>(
            ds, events, 0.0, dir,
            [&](double te, const std::array<double, 3>& ye, int idx, int cdir) {
                const Vec3 pe{ye[0], ye[1], ye[2]};
                traj.events.push_back({te, pe, idx, cdir});
                if (events[idx].stop) {
                    event_stopped = true;
                    traj.t_end = te;
                    traj.x_end = pe;
                    return StepAction::Stop;
                }
                return StepAction::Continue;
            });
        if (ea == StepAction::Stop) return StepAction::Stop;
        if (record_steps) {
            traj.t.push_back(ds.t1);
            traj.x.push_back(ds.head3_y1());
        }
        return cb(ds);
    };

    const Termination reason = integrate_core<3>(rhs, y, 0.0, t_span, cfg, on_step, &t_fin);
    if (event_stopped) {
        traj.reason = Termination::EventStop;
        if (record_steps) {
            traj.t.push_back(traj.t_end);
            traj.x.push_back(traj.x_end);
        }
    } else {
        traj.reason = reason;
        traj.t_end = t_fin;
        traj.x_end = {y[0], y[1], y[2]};
    }
    return traj;
}

template <FlowLike F>
Trajectory integrate(const F& flow, const Vec3& x0, double t_span,
                     const IntegratorConfig& cfg, std::span<const EventSpec> events = {}) {
    return integrate_stream(
        flow, x0, t_span, cfg, events, [](const DenseStep<3>&) { return StepAction::Continue; },
        true);
}

// Fixed-interval samples via dense output (for CSV export and plotting).
template <FlowLike F>
Trajectory integrate_sampled(const F& flow, const Vec3& x0, double t_span, double dt,
                             const IntegratorConfig& cfg,
                             std::span<const EventSpec> events = {}) {
    Trajectory out;
    out.t.push_back(0.0);
    out.x.push_back(x0);
    const double dir = t_span >= 0.0 ? 1.0 : -1.0;
    double next = dt * dir;
    Trajectory run = integrate_stream(
        flow, x0, t_span, cfg, events,
        [&](const DenseStep<3>& ds) {
            while ((ds.t1 - next) * dir >= 0.0) {
                out.t.push_back(next);
                out.x.push_back(ds.eval3(next));
                next += dt * dir;
            }
            return StepAction::Continue;
        },
        false);
    out.events = std::move(run.events);
    out.reason = run.reason;
    out.t_end = run.t_end;
    out.x_end = run.x_end;
    if (out.t.empty() || out.t.back() != run.t_end) {
        out.t.push_back(run.t_end);
        out.x.push_back(run.x_end);
    }
    return out;
}

struct VariationalResult {
    Vec3 x_end;
    Mat3 Q_end;                    // orthonormal frame after the final renormalization
    double t_end = 0.0;
    Vec3 log_sums;                 // accumulated log-stretches per frame direction
    Termination reason = Termination::TimeReached;
    std::vector<double> interval_t;     // renormalization times (when recorded)
    std::vector<Vec3> interval_logs;    // per-interval log-stretches
};

namespace detail {

// Modified Gram-Schmidt on the columns of V; returns the column norms
// (diagonal of R) and overwrites V with the orthonormal frame.
inline Vec3 gram_schmidt(Mat3& V) {
    Vec3 norms;
    for (int c = 0; c < 3; ++c) {
        Vec3 v = V.col(c);
        for (int p = 0; p < c; ++p) {
            const Vec3 q = V.col(p);
            v -= dot(v, q) * q;
        }
        const double n = norm(v);
        norms[c] = n;
        v = n > 0.0 ? v / n : v;
        for (int r = 0; r < 3; ++r) V(r, c) = v[r];
    }
    return norms;
}

template <FlowLike F>
auto variational_rhs(const F& flow) {
    return [&flow](const std::array<double, 12>& s, std::array<double, 12>& ds) {
        const Vec3 x{s[0], s[1], s[2]};
        const Vec3 f = flow.rhs(x);
        ds[0] = f.x;
        ds[1] = f.y;
        ds[2] = f.z;
        const Mat3 J = flow.jac(x);
        for (int c = 0; c < 3; ++c) {
            const Vec3 v{s[3 + c], s[6 + c], s[9 + c]};
            const Vec3 Jv = J * v;
            ds[3 + c] = Jv.x;
            ds[6 + c] = Jv.y;
            ds[9 + c] = Jv.z;
        }
    };
}

inline void pack_var(std::array<double, 12>& y, const Vec3& x, const Mat3& V) {
    y[0] = x.x;
    y[1] = x.y;
    y[2] = x.z;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) y[3 + 3 * r + c] = V(r, c);
}

inline void unpack_var(const std::array<double, 12>& y, Vec3& x, Mat3& V) {
    x = {y[0], y[1], y[2]};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) V(r, c) = y[3 + 3 * r + c];
}

}  // namespace detail

// Propagates the state together with a tangent frame, re-orthonormalizing
// every renorm_interval time units and accumulating log-stretches.
template <FlowLike F>
VariationalResult integrate_with_tangents(const F& flow, const Vec3& x0, const Mat3& Q0,
                                          double t_span, IntegratorConfig cfg,
                                          double renorm_interval, bool record = false) {
    cfg.max_step = std::min(cfg.max_step, flow.max_step());
    VariationalResult res;
    const double dir = t_span >= 0.0 ? 1.0 : -1.0;
    const double t_end = t_span;

    std::array<double, 12> y;
    Vec3 x = x0;
    Mat3 V = Q0;
    detail::pack_var(y, x, V);
    auto rhs = detail::variational_rhs(flow);
    auto nop = [](const DenseStep<12>&) { return StepAction::Continue; };

    double t = 0.0;
    res.reason = Termination::TimeReached;
    while ((t_end - t) * dir > 1e-12 * std::abs(t_span)) {
        double seg = renorm_interval * dir;
        if ((t + seg - t_end) * dir > 0.0) seg = t_end - t;
        double t_fin = t;
        const Termination r = integrate_core<12>(rhs, y, t, seg, cfg, nop, &t_fin);
        t = t_fin;
        detail::unpack_var(y, x, V);
        const Vec3 norms = detail::gram_schmidt(V);
        Vec3 logs;
        for (int i = 0; i < 3; ++i) logs[i] = std::log(std::max(norms[i], 1e-300));
        res.log_sums += logs;
        if (record) {
            res.interval_t.push_back(t);
            res.interval_logs.push_back(logs);
        }
        detail::pack_var(y, x, V);
        if (r != Termination::TimeReached) {
            res.reason = r;
            break;
        }
    }
    res.x_end = x;
    res.Q_end = V;
    res.t_end = t;
    return res;
}

// Augmented integration of (x, V) until a stopping section crossing; used for
// monodromy matrices. Returns the crossing time, state, and propagated V.
struct MonodromyLeg {
    double t = 0.0;
    Vec3 x;
    Mat3 V;
};

template <FlowLike F>
std::optional<MonodromyLeg> integrate_to_section(const F& flow, const Vec3& x0,
                                                 const Mat3& V0, const EventSpec& section,
                                                 int crossing_count, double t_max,
                                                 IntegratorConfig cfg) {
    cfg.max_step = std::min(cfg.max_step, flow.max_step());
    std::array<double, 12> y;
    detail::pack_var(y, x0, V0);
    auto rhs = detail::variational_rhs(flow);

    std::optional<MonodromyLeg> result;
    int seen = 0;
    const double dir = t_max >= 0.0 ? 1.0 : -1.0;
    const EventSpec evs[1] = {section};
    auto on_step = [&](const DenseStep<12>& ds) -> StepAction {
        return detail::scan_events<12>(
            ds, std::span<const EventSpec>(evs, 1), 0.0, dir,
            [&](double te, const std::array<double, 12>& ye, int, int) {
                if (++seen < crossing_count) return StepAction::Continue;
                MonodromyLeg leg;
                leg.t = te;
                Vec3 xx;
                Mat3 VV;
                detail::unpack_var(ye, xx, VV);
                leg.x = xx;
                leg.V = VV;
                result = leg;
                return StepAction::Stop;
            });
    };
    integrate_core<12>(rhs, y, 0.0, t_max, cfg, on_step);
    return result;
}

}  // namespace spiral
