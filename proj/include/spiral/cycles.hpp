#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spiral/equilibria.hpp"
#include "spiral/integrate.hpp"

namespace spiral {

struct PeriodicOrbit {
    Vec3 x0;                  // converged point on the section plane
    double period = 0.0;
    Vec3 section_point;       // plane anchor (Newton keeps the plane fixed)
    Vec3 section_normal;
    Vec3 e1, e2;              // in-plane frame
    Complex nontrivial[2];    // section-map multipliers
    Complex trivial{1.0, 0.0};
    Spectrum3 monodromy_spectrum;  // all three, modulus-ordered
    double tr = 0.0, det = 0.0, disc = 0.0;  // of the 2x2 section derivative
    bool focal = false;       // complex nontrivial pair
    int returns = 1;          // section crossings per period
    double residual = 0.0;
};

inline double cycle_stability_margin(const PeriodicOrbit& o) {
    return std::max(std::abs(o.nontrivial[0]), std::abs(o.nontrivial[1]));
}

// Single-shooting Newton on the 2D return displacement in a fixed section
// plane through p0 (normal = flow direction there). The monodromy matrix is
// projected onto the plane; its 2x2 restriction drives the Newton step and
// yields the nontrivial multipliers.
template <FlowLike F>
std::optional<PeriodicOrbit> refine_cycle(const F& flow, const Vec3& p0, double t_max,
                                          int nret = 1, IntegratorConfig cfg = {},
                                          int max_iter = 50, double arm_time = 0.05) {
    const Vec3 f0 = flow.rhs(p0);
    if (norm(f0) < 1e-12) return std::nullopt;
    const Vec3 n = normalized(f0);
    const auto [e1, e2] = plane_basis(n);

    EventSpec section;
    section.point = p0;
    section.normal = n;
    section.direction = +1;
    section.stop = true;
    // outlasts fast transverse relaxation so near-tangent recrossings of the
    // plane right after the start are not mistaken for returns
    section.arm_time = arm_time;

    double u1 = 0.0, u2 = 0.0;
    std::optional<MonodromyLeg> leg;
    double r1 = kInf, r2 = kInf;
    double d11 = 0, d12 = 0, d21 = 0, d22 = 0;

    for (int it = 0; it < max_iter; ++it) {
        const Vec3 x0 = p0 + u1 * e1 + u2 * e2;
        leg = integrate_to_section(flow, x0, Mat3::identity(), section, nret, t_max, cfg);
        if (!leg) return std::nullopt;

        const Vec3 fT = flow.rhs(leg->x);
        const double fn = dot(n, fT);
        if (std::abs(fn) < 1e-14) return std::nullopt;
        const Mat3 P = Mat3::identity() - outer(fT, n) * (1.0 / fn);
        const Mat3 A = P * leg->V;
        d11 = dot(e1, A * e1);
        d12 = dot(e1, A * e2);
        d21 = dot(e2, A * e1);
        d22 = dot(e2, A * e2);

        const Vec3 dx = leg->x - p0;
        r1 = dot(dx, e1) - u1;
        r2 = dot(dx, e2) - u2;
        if (std::hypot(r1, r2) < 1e-10) break;

        double s1 = 0, s2 = 0;
        if (!solve2(d11 - 1.0, d12, d21, d22 - 1.0, -r1, -r2, s1, s2))
            return std::nullopt;
        const double sn = std::hypot(s1, s2);
        if (sn > 0.5) {
            s1 *= 0.5 / sn;
            s2 *= 0.5 / sn;
        }
        u1 += s1;
        u2 += s2;
        if (it == max_iter - 1 && std::hypot(r1, r2) >= 1e-8) return std::nullopt;
    }
    if (!leg || std::hypot(r1, r2) >= 1e-8) return std::nullopt;

    PeriodicOrbit orbit;
    orbit.x0 = p0 + u1 * e1 + u2 * e2;
    orbit.period = leg->t;
    orbit.section_point = p0;
    orbit.section_normal = n;
    orbit.e1 = e1;
    orbit.e2 = e2;
    orbit.returns = nret;
    orbit.residual = std::hypot(r1, r2);

    orbit.tr = d11 + d22;
    orbit.det = d11 * d22 - d12 * d21;
    orbit.disc = orbit.tr * orbit.tr - 4.0 * orbit.det;
    if (orbit.disc >= 0.0) {
        const double s = std::sqrt(orbit.disc);
        orbit.nontrivial[0] = Complex{0.5 * (orbit.tr + s), 0.0};
        orbit.nontrivial[1] = Complex{0.5 * (orbit.tr - s), 0.0};
        orbit.focal = false;
    } else {
        const double s = std::sqrt(-orbit.disc);
        orbit.nontrivial[0] = Complex{0.5 * orbit.tr, 0.5 * s};
        orbit.nontrivial[1] = Complex{0.5 * orbit.tr, -0.5 * s};
        orbit.focal = true;
    }

    orbit.monodromy_spectrum = eigenvalues_3x3(leg->V, SpectrumOrder::Map);
    Complex best = orbit.monodromy_spectrum.ev[0];
    for (const Complex& l : orbit.monodromy_spectrum.ev)
        if (std::abs(l - Complex{1.0, 0.0}) < std::abs(best - Complex{1.0, 0.0})) best = l;
    orbit.trivial = best;
    return orbit;
}

// Settles onto the attracting set, then returns a section-ready point.
template <FlowLike F>
Vec3 settle_orbit(const F& flow, const Vec3& seed, double t_settle,
                  const IntegratorConfig& cfg) {
    auto cb = [](const DenseStep<3>&) { return StepAction::Continue; };
    const Trajectory traj = integrate_stream(flow, seed, t_settle, cfg, {}, cb, false);
    return traj.x_end;
}

// In-plane coordinates of successive section returns; used for empirical
// criticality checks past a doubling.
template <FlowLike F>
std::vector<std::pair<double, double>> section_returns(const F& flow,
                                                       const PeriodicOrbit& orbit,
                                                       const Vec3& from, double t_max,
                                                       const IntegratorConfig& cfg) {
    EventSpec sec;
    sec.point = orbit.section_point;
    sec.normal = orbit.section_normal;
    sec.direction = +1;
    sec.stop = false;
    sec.arm_time = 1e-3;
    const Trajectory traj =
        integrate(flow, from, t_max, cfg, std::span<const EventSpec>(&sec, 1));
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.events.size());
    for (const EventHit& h : traj.events) {
        const Vec3 dx = h.state - orbit.section_point;
        out.emplace_back(dot(dx, orbit.e1), dot(dx, orbit.e2));
    }
    return out;
}

enum class Criticality { Supercritical, Subcritical, Undetermined };

inline const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::Supercritical: return "supercritical";
        case Criticality::Subcritical: return "subcritical";
        case Criticality::Undetermined: return "undetermined";
    }
    return "?";
}

struct CycleEvent {
    double param = 0.0;
    PeriodicOrbit orbit;
    Criticality criticality = Criticality::Undetermined;
};

namespace detail {

// Tracks the cycle across a parameter scan, bisecting on a scalar monitor of
// the refined orbit; warm-starts each refinement from the previous point.
template <class MakeFlow, class Monitor>
std::optional<CycleEvent> bisect_cycle_monitor(MakeFlow&& make, Monitor&& monitor,
                                               double lo, double hi, const Vec3& seed0,
                                               double t_settle, double t_max, int nret,
                                               const IntegratorConfig& cfg, int n_scan,
                                               double param_tol) {
    struct Node {
        double p;
        Vec3 x0;
        double m;
        PeriodicOrbit orbit;
    };
    auto eval = [&](double p, const Vec3& warm) -> std::optional<Node> {
        const auto flow = make(p);
        const auto orbit = refine_cycle(flow, warm, t_max, nret, cfg);
        if (!orbit) return std::nullopt;
        return Node{p, orbit->x0, monitor(*orbit), *orbit};
    };

    auto cold = [&](double p) {
        return settle_orbit(make(p), seed0, t_settle, cfg);
    };

    auto as_event = [](const Node& node) {
        CycleEvent out;
        out.param = node.p;
        out.orbit = node.orbit;
        return out;
    };

    std::optional<Node> prev, a, b;
    for (int i = 0; i < n_scan; ++i) {
        const double p = lo + (hi - lo) * i / (n_scan - 1);
        auto cur = eval(p, prev ? prev->x0 : cold(p));
        if (!cur) {
            prev.reset();  // cycle not refinable here; rescan cold from the next node
            continue;
        }
        if (cur->m == 0.0) return as_event(*cur);  // monitor lands exactly on zero
        if (prev && ((prev->m > 0.0 && cur->m < 0.0) || (prev->m < 0.0 && cur->m > 0.0))) {
            a = prev;
            b = cur;
            break;
        }
        prev = cur;
    }
    if (!a) return std::nullopt;

    for (int it = 0; it < 200 && b->p - a->p > param_tol; ++it) {
        const auto mid = eval(0.5 * (a->p + b->p), a->x0);
        if (!mid) return std::nullopt;
        if (a->m * mid->m <= 0.0)
            b = mid;
        else
            a = mid;
    }
    CycleEvent out;
    out.param = 0.5 * (a->p + b->p);
    const auto root = eval(out.param, a->x0);
    if (!root) return std::nullopt;
    out.orbit = root->orbit;
    return out;
}

}  // namespace detail

// Node-to-focus transition of a stable cycle: bisection on the discriminant
// of the 2x2 section derivative.
template <class MakeFlow>
std::optional<CycleEvent> locate_cycle_focus_transition(
    MakeFlow&& make, double lo, double hi, const Vec3& seed, double t_settle,
    double t_max, IntegratorConfig cfg = {}, int n_scan = 11, double param_tol = 1e-8) {
    return detail::bisect_cycle_monitor(
        make, [](const PeriodicOrbit& o) { return o.disc; }, lo, hi, seed, t_settle,
        t_max, 1, cfg, n_scan, param_tol);
}

// Period doubling: a section multiplier passes through -1, detected as a zero
// of det(D) + tr(D) + 1. Criticality is probed empirically just past the
// root: a perturbed orbit either settles onto an alternating pair of returns
// (supercritical) or leaves a tube around the cycle (subcritical).
template <class MakeFlow>
std::optional<CycleEvent> locate_period_doubling(MakeFlow&& make, double lo, double hi,
                                                 const Vec3& seed, double t_settle,
                                                 double t_max, IntegratorConfig cfg = {},
                                                 int n_scan = 11,
                                                 double param_tol = 1e-8,
                                                 int probe_periods = 200,
                                                 double tube_radius = 0.5,
                                                 double settle_tol = 1e-3) {
    auto event = detail::bisect_cycle_monitor(
        make, [](const PeriodicOrbit& o) { return o.det + o.tr + 1.0; }, lo, hi, seed,
        t_settle, t_max, 1, cfg, n_scan, param_tol);
    if (!event) return std::nullopt;

    const double span = hi - lo;
    for (double side : {+1.0, -1.0}) {
        // far enough past the root that the probe resolves within the horizon
        const double p_past = event->param + side * span / 8.0;
        const auto flow = make(p_past);
        const auto orbit = refine_cycle(flow, event->orbit.x0, t_max, 1, cfg);
        if (!orbit) continue;
        if (orbit->det + orbit->tr + 1.0 >= 0.0) continue;  // not the unstable side

        Criticality verdict = Criticality::Undetermined;
        for (int axis = 0; axis < 2 && verdict == Criticality::Undetermined; ++axis) {
            const Vec3 dir = axis == 0 ? orbit->e1 : orbit->e2;
            const Vec3 start = orbit->x0 + 1e-4 * dir;
            const double horizon = probe_periods * orbit->period * 1.1;
            const auto returns = section_returns(flow, *orbit, start, horizon, cfg);
            if (returns.size() < 16) {
                verdict = Criticality::Subcritical;  // left the neighborhood early
                break;
            }
            const double u1 = dot(orbit->x0 - orbit->section_point, orbit->e1);
            const double u2 = dot(orbit->x0 - orbit->section_point, orbit->e2);
            bool escaped = false;
            for (const auto& [a, b] : returns)
                if (std::hypot(a - u1, b - u2) > tube_radius) escaped = true;
            if (escaped) {
                verdict = Criticality::Subcritical;
                break;
            }
            const std::size_t nret = returns.size();
            bool settled = true;
            for (std::size_t k = nret - std::min<std::size_t>(8, nret / 2); k + 2 < nret; ++k) {
                const double du1 = returns[k + 2].first - returns[k].first;
                const double du2 = returns[k + 2].second - returns[k].second;
                if (std::hypot(du1, du2) > settle_tol) settled = false;
            }
            const double moved = std::hypot(returns.back().first - u1,
                                            returns.back().second - u2);
            if (settled && moved > 1e-6) verdict = Criticality::Supercritical;
        }
        event->criticality = verdict;
        break;
    }
    return event;
}

}  // namespace spiral
