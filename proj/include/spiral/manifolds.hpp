#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "spiral/equilibria.hpp"
#include "spiral/integrate.hpp"

namespace spiral {

namespace detail {

// Index of the eigenvalue that sits alone on its side of the imaginary axis,
// or -1 when the spectrum does not split two against one. The lone eigenvalue
// of a real 3x3 matrix is necessarily real, so its eigenvector spans the
// one-dimensional invariant branch.
inline int lone_eigen_index(const Spectrum3& s) {
    int pos = 0;
    for (const Complex& l : s.ev)
        if (l.real() > 0.0) ++pos;
    if (pos != 1 && pos != 2) return -1;
    const bool want_pos = pos == 1;
    for (int i = 0; i < 3; ++i) {
        const Complex& l = s.ev[i];
        if ((l.real() > 0.0) == want_pos && std::abs(l.imag()) < 1e-8 * (1.0 + std::abs(l)))
            return i;
    }
    return -1;
}

}  // namespace detail

struct Separatrix {
    Trajectory traj;         // saddle end first; times carry the sign of time_sign
    double arc_length = 0.0;
    double time_sign = 1.0;  // +1 when the branch repels (followed forward), -1 when it attracts
    Vec3 direction;          // unit eigenvector of the lone real eigenvalue, sign-fixed
};

struct SeparatrixOptions {
    double delta = 1e-5;    // offset of the first point from the equilibrium
    double arc_cap = 1e4;   // stop once this much arc length has accumulated
    double t_cap = 1e4;
    IntegratorConfig cfg{};
};

// Follows the one-dimensional invariant branch of a saddle in its outgoing
// time direction: forward when the lone eigenvalue is unstable, backward when
// it is stable. Terminates on box exit, the arc cap, or the time cap.
template <FlowLike F>
Separatrix track_separatrix(const F& flow, const Equilibrium& eq, double side,
                            const SeparatrixOptions& opt = {}) {
    const int li = detail::lone_eigen_index(eq.spectrum);
    if (li < 0)
        throw PreconditionError("equilibrium has no one-dimensional invariant branch");
    const double lr = eq.spectrum.ev[li].real();

    Separatrix out;
    out.time_sign = lr > 0.0 ? 1.0 : -1.0;
    out.direction = real_eigenvector(flow.jac(eq.x), lr);
    const Vec3 x0 = eq.x + (side < 0.0 ? -opt.delta : opt.delta) * out.direction;

    IntegratorConfig cfg = opt.cfg;
    if (!cfg.box) cfg.box = flow.box();

    double arc = 0.0;
    Vec3 prev = x0;
    out.traj = integrate_stream(
        flow, x0, out.time_sign * opt.t_cap, cfg, {},
        [&](const DenseStep<3>& ds) {
            const Vec3 p = ds.head3_y1();
            arc += norm(p - prev);
            prev = p;
            return arc >= opt.arc_cap ? StepAction::Stop : StepAction::Continue;
        },
        true);
    out.arc_length = arc;
    return out;
}

struct SurfaceRing {
    std::vector<Trajectory> rays;
    EigenPlane plane;
    double time_sign = 1.0;
};

// Grows the two-dimensional invariant surface spanned by the spiral pair as a
// ring of orbits seeded on a small circle in the eigenplane, integrated in the
// pair's expanding time direction.
template <FlowLike F>
SurfaceRing grow_spiral_surface(const F& flow, const Equilibrium& eq, int n_rays = 16,
                                double delta = 1e-5, double t_max = 100.0,
                                IntegratorConfig cfg = {}) {
    const int pi = complex_pair_index(eq.spectrum);
    if (!genuine_pair(eq.spectrum, pi))
        throw PreconditionError("surface growth needs a genuine complex pair");
    SurfaceRing out;
    out.time_sign = eq.spectrum.ev[pi].real() > 0.0 ? 1.0 : -1.0;
    out.plane = eigen_plane(flow.jac(eq.x), eq.spectrum.ev[pi]);
    if (!cfg.box) cfg.box = flow.box();
    out.rays.reserve(static_cast<std::size_t>(n_rays));
    for (int k = 0; k < n_rays; ++k) {
        const double th = 2.0 * kPi * k / n_rays;
        const Vec3 x0 =
            eq.x + delta * (std::cos(th) * out.plane.e1 + std::sin(th) * out.plane.e2);
        out.rays.push_back(integrate(flow, x0, out.time_sign * t_max, cfg));
    }
    return out;
}

}  // namespace spiral
