#pragma once

#include <optional>
#include <vector>

#include "spiral/eigen3.hpp"
#include "spiral/systems.hpp"

namespace spiral {

enum class PointType {
    Stable,
    Unstable,
    SaddleFocus21,  // stable complex pair, one unstable real direction
    SaddleFocus12,  // one stable real direction, unstable complex pair
    Saddle,         // all-real saddle
    NonHyperbolic,
};

inline const char* to_string(PointType t) {
    switch (t) {
        case PointType::Stable: return "stable";
        case PointType::Unstable: return "unstable";
        case PointType::SaddleFocus21: return "saddle-focus(2,1)";
        case PointType::SaddleFocus12: return "saddle-focus(1,2)";
        case PointType::Saddle: return "saddle";
        case PointType::NonHyperbolic: return "non-hyperbolic";
    }
    return "?";
}

struct FlowClassification {
    PointType type = PointType::NonHyperbolic;
    bool focal = false;          // a genuine complex pair is present
    double saddle_value = 0.0;   // Re(pair) + real eigenvalue, saddle-focus only
};

inline bool genuine_pair(const Spectrum3& s, int pi) {
    return pi >= 0 && s.ev[pi].imag() > 1e-8 * (1.0 + std::abs(s.ev[pi]));
}

inline FlowClassification classify_flow_spectrum(const Spectrum3& s, double tol = 1e-8) {
    FlowClassification out;
    const int pi = complex_pair_index(s);
    out.focal = genuine_pair(s, pi);
    for (const Complex& l : s.ev)
        if (std::abs(l.real()) < tol) return out;  // NonHyperbolic

    int n_unstable = 0;
    for (const Complex& l : s.ev)
        if (l.real() > 0.0) ++n_unstable;

    if (out.focal) {
        const double re_pair = s.ev[pi].real();
        const double re_real = s.ev[real_eig_index(s)].real();
        if (re_pair < 0.0 && re_real > 0.0) {
            out.type = PointType::SaddleFocus21;
            out.saddle_value = re_pair + re_real;
        } else if (re_pair > 0.0 && re_real < 0.0) {
            out.type = PointType::SaddleFocus12;
            out.saddle_value = re_pair + re_real;
        } else {
            out.type = n_unstable == 0 ? PointType::Stable : PointType::Unstable;
        }
    } else {
        out.type = n_unstable == 0   ? PointType::Stable
                   : n_unstable == 3 ? PointType::Unstable
                                     : PointType::Saddle;
    }
    return out;
}

struct MapClassification {
    PointType type = PointType::NonHyperbolic;
    bool focal = false;
};

inline MapClassification classify_map_spectrum(const Spectrum3& s, double tol = 1e-8) {
    MapClassification out;
    out.focal = genuine_pair(s, complex_pair_index(s));
    for (const Complex& l : s.ev)
        if (std::abs(std::abs(l) - 1.0) < tol) return out;
    int n_unstable = 0;
    for (const Complex& l : s.ev)
        if (std::abs(l) > 1.0) ++n_unstable;
    out.type = n_unstable == 0   ? PointType::Stable
               : n_unstable == 3 ? PointType::Unstable
                                 : PointType::Saddle;
    return out;
}

struct Equilibrium {
    Vec3 x;
    Spectrum3 spectrum;  // flow-ordered
    FlowClassification cls;
};

// Damped Newton on the vector field; steps are halved until the residual
// decreases. Returns nothing on singular Jacobians or stalled damping.
template <FlowLike F>
std::optional<Vec3> newton_equilibrium(const F& flow, Vec3 x, int max_iter = 50) {
    for (int it = 0; it < max_iter; ++it) {
        const Vec3 f = flow.rhs(x);
        const double fn = norm_inf(f);
        if (fn < 1e-13 * (1.0 + norm_inf(x))) return x;
        Vec3 dx;
        if (!solve3(flow.jac(x), -1.0 * f, dx)) return std::nullopt;
        bool moved = false;
        double lam = 1.0;
        for (int h = 0; h < 30; ++h) {
            const Vec3 xn = x + lam * dx;
            if (finite(xn) && norm_inf(flow.rhs(xn)) < fn) {
                x = xn;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!moved) break;
    }
    if (norm_inf(flow.rhs(x)) < 1e-10 * (1.0 + norm_inf(x))) return x;
    return std::nullopt;
}

inline double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

template <FlowLike F>
Equilibrium classify_equilibrium(const F& flow, const Vec3& x) {
    Equilibrium eq;
    eq.x = x;
    eq.spectrum = eigenvalues_3x3(flow.jac(x), SpectrumOrder::Flow);
    eq.cls = classify_flow_spectrum(eq.spectrum);
    return eq;
}

// Deterministic multistart search: Halton seeds over the system box, damped
// Newton, dedup at 1e-8, lexicographic order.
template <FlowLike F>
std::vector<Equilibrium> find_equilibria(const F& flow, int n_seeds = 200) {
    const Box bx = flow.box();
    std::vector<Vec3> roots;
    for (int i = 1; i <= n_seeds; ++i) {
        const Vec3 seed{bx.lo.x + (bx.hi.x - bx.lo.x) * halton(i, 2),
                        bx.lo.y + (bx.hi.y - bx.lo.y) * halton(i, 3),
                        bx.lo.z + (bx.hi.z - bx.lo.z) * halton(i, 5)};
        const auto r = newton_equilibrium(flow, seed);
        if (!r || !bx.contains(*r)) continue;
        bool dup = false;
        for (const Vec3& q : roots)
            if (norm_inf(*r - q) < 1e-8) dup = true;
        if (!dup) roots.push_back(*r);
    }
    std::sort(roots.begin(), roots.end(), [](const Vec3& a, const Vec3& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (const Vec3& r : roots) out.push_back(classify_equilibrium(flow, r));
    return out;
}

struct FixedPoint {
    Vec3 x;
    int period = 1;
    Spectrum3 multipliers;  // modulus-ordered
    MapClassification cls;
};

template <MapLike M>
Mat3 orbit_jacobian(const M& map, Vec3 x, int period) {
    Mat3 J = Mat3::identity();
    for (int i = 0; i < period; ++i) {
        J = map.jac(x) * J;
        x = map.step(x);
    }
    return J;
}

template <MapLike M>
Vec3 iterate_map(const M& map, Vec3 x, long long n) {
    for (long long i = 0; i < n; ++i) x = map.step(x);
    return x;
}

template <MapLike M>
std::optional<Vec3> newton_fixed_point(const M& map, Vec3 x, int period = 1,
                                       int max_iter = 50) {
    auto residual = [&](const Vec3& p) -> std::optional<Vec3> {
        const Vec3 fp = iterate_map(map, p, period);
        if (!finite(fp)) return std::nullopt;
        return fp - p;
    };
    auto g0 = residual(x);
    if (!g0) return std::nullopt;
    for (int it = 0; it < max_iter; ++it) {
        const auto g = residual(x);
        if (!g) return std::nullopt;
        const double gn = norm_inf(*g);
        if (gn < 1e-12 * (1.0 + norm_inf(x))) return x;
        const Mat3 A = orbit_jacobian(map, x, period) - Mat3::identity();
        Vec3 dx;
        if (!solve3(A, -1.0 * (*g), dx)) return std::nullopt;
        bool moved = false;
        double lam = 1.0;
        for (int h = 0; h < 30; ++h) {
            const Vec3 xn = x + lam * dx;
            const auto gp = residual(xn);
            if (gp && norm_inf(*gp) < gn) {
                x = xn;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!moved) break;
    }
    const auto g = residual(x);
    if (g && norm_inf(*g) < 1e-10 * (1.0 + norm_inf(x))) return x;
    return std::nullopt;
}

template <MapLike M>
FixedPoint classify_fixed_point(const M& map, const Vec3& x, int period = 1) {
    FixedPoint fp;
    fp.x = x;
    fp.period = period;
    fp.multipliers =
        eigenvalues_3x3(orbit_jacobian(map, x, period), SpectrumOrder::Map);
    fp.cls = classify_map_spectrum(fp.multipliers);
    return fp;
}

// Fixed points of quadratic maps live near the coefficient scale, so the
// seed window is the system box clipped to a +-10 cube.
template <MapLike M>
std::vector<FixedPoint> find_fixed_points(const M& map, int period = 1,
                                          int n_seeds = 200) {
    const Box bx = map.box();
    Box win;
    for (int i = 0; i < 3; ++i) {
        win.lo[i] = std::max(bx.lo[i], -10.0);
        win.hi[i] = std::min(bx.hi[i], 10.0);
    }
    std::vector<Vec3> roots;
    for (int i = 1; i <= n_seeds; ++i) {
        const Vec3 seed{win.lo.x + (win.hi.x - win.lo.x) * halton(i, 2),
                        win.lo.y + (win.hi.y - win.lo.y) * halton(i, 3),
                        win.lo.z + (win.hi.z - win.lo.z) * halton(i, 5)};
        const auto r = newton_fixed_point(map, seed, period);
        if (!r || !bx.contains(*r)) continue;
        bool dup = false;
        for (const Vec3& q : roots)
            if (norm_inf(*r - q) < 1e-8) dup = true;
        if (!dup) roots.push_back(*r);
    }
    std::sort(roots.begin(), roots.end(), [](const Vec3& a, const Vec3& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
    std::vector<FixedPoint> out;
    out.reserve(roots.size());
    for (const Vec3& r : roots) out.push_back(classify_fixed_point(map, r, period));
    return out;
}

struct HopfPoint {
    double param = 0.0;
    Vec3 x;
    double omega = 0.0;  // |Im| of the critical pair
};

// Bisection on the real part of the complex pair of a tracked equilibrium.
// make(p) must return the flow at parameter value p; the equilibrium is
// followed by warm-started Newton from `guess`.
template <class MakeFlow>
std::optional<HopfPoint> locate_hopf(MakeFlow&& make, double lo, double hi, Vec3 guess,
                                     double param_tol = 1e-10) {
    auto eval = [&](double p, Vec3& warm) -> std::optional<double> {
        const auto flow = make(p);
        const auto x = newton_equilibrium(flow, warm);
        if (!x) return std::nullopt;
        warm = *x;
        const Spectrum3 s =
            eigenvalues_3x3(flow.jac(*x), SpectrumOrder::Flow);
        const int pi = complex_pair_index(s);
        if (!genuine_pair(s, pi)) return std::nullopt;
        return s.ev[pi].real();
    };

    Vec3 wa = guess, wb = guess;
    const auto ga = eval(lo, wa);
    const auto gb = eval(hi, wb);
    if (!ga || !gb || *ga * *gb > 0.0) return std::nullopt;

    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > param_tol; ++it) {
        const double mid = 0.5 * (a + b);
        Vec3 wm = wa;
        const auto gm = eval(mid, wm);
        if (!gm) return std::nullopt;
        if (*ga * *gm <= 0.0) {
            b = mid;
            wb = wm;
        } else {
            a = mid;
            wa = wm;
        }
    }

    HopfPoint out;
    out.param = 0.5 * (a + b);
    Vec3 w = wa;
    const auto flow = make(out.param);
    const auto x = newton_equilibrium(flow, w);
    if (!x) return std::nullopt;
    out.x = *x;
    const Spectrum3 s = eigenvalues_3x3(flow.jac(*x), SpectrumOrder::Flow);
    const int pi = complex_pair_index(s);
    if (!genuine_pair(s, pi)) return std::nullopt;
    out.omega = std::abs(s.ev[pi].imag());
    return out;
}

enum class BoundaryKind { Fold, Flip, NeimarkSacker };

inline const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::Fold: return "fold";
        case BoundaryKind::Flip: return "flip";
        case BoundaryKind::NeimarkSacker: return "neimark-sacker";
    }
    return "?";
}

struct BoundaryPoint {
    double param = 0.0;
    BoundaryKind kind = BoundaryKind::Fold;
    Vec3 x;
    Spectrum3 multipliers;
};

inline double ns_monitor(const Spectrum3& s) {
    Complex prod{1.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) prod *= s.ev[i] * s.ev[j] - 1.0;
    return prod.real();
}

// Sweeps the fixed point of make(p) over [lo, hi] watching three boundary
// monitors (multiplier at +1, at -1, and on the unit circle); sign changes
// are bisected and each root is validated against its critical multiplier.
template <class MakeMap>
std::vector<BoundaryPoint> scan_map_boundaries(MakeMap&& make, Vec3 guess, double lo,
                                               double hi, int n_scan = 201,
                                               double param_tol = 1e-10) {
    struct Sample {
        double p;
        Vec3 x;
        double m[3];
        bool ok;
    };
    auto eval = [&](double p, Vec3 warm) -> Sample {
        Sample s{p, warm, {0, 0, 0}, false};
        const auto map = make(p);
        const auto x = newton_fixed_point(map, warm);
        if (!x) return s;
        s.x = *x;
        const Mat3 J = map.jac(*x);
        const CharCoeffs cc = char_coeffs(J);
        Spectrum3 mult = solve_char_cubic(cc);
        sort_spectrum(mult, SpectrumOrder::Map);
        s.m[0] = cc.eval(Complex{1.0, 0.0}).real();    // vanishes at a +1 multiplier
        s.m[1] = -cc.eval(Complex{-1.0, 0.0}).real();  // vanishes at a -1 multiplier
        s.m[2] = ns_monitor(mult);
        s.ok = true;
        return s;
    };

    std::vector<BoundaryPoint> out;
    Sample prev = eval(lo, guess);
    for (int i = 1; i < n_scan; ++i) {
        const double p = lo + (hi - lo) * i / (n_scan - 1);
        const Sample cur = eval(p, prev.ok ? prev.x : guess);
        if (prev.ok && cur.ok) {
            for (int mi = 0; mi < 3; ++mi) {
                const bool crossing = (prev.m[mi] > 0.0 && cur.m[mi] < 0.0) ||
                                      (prev.m[mi] < 0.0 && cur.m[mi] > 0.0);
                const bool hit_here = cur.m[mi] == 0.0;
                const bool hit_first = i == 1 && prev.m[mi] == 0.0;
                if (!crossing && !hit_here && !hit_first) continue;
                Sample root = hit_here ? cur : prev;
                if (crossing) {
                    Sample a = prev, b = cur;
                    for (int it = 0; it < 200 && b.p - a.p > param_tol; ++it) {
                        const Sample mid = eval(0.5 * (a.p + b.p), a.x);
                        if (!mid.ok) break;
                        if (a.m[mi] * mid.m[mi] <= 0.0)
                            b = mid;
                        else
                            a = mid;
                    }
                    root = eval(0.5 * (a.p + b.p), a.x);
                }
                if (!root.ok) continue;
                const auto map = make(root.p);
                const Spectrum3 mult =
                    eigenvalues_3x3(map.jac(root.x), SpectrumOrder::Map);
                BoundaryPoint bp;
                bp.param = root.p;
                bp.x = root.x;
                bp.multipliers = mult;
                bool valid = false;
                if (mi == 0) {
                    bp.kind = BoundaryKind::Fold;
                    for (const Complex& l : mult.ev)
                        if (std::abs(l - Complex{1.0, 0.0}) < 1e-6) valid = true;
                } else if (mi == 1) {
                    bp.kind = BoundaryKind::Flip;
                    for (const Complex& l : mult.ev)
                        if (std::abs(l + Complex{1.0, 0.0}) < 1e-6) valid = true;
                } else {
                    bp.kind = BoundaryKind::NeimarkSacker;
                    const int pi = complex_pair_index(mult);
                    valid = genuine_pair(mult, pi) &&
                            std::abs(std::abs(mult.ev[pi]) - 1.0) < 1e-6;
                }
                if (valid) out.push_back(bp);
            }
        }
        prev = cur;
    }
    std::sort(out.begin(), out.end(),
              [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.param < b.param; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const BoundaryPoint& a, const BoundaryPoint& b) {
                              return a.kind == b.kind && std::abs(a.param - b.param) < 1e-9;
                          }),
              out.end());
    return out;
}

}  // namespace spiral
