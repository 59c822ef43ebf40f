#pragma once

#include <algorithm>
#include <complex>

#include "spiral/core.hpp"

namespace spiral {

using Complex = std::complex<double>;
using CVec3 = std::array<Complex, 3>;

// Three eigenvalues, closed under conjugation for real input matrices.
struct Spectrum3 {
    std::array<Complex, 3> ev{};

    Complex operator[](int i) const { return ev[i]; }
    Complex& operator[](int i) { return ev[i]; }
};

enum class SpectrumOrder { Flow, Map };

// Coefficients of det(M - lambda I) = -(lambda^3 - c2 lambda^2 + c1 lambda - c0).
struct CharCoeffs {
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;

    Complex eval(Complex l) const { return ((l - c2) * l + c1) * l - c0; }
    Complex deriv(Complex l) const { return (3.0 * l - 2.0 * c2) * l + c1; }
    double scale() const { return 1.0 + std::abs(c2) + std::abs(c1) + std::abs(c0); }
};

inline CharCoeffs char_coeffs(const Mat3& m) {
    CharCoeffs c;
    c.c2 = m.trace();
    c.c1 = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) +
           (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
           (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
    c.c0 = m.det();
    return c;
}

namespace detail {

// One-step Newton polish of a root on the exact characteristic cubic.
// Complex roots are polished as a pair to keep conjugate closure exact.
inline Complex polish_root(const CharCoeffs& c, Complex l) {
    for (int it = 0; it < 2; ++it) {
        const Complex d = c.deriv(l);
        if (std::abs(d) < 1e-300) break;
        const Complex step = c.eval(l) / d;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        l -= step;
    }
    return l;
}

}  // namespace detail

// Roots of lambda^3 - c2 lambda^2 + c1 lambda - c0 = 0: the trigonometric
// branch for three real roots, Cardano otherwise, then a Newton polish.
// Output is unsorted; conjugate pairs are exact.
inline Spectrum3 solve_char_cubic(const CharCoeffs& cc) {
    const double s = cc.c2 / 3.0;
    // depressed cubic t^3 + p t + q with lambda = t + s
    const double p = cc.c1 - cc.c2 * cc.c2 / 3.0;
    const double q = -2.0 * cc.c2 * cc.c2 * cc.c2 / 27.0 + cc.c1 * cc.c2 / 3.0 - cc.c0;

    Spectrum3 out;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (p == 0.0 && q == 0.0) {
        out.ev = {Complex(s), Complex(s), Complex(s)};
        return out;
    }
    if (disc >= 0.0) {
        // three real roots; p < 0 is guaranteed here
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k) {
            const double t = m * std::cos((phi - 2.0 * kPi * k) / 3.0);
            out.ev[k] = Complex(detail::polish_root(cc, Complex(t + s)).real());
        }
        return out;
    }
    // one real root + conjugate pair
    const double D = q * q / 4.0 + p * p * p / 27.0;  // > 0 here
    const double sq = std::sqrt(D);
    // take the well-conditioned cube root first to avoid cancellation
    const double u = std::cbrt(-q / 2.0 + (q <= 0.0 ? sq : -sq));
    const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
    const double t1 = u + v;
    double lr = detail::polish_root(cc, Complex(t1 + s)).real();
    // remaining quadratic factor t^2 + t1 t + (t1^2 + p)
    const double tre = -t1 / 2.0 + s;
    const double tim = std::sqrt(std::max(0.0, 3.0 * t1 * t1 + 4.0 * p)) / 2.0;
    Complex pair = detail::polish_root(cc, Complex(tre, tim));
    if (pair.imag() < 0.0) pair = std::conj(pair);
    out.ev = {Complex(lr), pair, std::conj(pair)};
    return out;
}

// Sorts: flows by descending real part, maps by descending modulus;
// ties broken by ascending imaginary part.
inline void sort_spectrum(Spectrum3& s, SpectrumOrder order) {
    auto key_less = [order](const Complex& a, const Complex& b) {
        const double ka = (order == SpectrumOrder::Flow) ? a.real() : std::abs(a);
        const double kb = (order == SpectrumOrder::Flow) ? b.real() : std::abs(b);
        if (ka != kb) return ka > kb;
        return a.imag() < b.imag();
    };
    std::sort(s.ev.begin(), s.ev.end(), key_less);
}

inline Spectrum3 eigenvalues_3x3(const Mat3& m, SpectrumOrder order = SpectrumOrder::Flow) {
    Spectrum3 s = solve_char_cubic(char_coeffs(m));
    sort_spectrum(s, order);
    return s;
}

inline double charpoly_residual(const Mat3& m, const Spectrum3& s) {
    const CharCoeffs cc = char_coeffs(m);
    double r = 0.0;
    for (const Complex& l : s.ev) r = std::max(r, std::abs(cc.eval(l)));
    return r;
}

namespace detail {

inline CVec3 ccross(const CVec3& a, const CVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double cnorm(const CVec3& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

}  // namespace detail

// Eigenvector of m for eigenvalue l, as the kernel of (m - l I) obtained from
// cross products of its rows. Unit norm; phase pinned so the component of
// largest modulus is real and positive.
inline CVec3 eigenvector(const Mat3& m, Complex l) {
    CVec3 rows[3];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) rows[r][c] = Complex(m(r, c));
        rows[r][r] -= l;
    }
    const CVec3 cands[3] = {
        detail::ccross(rows[0], rows[1]),
        detail::ccross(rows[1], rows[2]),
        detail::ccross(rows[0], rows[2]),
    };
    int best = 0;
    double bn = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double n = detail::cnorm(cands[i]);
        if (n > bn) { bn = n; best = i; }
    }
    CVec3 v = cands[best];
    if (bn > 0.0)
        for (auto& c : v) c /= bn;
    int big = 0;
    double bm = -1.0;
    for (int i = 0; i < 3; ++i)
        if (std::abs(v[i]) > bm) { bm = std::abs(v[i]); big = i; }
    if (bm > 1e-300) {
        const Complex phase = std::conj(v[big]) / std::abs(v[big]);
        for (auto& c : v) c *= phase;
    }
    return v;
}

// Real eigenvector for a real eigenvalue, sign-fixed.
inline Vec3 real_eigenvector(const Mat3& m, double l) {
    const CVec3 v = eigenvector(m, Complex(l));
    return sign_fixed(normalized(Vec3{v[0].real(), v[1].real(), v[2].real()}));
}

// Real and imaginary parts of a complex eigenvector span the invariant plane.
struct EigenPlane {
    Vec3 e1, e2;  // orthonormal basis of the plane
    Vec3 n;       // unit normal, sign-fixed
};

inline EigenPlane eigen_plane(const Mat3& m, Complex l) {
    const CVec3 v = eigenvector(m, l);
    const Vec3 re{v[0].real(), v[1].real(), v[2].real()};
    const Vec3 im{v[0].imag(), v[1].imag(), v[2].imag()};
    EigenPlane p;
    p.n = sign_fixed(normalized(cross(re, im)));
    auto [e1, e2] = orthonormal_pair(re, im);
    p.e1 = e1;
    p.e2 = e2;
    return p;
}

// Index of the complex-pair member with positive imaginary part, or -1 if the
// spectrum is entirely real.
inline int complex_pair_index(const Spectrum3& s) {
    int best = -1;
    double bi = 1e-9;
    for (int i = 0; i < 3; ++i)
        if (s.ev[i].imag() > bi) { bi = s.ev[i].imag(); best = i; }
    return best;
}

// Index of the eigenvalue with the smallest |imaginary part| (the real one
// when the spectrum has a conjugate pair).
inline int real_eig_index(const Spectrum3& s) {
    int best = 0;
    double bi = kInf;
    for (int i = 0; i < 3; ++i)
        if (std::abs(s.ev[i].imag()) < bi) { bi = std::abs(s.ev[i].imag()); best = i; }
    return best;
}

}  // namespace spiral
