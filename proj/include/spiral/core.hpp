#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

namespace spiral {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when a run is configured inconsistently (unknown parameter, missing value).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised on non-finite or otherwise invalid numerical input.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an operation is invoked on an object of the wrong class
// (e.g. a separatrix of an equilibrium that has no 1D invariant manifold).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline double norm_inf(const Vec3& v) {
    return std::max(std::abs(v.x), std::max(std::abs(v.y), std::abs(v.z)));
}

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : v;
}

inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Flips v so that its first component of magnitude > 1e-12 is positive.
// Pins the otherwise arbitrary sign of eigenvectors and plane normals.
inline Vec3 sign_fixed(Vec3 v) {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0.0) v = -v;
            break;
        }
    }
    return v;
}

// 3x3 real matrix, row-major.
struct Mat3 {
    std::array<double, 9> a{};

    double& operator()(int r, int c) { return a[3 * r + c]; }
    double operator()(int r, int c) const { return a[3 * r + c]; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 m;
        for (int c = 0; c < 3; ++c) { m(0, c) = r0[c]; m(1, c) = r1[c]; m(2, c) = r2[c]; }
        return m;
    }

    static Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 m;
        for (int r = 0; r < 3; ++r) { m(r, 0) = c0[r]; m(r, 1) = c1[r]; m(r, 2) = c2[r]; }
        return m;
    }

    Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
    Vec3 col(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }

    Vec3 operator*(const Vec3& v) const {
        return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(r, k) * o(k, c);
                m(r, c) = s;
            }
        return m;
    }

    Mat3 operator+(const Mat3& o) const {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[i] = a[i] + o.a[i];
        return m;
    }

    Mat3 operator-(const Mat3& o) const {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[i] = a[i] - o.a[i];
        return m;
    }

    Mat3 operator*(double s) const {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[i] = a[i] * s;
        return m;
    }

    Mat3 transposed() const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = (*this)(c, r);
        return m;
    }

    double trace() const { return a[0] + a[4] + a[8]; }

    double det() const {
        return a[0] * (a[4] * a[8] - a[5] * a[7])
             - a[1] * (a[3] * a[8] - a[5] * a[6])
             + a[2] * (a[3] * a[7] - a[4] * a[6]);
    }

    double norm_inf() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

inline Mat3 outer(const Vec3& u, const Vec3& v) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = u[r] * v[c];
    return m;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
// Returns false for a (numerically) singular A.
inline bool solve3(const Mat3& A, const Vec3& b, Vec3& x) {
    double m[3][4] = {
        {A(0, 0), A(0, 1), A(0, 2), b.x},
        {A(1, 0), A(1, 1), A(1, 2), b.y},
        {A(2, 0), A(2, 1), A(2, 2), b.z},
    };
    for (int k = 0; k < 3; ++k) {
        int p = k;
        for (int r = k + 1; r < 3; ++r)
            if (std::abs(m[r][k]) > std::abs(m[p][k])) p = r;
        if (std::abs(m[p][k]) < 1e-300) return false;
        if (p != k)
            for (int c = k; c < 4; ++c) std::swap(m[p][c], m[k][c]);
        for (int r = k + 1; r < 3; ++r) {
            const double f = m[r][k] / m[k][k];
            for (int c = k; c < 4; ++c) m[r][c] -= f * m[k][c];
        }
    }
    for (int k = 2; k >= 0; --k) {
        double s = m[k][3];
        for (int c = k + 1; c < 3; ++c) s -= m[k][c] * ((&x.x)[c]);
        (&x.x)[k] = s / m[k][k];
    }
    return true;
}

// Inverse via column-wise solves; returns false if singular.
inline bool invert3(const Mat3& A, Mat3& out) {
    Vec3 c0, c1, c2;
    if (!solve3(A, {1, 0, 0}, c0)) return false;
    if (!solve3(A, {0, 1, 0}, c1)) return false;
    if (!solve3(A, {0, 0, 1}, c2)) return false;
    out = Mat3::from_cols(c0, c1, c2);
    return true;
}

// Solves the 2x2 system a x = b; returns false if singular.
inline bool solve2(double a00, double a01, double a10, double a11,
                   double b0, double b1, double& x0, double& x1) {
    const double d = a00 * a11 - a01 * a10;
    if (std::abs(d) < 1e-300) return false;
    x0 = (b0 * a11 - b1 * a01) / d;
    x1 = (a00 * b1 - a10 * b0) / d;
    return true;
}

// Deterministic orthonormal basis of the plane with normal n.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n_in) {
    const Vec3 n = normalized(n_in);
    const Vec3 a = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalized(cross(n, a));
    const Vec3 e2 = cross(n, e1);
    return {e1, e2};
}

// Gram-Schmidt pair: e1 along u, e2 the orthonormalized component of v.
inline std::pair<Vec3, Vec3> orthonormal_pair(const Vec3& u, const Vec3& v) {
    const Vec3 e1 = normalized(u);
    Vec3 w = v - dot(v, e1) * e1;
    return {e1, normalized(w)};
}

// Axis-aligned absorbing box.
struct Box {
    Vec3 lo{-kInf, -kInf, -kInf};
    Vec3 hi{kInf, kInf, kInf};

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }

    // Signed distance to the boundary along coordinate axes: positive inside.
    double margin(const Vec3& p) const {
        double m = kInf;
        for (int i = 0; i < 3; ++i) {
            m = std::min(m, p[i] - lo[i]);
            m = std::min(m, hi[i] - p[i]);
        }
        return m;
    }
};

}  // namespace spiral
