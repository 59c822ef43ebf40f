#pragma once

// Brute-force eigenvalue oracle for 3x3 real matrices: Hessenberg reduction
// followed by shifted QR iteration until a subdiagonal entry deflates, with
// 1x1 / 2x2 blocks then solved exactly. Shares no code with the closed-form
// solver under test.

#include <array>
#include <cmath>
#include <complex>

#include "spiral/core.hpp"

namespace oracle {

using spiral::Mat3;
using Cx = std::complex<double>;

// Eigenvalues of [[a,b],[c,d]] from the quadratic formula.
inline std::array<Cx, 2> eig2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return {Cx(tr / 2.0 + s), Cx(tr / 2.0 - s)};
    }
    const double im = std::sqrt(-disc);
    return {Cx(tr / 2.0, im), Cx(tr / 2.0, -im)};
}

// Similarity rotation in the (i,j) plane: A <- G A G^T with G chosen from (c,s).
inline void rotate_sim(Mat3& A, int i, int j, double c, double s) {
    for (int k = 0; k < 3; ++k) {
        const double vi = A(i, k), vj = A(j, k);
        A(i, k) = c * vi + s * vj;
        A(j, k) = -s * vi + c * vj;
    }
    for (int k = 0; k < 3; ++k) {
        const double vi = A(k, i), vj = A(k, j);
        A(k, i) = c * vi + s * vj;
        A(k, j) = -s * vi + c * vj;
    }
}

inline std::array<Cx, 3> qr_eigenvalues(Mat3 A) {
    // Hessenberg: zero A(2,0) by a (1,2)-plane rotation
    {
        const double r = std::hypot(A(1, 0), A(2, 0));
        if (r > 1e-300) rotate_sim(A, 1, 2, A(1, 0) / r, A(2, 0) / r);
    }
    const double scale = A.norm_inf() + 1.0;
    const double tol = 1e-15 * scale;

    for (int iter = 0; iter < 2000; ++iter) {
        if (std::abs(A(2, 1)) < tol) {
            auto p = eig2(A(0, 0), A(0, 1), A(1, 0), A(1, 1));
            return {p[0], p[1], Cx(A(2, 2))};
        }
        if (std::abs(A(1, 0)) < tol) {
            auto p = eig2(A(1, 1), A(1, 2), A(2, 1), A(2, 2));
            return {Cx(A(0, 0)), p[0], p[1]};
        }
        // Wilkinson-style shift from the trailing 2x2; exceptional shift on stall
        double shift;
        if (iter % 31 == 30) {
            shift = A(2, 2) + 0.75 * std::abs(A(2, 1));
        } else {
            auto p = eig2(A(1, 1), A(1, 2), A(2, 1), A(2, 2));
            if (p[0].imag() != 0.0) {
                shift = p[0].real();
            } else {
                shift = (std::abs(p[0].real() - A(2, 2)) < std::abs(p[1].real() - A(2, 2)))
                            ? p[0].real()
                            : p[1].real();
            }
        }
        // QR step on the shifted Hessenberg matrix via two Givens rotations
        Mat3 B = A;
        for (int d = 0; d < 3; ++d) B(d, d) -= shift;
        double c1 = 1.0, s1 = 0.0, c2 = 1.0, s2 = 0.0;
        {
            const double r = std::hypot(B(0, 0), B(1, 0));
            if (r > 1e-300) { c1 = B(0, 0) / r; s1 = B(1, 0) / r; }
            for (int k = 0; k < 3; ++k) {
                const double v0 = B(0, k), v1 = B(1, k);
                B(0, k) = c1 * v0 + s1 * v1;
                B(1, k) = -s1 * v0 + c1 * v1;
            }
        }
        {
            const double r = std::hypot(B(1, 1), B(2, 1));
            if (r > 1e-300) { c2 = B(1, 1) / r; s2 = B(2, 1) / r; }
            for (int k = 0; k < 3; ++k) {
                const double v1 = B(1, k), v2 = B(2, k);
                B(1, k) = c2 * v1 + s2 * v2;
                B(2, k) = -s2 * v1 + c2 * v2;
            }
        }
        // A' = R G1^T G2^T + shift I
        for (int k = 0; k < 3; ++k) {
            const double v0 = B(k, 0), v1 = B(k, 1);
            B(k, 0) = c1 * v0 + s1 * v1;
            B(k, 1) = -s1 * v0 + c1 * v1;
        }
        for (int k = 0; k < 3; ++k) {
            const double v1 = B(k, 1), v2 = B(k, 2);
            B(k, 1) = c2 * v1 + s2 * v2;
            B(k, 2) = -s2 * v1 + c2 * v2;
        }
        for (int d = 0; d < 3; ++d) B(d, d) += shift;
        A = B;
    }
    // fallback: report whatever the iteration settled on
    auto p = eig2(A(1, 1), A(1, 2), A(2, 1), A(2, 2));
    return {Cx(A(0, 0)), p[0], p[1]};
}

}  // namespace oracle
