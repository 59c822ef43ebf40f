#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "oracle_eigen.hpp"
#include "spiral/eigen3.hpp"

using namespace spiral;

namespace {

// Worst pairing distance between two eigenvalue triples over all matchings.
double spectrum_distance(const Spectrum3& s, const std::array<Complex, 3>& ref) {
    int idx[3] = {0, 1, 2};
    double best = kInf;
    std::sort(idx, idx + 3);
    do {
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(s.ev[i] - ref[idx[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(idx, idx + 3));
    return best;
}

Mat3 random_matrix(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Mat3 m;
    for (auto& v : m.a) v = u(rng);
    return m;
}

}  // namespace

TEST_CASE("identity matrix has triple eigenvalue 1", "[eigen]") {
    const Spectrum3 s = eigenvalues_3x3(Mat3::identity());
    for (int i = 0; i < 3; ++i) {
        CHECK(s.ev[i].real() == Catch::Approx(1.0).margin(1e-14));
        CHECK(s.ev[i].imag() == Catch::Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("companion matrix of l^3+0.4l^2+l+0.4 gives {+i,-i,-0.4}", "[eigen]") {
    // rows ((0,1,0),(0,0,1),(-0.4,-1,-0.4))
    const Mat3 m = Mat3::from_rows({0, 1, 0}, {0, 0, 1}, {-0.4, -1.0, -0.4});
    const Spectrum3 s = eigenvalues_3x3(m, SpectrumOrder::Flow);
    const double d = spectrum_distance(s, {Complex(0, 1), Complex(0, -1), Complex(-0.4)});
    CHECK(d < 1e-10);
}

TEST_CASE("closed-form eigenvalues match QR iteration oracle on 200 random matrices",
          "[eigen][properties]") {
    std::mt19937 rng(20240817u);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat3 m = random_matrix(rng);
        const Spectrum3 s = eigenvalues_3x3(m);
        const auto ref = oracle::qr_eigenvalues(m);
        INFO("trial " << trial);
        CHECK(spectrum_distance(s, ref) < 1e-9);
    }
}

TEST_CASE("characteristic polynomial residual is tiny", "[eigen]") {
    std::mt19937 rng(7u);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat3 m = random_matrix(rng);
        const Spectrum3 s = eigenvalues_3x3(m);
        const CharCoeffs cc = char_coeffs(m);
        CHECK(charpoly_residual(m, s) < 1e-10 * cc.scale());
    }
}

TEST_CASE("spectra are closed under conjugation", "[eigen]") {
    std::mt19937 rng(99u);
    for (int trial = 0; trial < 100; ++trial) {
        const Spectrum3 s = eigenvalues_3x3(random_matrix(rng));
        Complex sum = s.ev[0] + s.ev[1] + s.ev[2];
        CHECK(std::abs(sum.imag()) < 1e-12);
        for (int i = 0; i < 3; ++i) {
            if (std::abs(s.ev[i].imag()) > 1e-12) {
                bool has_conj = false;
                for (int j = 0; j < 3; ++j)
                    if (j != i && std::abs(s.ev[j] - std::conj(s.ev[i])) < 1e-12)
                        has_conj = true;
                CHECK(has_conj);
            }
        }
    }
}

TEST_CASE("flow ordering is by descending real part, map ordering by modulus", "[eigen]") {
    std::mt19937 rng(3u);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat3 m = random_matrix(rng);
        const Spectrum3 f = eigenvalues_3x3(m, SpectrumOrder::Flow);
        CHECK(f.ev[0].real() >= f.ev[1].real() - 1e-15);
        CHECK(f.ev[1].real() >= f.ev[2].real() - 1e-15);
        const Spectrum3 g = eigenvalues_3x3(m, SpectrumOrder::Map);
        CHECK(std::abs(g.ev[0]) >= std::abs(g.ev[1]) - 1e-15);
        CHECK(std::abs(g.ev[1]) >= std::abs(g.ev[2]) - 1e-15);
    }
}

TEST_CASE("eigenvectors satisfy M v = lambda v", "[eigen]") {
    std::mt19937 rng(12u);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat3 m = random_matrix(rng);
        const Spectrum3 s = eigenvalues_3x3(m);
        for (int i = 0; i < 3; ++i) {
            const CVec3 v = eigenvector(m, s.ev[i]);
            double resid = 0.0;
            for (int r = 0; r < 3; ++r) {
                Complex mv(0.0);
                for (int c = 0; c < 3; ++c) mv += m(r, c) * v[c];
                resid = std::max(resid, std::abs(mv - s.ev[i] * v[r]));
            }
            CHECK(resid < 1e-7 * (1.0 + m.norm_inf()));
        }
    }
}

TEST_CASE("eigen plane normal is unit and orthogonal to the plane basis", "[eigen]") {
    const Mat3 m = Mat3::from_rows({0, 1, 0}, {0, 0, 1}, {-0.8, -1.0, -0.4});
    const Spectrum3 s = eigenvalues_3x3(m);
    const int ip = complex_pair_index(s);
    REQUIRE(ip >= 0);
    const EigenPlane p = eigen_plane(m, s.ev[ip]);
    CHECK(norm(p.n) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(dot(p.n, p.e1)) < 1e-12);
    CHECK(std::abs(dot(p.n, p.e2)) < 1e-12);
    CHECK(std::abs(dot(p.e1, p.e2)) < 1e-12);
}
