#include <catch2/catch_amalgamated.hpp>

#include "spiral/chaos.hpp"
#include "spiral/systems.hpp"

using namespace spiral;

TEST_CASE("spectrum taxonomy honours the dead band", "[chaos]") {
    CHECK(classify_spectrum({0.02, 0.0, -0.4}, true) == AttractorKind::Chaotic);
    CHECK(classify_spectrum({0.0005, -0.2, -0.4}, true) == AttractorKind::Cycle);
    CHECK(classify_spectrum({0.0005, -0.0002, -0.4}, true) == AttractorKind::Torus);
    CHECK(classify_spectrum({-0.01, -0.2, -0.4}, true) == AttractorKind::Point);
    CHECK(classify_spectrum({0.0005, -0.2, -0.4}, false) == AttractorKind::Curve);
    CHECK(classify_spectrum({-0.01, -0.2, -0.4}, false) == AttractorKind::Point);
    CHECK(classify_spectrum({0.02, -0.2, -0.4}, false) == AttractorKind::Chaotic);
}

TEST_CASE("map exponents satisfy the volume identity", "[chaos][properties]") {
    {
        const MiraCMap map{1.49, 0.5, -1.8};
        const LyapunovResult r = lyapunov_map(map, {0.01, 0.01, 0.01}, 10000, 200000);
        REQUIRE(r.reason == Termination::TimeReached);
        const double sum = r.lam[0] + r.lam[1] + r.lam[2];
        CHECK(std::abs(sum - std::log(0.5)) < 1e-3);
        CHECK(r.lam[0] > 1e-3);
        CHECK(r.drift < 1e-2);
    }
    {
        const MiraCMap map{-2.786, -0.915, -2.743};
        const LyapunovResult r = lyapunov_map(map, {0.01, 0.01, 0.01}, 10000, 200000);
        REQUIRE(r.reason == Termination::TimeReached);
        const double sum = r.lam[0] + r.lam[1] + r.lam[2];
        CHECK(std::abs(sum - std::log(0.915)) < 1e-3);
        CHECK(r.lam[0] > 1e-3);
    }
}

TEST_CASE("map attractor kinds across the rotation route", "[chaos]") {
    auto kind = [](double C) {
        const MiraCMap map{1.49, 0.5, C};
        return classify_attractor(map, {0.01, 0.01, 0.01}, 10000, 200000).kind;
    };
    CHECK(kind(-1.4) == AttractorKind::Point);
    CHECK(kind(-1.6) == AttractorKind::Curve);
    CHECK(kind(-1.8) == AttractorKind::Chaotic);
}

TEST_CASE("flow exponents satisfy the divergence identity", "[chaos][slow]") {
    const ActFlow flow{0.84, 0.4};
    const Vec3 seed{1.01, 0.0, 0.0};
    const LyapunovResult r = lyapunov_flow(flow, seed, 500.0, 20000.0);
    REQUIRE(r.reason == Termination::TimeReached);
    const double sum = r.lam[0] + r.lam[1] + r.lam[2];
    CHECK(std::abs(sum + 0.4) < 1e-2);
    CHECK(r.lam[0] > 0.05);
    CHECK(r.lam[0] < 0.15);
    CHECK(std::abs(r.lam[1]) < 2e-3);
    CHECK(classify_spectrum(r.lam, true) == AttractorKind::Chaotic);
}

TEST_CASE("flow attractor kinds below the chaotic regime", "[chaos]") {
    {
        const ActFlow flow{0.5, 0.4};
        const AttractorScan s = classify_attractor(flow, {1.01, 0.0, 0.0}, 300.0, 5000.0);
        CHECK(s.kind == AttractorKind::Cycle);
    }
    {
        const ActFlow flow{0.35, 0.4};
        const AttractorScan s = classify_attractor(flow, {1.01, 0.0, 0.0}, 300.0, 5000.0);
        CHECK(s.kind == AttractorKind::Point);
    }
    {
        const ActFlow flow{0.8, 0.4};
        const AttractorScan s = classify_attractor(flow, {10.0, 10.0, 10.0}, 50.0, 100.0);
        CHECK(s.kind == AttractorKind::Diverged);
    }
}

TEST_CASE("a periodic window hides behind a long chaotic transient", "[chaos][slow]") {
    const ActFlow flow{0.8, 0.4};
    const LyapunovResult r = lyapunov_flow(flow, {1.01, 0.0, 0.0}, 3000.0, 60000.0);
    REQUIRE(r.reason == Termination::TimeReached);
    CHECK(r.lam[0] < 1e-3);
    CHECK(r.lam[1] < -0.05);
    CHECK(classify_spectrum(r.lam, true) == AttractorKind::Cycle);
}

TEST_CASE("piece separation splits alternating clusters", "[chaos]") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 2000; ++i) {
        const double j1 = 0.01 * std::sin(0.137 * i);
        const double j2 = 0.01 * std::cos(0.251 * i);
        const Vec3 base = (i % 2 == 0) ? Vec3{0, 0, 0} : Vec3{10, 0, 0};
        pts.push_back(base + Vec3{j1, j2, 0.01 * std::sin(0.073 * i + 1.0)});
    }
    const double mednn = detail::median_nn_distance(pts);
    CHECK(mednn > 0.0);
    CHECK(detail::piece_count(pts, mednn) == 2);
}

TEST_CASE("radial gap clustering counts nested rings", "[chaos]") {
    std::vector<double> theta, radius;
    for (int i = 0; i < 4000; ++i) {
        theta.push_back(-kPi + 2.0 * kPi * i / 4000.0);
        radius.push_back(1.0 + 0.3 * (i % 2) + 1e-4 * std::sin(7.0 * theta.back()));
    }
    CHECK(detail::strand_vote(theta, radius) == 2);
    std::vector<double> single(radius.size());
    for (std::size_t i = 0; i < single.size(); ++i)
        single[i] = 1.0 + 1e-4 * std::cos(5.0 * theta[i]);
    CHECK(detail::strand_vote(theta, single) == 1);
}

TEST_CASE("component counts along the curve-doubling cascade", "[chaos][slow]") {
    auto count = [](double A, double B, double C, double seed) {
        const MiraCMap map{A, B, C};
        return count_curve_components(map, {0, 0, 0}, {seed, seed, seed});
    };
    const ComponentCount c170 = count(1.49, 0.5, -1.7, 0.01);
    REQUIRE(c170.ok);
    CHECK(c170.total == 1);
    const ComponentCount c173 = count(1.49, 0.5, -1.73, 0.01);
    REQUIRE(c173.ok);
    CHECK(c173.total == 2);
    const ComponentCount c176 = count(1.49, 0.5, -1.76, 0.01);
    REQUIRE(c176.ok);
    CHECK(c176.total == 4);
    const ComponentCount t2733 = count(-2.786, -0.915, -2.733, 1e-3);
    REQUIRE(t2733.ok);
    CHECK(t2733.total == 2);
    const ComponentCount t2718 = count(-2.786, -0.915, -2.718, 1e-3);
    REQUIRE(t2718.ok);
    CHECK(t2718.total == 1);
}
