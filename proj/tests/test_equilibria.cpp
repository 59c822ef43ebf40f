#include <catch2/catch_amalgamated.hpp>

#include "spiral/equilibria.hpp"

using namespace spiral;

namespace {

ActFlow act(double mu) { return ActFlow::from(resolve_params(ActFlow::kSchema, {{"mu", mu}})); }

GnFlow gn(double beta) {
    return GnFlow::from(resolve_params(GnFlow::kSchema, {{"beta", beta}}));
}

MiraCMap mira_orientable(double C) {
    return MiraCMap::from(
        resolve_params(MiraCMap::kSchema, {{"A", 1.49}, {"B", 0.5}, {"C", C}}));
}

MiraCMap mira_nonorientable(double C) {
    return MiraCMap::from(
        resolve_params(MiraCMap::kSchema, {{"A", -2.786}, {"B", -0.915}, {"C", C}}));
}

}  // namespace

TEST_CASE("both rest points of the cubic flow are found and classified",
          "[equilibria]") {
    const auto eqs = find_equilibria(act(0.8));
    REQUIRE(eqs.size() == 2);
    CHECK(norm(eqs[0].x - Vec3{0, 0, 0}) < 1e-10);
    CHECK(norm(eqs[1].x - Vec3{1, 0, 0}) < 1e-10);

    CHECK(eqs[0].cls.type == PointType::SaddleFocus21);
    CHECK(eqs[1].cls.type == PointType::SaddleFocus12);
    CHECK(eqs[1].cls.saddle_value > -0.6);
    CHECK(eqs[1].cls.saddle_value < -0.45);

    SECTION("below the oscillatory threshold the second point is stable") {
        const auto pre = find_equilibria(act(0.35));
        REQUIRE(pre.size() == 2);
        CHECK(pre[0].cls.type == PointType::SaddleFocus21);
        CHECK(pre[1].cls.type == PointType::Stable);
        CHECK(pre[1].cls.focal);
    }
}

TEST_CASE("multistart search is deterministic", "[equilibria][properties]") {
    const auto a = find_equilibria(act(0.8));
    const auto b = find_equilibria(act(0.8));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x.x == b[i].x.x);
        CHECK(a[i].x.y == b[i].x.y);
        CHECK(a[i].x.z == b[i].x.z);
    }
}

TEST_CASE("oscillation onset for the cubic flow sits at mu = beta exactly",
          "[equilibria]") {
    const auto hopf = locate_hopf([](double mu) { return act(mu); }, 0.2, 0.6,
                                  Vec3{1, 0, 0}, 1e-12);
    REQUIRE(hopf.has_value());
    CHECK(std::abs(hopf->param - 0.4) < 1e-6);
    CHECK(std::abs(hopf->omega - 1.0) < 1e-6);
    CHECK(norm(hopf->x - Vec3{1, 0, 0}) < 1e-9);
}

TEST_CASE("interior rest point of the slow-fast system matches its cubic",
          "[equilibria]") {
    const auto eqs = find_equilibria(gn(0.3));
    bool found = false;
    for (const auto& eq : eqs) {
        if (std::abs(eq.x.x - 0.73162) < 1e-4 && std::abs(eq.x.z - 0.16960) < 1e-4) {
            found = true;
            CHECK(std::abs(eq.x.y - 1.29977) < 1e-4);
            CHECK(eq.cls.type == PointType::SaddleFocus12);
        }
    }
    CHECK(found);
}

TEST_CASE("oscillation onset for the slow-fast system", "[equilibria]") {
    const auto hopf = locate_hopf([](double b) { return gn(b); }, 0.2, 0.32,
                                  Vec3{0.73162, 1.2407, 0.16960}, 1e-10);
    REQUIRE(hopf.has_value());
    CHECK(std::abs(hopf->param - 0.2596) < 1e-3);
}

TEST_CASE("quadratic map fixed points and their product of multipliers",
          "[equilibria]") {
    const auto map = mira_orientable(-1.7);
    const auto fps = find_fixed_points(map);
    REQUIRE(fps.size() == 2);

    const double s = 1.49 + 0.5 - 1.7 - 1.0;
    CHECK(norm(fps[0].x - Vec3{s, s, s}) < 1e-9);
    CHECK(norm(fps[1].x - Vec3{0, 0, 0}) < 1e-9);

    for (const auto& fp : fps) {
        Complex prod{1.0, 0.0};
        for (const Complex& l : fp.multipliers.ev) prod *= l;
        CHECK(std::abs(prod - Complex{0.5, 0.0}) < 1e-10);
    }
}

TEST_CASE("genuine two-cycle of the twisted map obeys its sum rule", "[equilibria]") {
    const double A = -2.786, B = -0.915, C = -2.71;
    const auto map = mira_nonorientable(C);
    const auto orbits = find_fixed_points(map, 2);

    std::vector<FixedPoint> genuine;
    for (const auto& fp : orbits)
        if (norm(map.step(fp.x) - fp.x) > 1e-6) genuine.push_back(fp);
    REQUIRE(genuine.size() == 2);

    const double sum_rule = -(1.0 + A + B - C);
    for (const auto& fp : genuine) {
        CHECK(std::abs(fp.x.x + fp.x.y - sum_rule) < 1e-9);
        Complex prod{1.0, 0.0};
        for (const Complex& l : fp.multipliers.ev) prod *= l;
        CHECK(std::abs(prod - Complex{B * B, 0.0}) < 1e-8);
    }
}

TEST_CASE("stability boundaries of the orientable map match closed forms",
          "[equilibria]") {
    const double A = 1.49, B = 0.5;
    const auto found = scan_map_boundaries([](double C) { return mira_orientable(C); },
                                           Vec3{0, 0, 0}, -1.6, -0.8);
    REQUIRE(found.size() == 2);
    CHECK(found[0].kind == BoundaryKind::NeimarkSacker);
    CHECK(std::abs(found[0].param - (-(1.0 + B * (A - B)))) < 1e-8);
    CHECK(found[1].kind == BoundaryKind::Fold);
    CHECK(std::abs(found[1].param - (1.0 - A - B)) < 1e-8);
}

TEST_CASE("stability boundaries of the twisted map match closed forms",
          "[equilibria]") {
    const double A = -2.786, B = -0.915;
    const auto found = scan_map_boundaries(
        [](double C) { return mira_nonorientable(C); }, Vec3{0, 0, 0}, -2.8, -2.6);
    REQUIRE(found.size() == 2);
    CHECK(found[0].kind == BoundaryKind::NeimarkSacker);
    CHECK(std::abs(found[0].param - (-(1.0 + B * (A - B)))) < 1e-8);
    CHECK(found[1].kind == BoundaryKind::Flip);
    CHECK(std::abs(found[1].param - (1.0 + A + B)) < 1e-8);
}

TEST_CASE("a multiplier pinned to the unit circle reads non-hyperbolic",
          "[equilibria]") {
    const auto map = mira_nonorientable(1.0 + (-2.786) + (-0.915));
    const auto fp = classify_fixed_point(map, {0, 0, 0});
    CHECK(fp.cls.type == PointType::NonHyperbolic);
}
