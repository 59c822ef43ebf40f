#include <catch2/catch_amalgamated.hpp>

#include "spiral/homoclinic.hpp"
#include "spiral/systems.hpp"

using namespace spiral;

namespace {

Equilibrium act_outer_saddle(const ActFlow& flow) {
    const auto x = newton_equilibrium(flow, {1.0, 0.0, 0.0});
    REQUIRE(x);
    const Equilibrium eq = classify_equilibrium(flow, *x);
    REQUIRE(eq.cls.type == PointType::SaddleFocus12);
    return eq;
}

Vec3 spiral_seed(const Mat3& jac, const Vec3& at, double offset) {
    const Spectrum3 s = eigenvalues_3x3(jac, SpectrumOrder::Flow);
    const int pi = complex_pair_index(s);
    REQUIRE(pi >= 0);
    return at + offset * eigen_plane(jac, s.ev[pi]).e1;
}

}  // namespace

TEST_CASE("attractor keeps a wide berth from the outer saddle before the connection",
          "[homoclinic]") {
    const ActFlow flow{0.8, 0.4};
    const Equilibrium o2 = act_outer_saddle(flow);
    const Vec3 seed = spiral_seed(flow.jac(o2.x), o2.x, 1e-4);
    const PassDistance pd = attractor_pass_distance(flow, o2.x, seed, 200.0, 1000.0, 0.01);
    CHECK(pd.reason == Termination::TimeReached);
    CHECK(pd.d_min > 0.25);
    CHECK(pd.d_min < 0.40);
}

TEST_CASE("branch split changes sign across the connection", "[homoclinic]") {
    SplitOptions opt;
    std::optional<BranchSplit> lo, hi;
    {
        const ActFlow flow{0.86, 0.4};
        lo = branch_split(flow, act_outer_saddle(flow), opt);
    }
    {
        const ActFlow flow{0.87, 0.4};
        hi = branch_split(flow, act_outer_saddle(flow), opt);
    }
    REQUIRE(lo);
    REQUIRE(hi);
    CHECK(lo->h * hi->h < 0.0);
    CHECK(lo->d_pass < 1.0);
    CHECK(hi->d_pass < 1.0);
}

TEST_CASE("homoclinic connection of the outer saddle is located", "[homoclinic][slow]") {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto points = locate_homoclinic(make, {1.0, 0.0, 0.0}, 0.85, 0.88);
    REQUIRE(!points.empty());
    bool found = false;
    for (const HomoclinicPoint& pt : points) {
        if (std::abs(pt.param - 0.86311) < 1.5e-3) {
            found = true;
            CHECK(pt.split.d_pass < 0.3);
            CHECK(pt.saddle.cls.type == PointType::SaddleFocus12);
        }
    }
    CHECK(found);
}

TEST_CASE("attractor passes the saddle at the connection parameter", "[homoclinic]") {
    const ActFlow flow{0.86311, 0.4};
    const Equilibrium o2 = act_outer_saddle(flow);
    const Vec3 seed = spiral_seed(flow.jac(o2.x), o2.x, 1e-4);
    const PassDistance pd = attractor_pass_distance(flow, o2.x, seed, 200.0, 20000.0, 0.005);
    CHECK(pd.reason == Termination::TimeReached);
    CHECK(pd.d_min < 1e-2);
}

TEST_CASE("map pass distance separates near and far regimes", "[homoclinic]") {
    auto run = [](double C) {
        const MiraCMap map{1.49, 0.5, C};
        const Vec3 seed = spiral_seed(map.jac({0, 0, 0}), {0, 0, 0}, 1e-4);
        return map_pass_distance(map, {0, 0, 0}, seed, 200000, 1000000);
    };
    const PassDistance tight = run(-1.825);
    CHECK(tight.reason == Termination::TimeReached);
    CHECK(tight.d_min < 1e-2);
    const PassDistance hole = run(-1.82);
    CHECK(hole.reason == Termination::TimeReached);
    CHECK(hole.d_min > 0.012);
    CHECK(hole.d_min < 0.03);
}

TEST_CASE("escaping seeds report an infinite distance", "[homoclinic]") {
    const ActFlow flow{0.8, 0.4};
    const PassDistance pd = attractor_pass_distance(flow, {1, 0, 0}, {10, 10, 10}, 50.0, 50.0);
    CHECK(pd.reason == Termination::Escaped);
    CHECK(pd.d_min == kInf);

    const MiraCMap map{1.49, 0.5, -1.7};
    const PassDistance mp = map_pass_distance(map, {0, 0, 0}, {500, 0, 0}, 10, 10);
    CHECK(mp.reason == Termination::Escaped);
    CHECK(mp.d_min == kInf);
}
