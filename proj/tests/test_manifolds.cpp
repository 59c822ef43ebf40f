#include <catch2/catch_amalgamated.hpp>

#include "spiral/manifolds.hpp"
#include "spiral/systems.hpp"

using namespace spiral;

namespace {

struct DiagonalSaddle {
    Vec3 lam{0.5, -0.3, -0.8};
    Vec3 rhs(const Vec3& s) const { return {lam.x * s.x, lam.y * s.y, lam.z * s.z}; }
    Mat3 jac(const Vec3&) const {
        return Mat3::from_rows({lam.x, 0, 0}, {0, lam.y, 0}, {0, 0, lam.z});
    }
    Box box() const { return {{-1, -1, -1}, {1, 1, 1}}; }
    double max_step() const { return kInf; }
};

}  // namespace

TEST_CASE("separatrix of a diagonal saddle is the unstable axis", "[manifolds]") {
    const DiagonalSaddle flow;
    const Equilibrium eq = classify_equilibrium(flow, {0, 0, 0});
    SeparatrixOptions opt;
    opt.cfg.max_step = 0.01;

    const Separatrix plus = track_separatrix(flow, eq, +1.0, opt);
    CHECK(plus.time_sign == 1.0);
    CHECK(norm(plus.direction - Vec3{1, 0, 0}) < 1e-12);
    REQUIRE(plus.traj.x.size() > 2);
    CHECK(norm(plus.traj.x.front() - Vec3{1e-5, 0, 0}) < 1e-15);
    CHECK(plus.traj.reason == Termination::Escaped);
    CHECK(plus.traj.x_end.x >= 1.0);
    for (const Vec3& p : plus.traj.x) {
        CHECK(std::abs(p.y) < 1e-12);
        CHECK(std::abs(p.z) < 1e-12);
    }
    CHECK(std::abs(plus.arc_length - 1.0) < 0.02);

    const Separatrix minus = track_separatrix(flow, eq, -1.0, opt);
    CHECK(minus.traj.x_end.x <= -1.0);
    CHECK(std::abs(minus.arc_length - 1.0) < 0.02);
}

TEST_CASE("a stable lone eigenvalue is followed backward", "[manifolds]") {
    DiagonalSaddle flow;
    flow.lam = {-0.5, 0.3, 0.8};
    const Equilibrium eq = classify_equilibrium(flow, {0, 0, 0});
    SeparatrixOptions opt;
    opt.cfg.max_step = 0.01;
    const Separatrix s = track_separatrix(flow, eq, +1.0, opt);
    CHECK(s.time_sign == -1.0);
    CHECK(s.traj.reason == Termination::Escaped);
    CHECK(s.traj.x_end.x >= 1.0);
    CHECK(s.traj.t.back() < 0.0);
}

TEST_CASE("arc cap stops a branch that never leaves", "[manifolds]") {
    const DiagonalSaddle flow;
    const Equilibrium eq = classify_equilibrium(flow, {0, 0, 0});
    SeparatrixOptions opt;
    opt.cfg.max_step = 0.01;
    opt.arc_cap = 0.25;
    const Separatrix s = track_separatrix(flow, eq, +1.0, opt);
    CHECK(s.traj.reason == Termination::CallbackStop);
    CHECK(s.arc_length >= 0.25);
    CHECK(s.arc_length < 0.27);
}

TEST_CASE("a sink has no one-dimensional branch", "[manifolds]") {
    DiagonalSaddle flow;
    flow.lam = {-1.0, -2.0, -3.0};
    const Equilibrium eq = classify_equilibrium(flow, {0, 0, 0});
    CHECK_THROWS_AS(track_separatrix(flow, eq, +1.0), PreconditionError);
}

TEST_CASE("spiral surface rays start in the eigenplane", "[manifolds]") {
    const ActFlow flow{0.8, 0.4};
    const auto x = newton_equilibrium(flow, {1.0, 0.0, 0.0});
    REQUIRE(x);
    const Equilibrium eq = classify_equilibrium(flow, *x);
    REQUIRE(eq.cls.type == PointType::SaddleFocus12);

    const SurfaceRing ring = grow_spiral_surface(flow, eq, 8, 1e-5, 50.0);
    CHECK(ring.time_sign == 1.0);
    REQUIRE(ring.rays.size() == 8);
    for (const Trajectory& ray : ring.rays) {
        REQUIRE(!ray.x.empty());
        const Vec3 off = ray.x.front() - eq.x;
        CHECK(std::abs(norm(off) - 1e-5) < 1e-12);
        CHECK(std::abs(dot(off, ring.plane.n)) < 1e-12);
        CHECK(ray.reason == Termination::TimeReached);
    }
}

TEST_CASE("a stable pair grows its surface backward", "[manifolds]") {
    const ActFlow flow{0.8, 0.4};
    const Equilibrium eq = classify_equilibrium(flow, {0, 0, 0});
    REQUIRE(eq.cls.type == PointType::SaddleFocus21);
    const SurfaceRing ring = grow_spiral_surface(flow, eq, 4, 1e-5, 5.0);
    CHECK(ring.time_sign == -1.0);
    REQUIRE(ring.rays.size() == 4);
    for (const Trajectory& ray : ring.rays) CHECK(ray.t.back() <= 0.0);
}
