#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spiral/systems.hpp"

using namespace spiral;

namespace {

// Central finite-difference Jacobian for cross-checking the analytic one.
template <class S>
Mat3 fd_jacobian(const S& sys, const Vec3& s, double h = 1e-6) {
    Mat3 m;
    for (int c = 0; c < 3; ++c) {
        Vec3 sp = s, sm = s;
        sp[c] += h;
        sm[c] -= h;
        Vec3 fp, fm;
        if constexpr (FlowLike<S>) {
            fp = sys.rhs(sp);
            fm = sys.rhs(sm);
        } else {
            fp = sys.step(sp);
            fm = sys.step(sm);
        }
        for (int r = 0; r < 3; ++r) m(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return m;
}

template <class S>
void check_jacobian_consistency(const S& sys, std::mt19937& rng, double span) {
    std::uniform_real_distribution<double> u(-span, span);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 s{u(rng), u(rng), u(rng)};
        const Mat3 ja = sys.jac(s);
        const Mat3 jf = fd_jacobian(sys, s);
        const double scale = 1.0 + ja.norm_inf();
        for (int i = 0; i < 9; ++i) {
            INFO("trial " << trial << " entry " << i);
            CHECK(std::abs(ja.a[i] - jf.a[i]) < 1e-5 * scale);
        }
    }
}

}  // namespace

TEST_CASE("act right-hand side at reference states", "[systems]") {
    const ActFlow sys{0.8, 0.4};
    // both equilibria map to zero
    CHECK(norm(sys.rhs({0, 0, 0})) == 0.0);
    CHECK(norm(sys.rhs({1, 0, 0})) == 0.0);
    // midpoint: z' = mu x (1-x) = 0.8 * 0.25
    const Vec3 f = sys.rhs({0.5, 0, 0});
    CHECK(f.x == 0.0);
    CHECK(f.y == 0.0);
    CHECK(f.z == Catch::Approx(0.2).margin(1e-15));
}

TEST_CASE("act jacobian at (1,0,0) and constant trace", "[systems]") {
    const ActFlow sys{0.8, 0.4};
    const Mat3 j = sys.jac({1, 0, 0});
    CHECK(j(2, 0) == Catch::Approx(-0.8).margin(1e-15));
    CHECK(j(2, 1) == -1.0);
    CHECK(j(2, 2) == Catch::Approx(-0.4).margin(1e-15));
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 s{u(rng), u(rng), u(rng)};
        CHECK(sys.jac(s).trace() + sys.beta == 0.0);
    }
}

TEST_CASE("map fixes the origin and keeps det(J) = B everywhere", "[systems]") {
    const MiraCMap m{1.49, 0.5, -1.7};
    CHECK(norm(m.step({0, 0, 0})) == 0.0);
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 s{u(rng), u(rng), u(rng)};
        CHECK(std::abs(m.jac(s).det() - m.B) < 1e-12);
    }
    const MiraMMap mm{0.35, 0.8, 0.7};
    for (int i = 0; i < 100; ++i) {
        const Vec3 s{u(rng), u(rng), u(rng)};
        CHECK(std::abs(mm.jac(s).det() - mm.B) < 1e-12);
    }
}

TEST_CASE("analytic jacobians match finite differences", "[systems][properties]") {
    std::mt19937 rng(2024u);
    check_jacobian_consistency(ActFlow{0.8, 0.4}, rng, 2.0);
    check_jacobian_consistency(GnFlow{}, rng, 1.5);
    check_jacobian_consistency(MiraCMap{1.49, 0.5, -1.7}, rng, 2.0);
    check_jacobian_consistency(MiraMMap{0.35, 0.8, 0.7}, rng, 2.0);
}

TEST_CASE("parameter resolution rejects unknown names and bad values", "[systems]") {
    ParameterSet ps;
    ps.set("mu", 0.5);
    CHECK_NOTHROW(make_flow("act", ps));
    ps.set("gamma", 1.0);
    CHECK_THROWS_AS(make_flow("act", ps), ConfigError);

    ParameterSet gn;
    gn.set("eps", -1.0);
    CHECK_THROWS_AS(make_flow("gaspard-nicolis", gn), ConfigError);

    CHECK_THROWS_AS(make_flow("nope", ParameterSet{}), ConfigError);
    CHECK_THROWS_AS(make_map("act", ParameterSet{}), ConfigError);

    ParameterSet bad;
    CHECK_THROWS_AS(bad.set("mu", std::nan("")), DomainError);
}

TEST_CASE("checked eval rejects non-finite states", "[systems]") {
    const ActFlow sys{0.8, 0.4};
    CHECK_THROWS_AS(eval(sys, Vec3{std::nan(""), 0, 0}), DomainError);
    CHECK_NOTHROW(eval(sys, Vec3{0.1, 0.2, 0.3}));
}

TEST_CASE("catalog lists all four systems with schemas", "[systems]") {
    const auto& cat = system_catalog();
    REQUIRE(cat.size() == 4);
    CHECK(cat[0].name == "act");
    CHECK(cat[0].is_flow);
    CHECK(cat[1].name == "gaspard-nicolis");
    CHECK(cat[1].params.size() == 8);
    CHECK(cat[2].name == "mira");
    CHECK_FALSE(cat[2].is_flow);
    CHECK(cat[3].name == "mira-m");
    CHECK(is_flow_name("act"));
    CHECK(is_map_name("mira"));
    CHECK_FALSE(is_map_name("act"));
}
