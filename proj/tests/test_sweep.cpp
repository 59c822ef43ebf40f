#include <catch2/catch_amalgamated.hpp>

#include "spiral/sweep.hpp"

using namespace spiral;

namespace {

bool rows_identical(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const SweepRow& r = a[i];
        const SweepRow& s = b[i];
        if (r.param != s.param || r.kind != s.kind || r.lam != s.lam) return false;
        if (r.drift != s.drift && !(std::isinf(r.drift) && std::isinf(s.drift))) return false;
        if (r.d_min != s.d_min && !(std::isinf(r.d_min) && std::isinf(s.d_min))) return false;
        if (r.components != s.components || r.flags != s.flags) return false;
        if (r.section != s.section) return false;
        if (r.x_end.x != s.x_end.x || r.x_end.y != s.x_end.y || r.x_end.z != s.x_end.z)
            return false;
    }
    return true;
}

const Stage* find_stage(const ScenarioReport& r, StageKind kind, int skip = 0) {
    for (const Stage& s : r.stages) {
        if (s.kind != kind) continue;
        if (skip-- == 0) return &s;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("parameter grids are inclusive and validated") {
    const auto g = param_grid(0.0, 1.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[2] == Catch::Approx(0.5));
    CHECK_THROWS_AS(param_grid(0.0, 1.0, 1), ConfigError);
}

TEST_CASE("flow sweep classifies the cycle band and reruns byte-identically") {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto grid = param_grid(0.50, 0.60, 3);
    FlowSweepOptions opt;
    opt.transient = 300.0;
    opt.horizon = 6000.0;
    opt.section = SectionPlane{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {}};

    const auto rows = sweep_flow(make, grid, {1.0, 0.0, 0.0}, opt);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(rows[i].param == grid[i]);
        CHECK(rows[i].kind == AttractorKind::Cycle);
        CHECK_FALSE(rows[i].section.empty());
    }
    CHECK((rows[0].flags & kRowColdStart) != 0);
    CHECK(rows[1].flags == 0);
    CHECK(rows[2].flags == 0);

    const auto again = sweep_flow(make, grid, {1.0, 0.0, 0.0}, opt);
    CHECK(rows_identical(rows, again));
}

TEST_CASE("flow sweep records pass distance and flags escaping rows") {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    FlowSweepOptions opt;
    opt.transient = 300.0;
    opt.horizon = 1500.0;
    opt.want_d_min = true;

    const auto rows = sweep_flow(make, {0.80, 0.88, 0.90}, {1.0, 0.0, 0.0}, opt);
    REQUIRE(rows.size() == 3);

    CHECK(rows[0].kind != AttractorKind::Diverged);
    CHECK(rows[0].d_min > 0.05);
    CHECK(rows[0].d_min < 1.0);

    for (std::size_t i : {std::size_t{1}, std::size_t{2}}) {
        CAPTURE(i);
        CHECK(rows[i].kind == AttractorKind::Diverged);
        CHECK((rows[i].flags & kRowDiverged) != 0);
        CHECK(std::isinf(rows[i].d_min));
    }
    CHECK((rows[1].flags & kRowColdStart) == 0);  // warm seed from the bounded row escapes
    CHECK((rows[2].flags & kRowColdStart) != 0);  // reseeded cold after the divergence
}

TEST_CASE("map sweep counts curve components and is jobs-deterministic") {
    auto make = [](double c) { return MiraCMap{1.49, 0.5, c}; };
    const std::vector<double> grid{-1.70, -1.73, -1.76};
    MapSweepOptions opt;
    opt.transient = 50000;
    opt.samples = 100000;
    opt.want_components = true;
    opt.want_section = true;
    opt.max_section_samples = 32;

    const auto rows = sweep_map(make, grid, {0.0, 0.0, 0.0}, opt);
    REQUIRE(rows.size() == 3);
    const int expected[] = {1, 2, 4};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(rows[i].param == grid[i]);
        CHECK(rows[i].kind == AttractorKind::Curve);
        CHECK(rows[i].components == expected[i]);
        CHECK(rows[i].section.size() == 32);
    }

    CHECK(rows_identical(rows, sweep_map(make, grid, {0.0, 0.0, 0.0}, opt)));

    MapSweepOptions par = opt;
    par.jobs = 2;
    const auto split = sweep_map(make, grid, {0.0, 0.0, 0.0}, par);
    REQUIRE(split.size() == 3);
    CHECK((split[1].flags & kRowColdStart) != 0);  // second block opens cold
    for (std::size_t i = 0; i < split.size(); ++i) {
        CAPTURE(i);
        CHECK(split[i].kind == rows[i].kind);
        CHECK(split[i].components == rows[i].components);
    }
    CHECK(rows_identical(split, sweep_map(make, grid, {0.0, 0.0, 0.0}, par)));
}

TEST_CASE("map sweep flags the spiral attractor over the fixed point") {
    auto make = [](double c) { return MiraCMap{-2.786, -0.915, c}; };
    MapSweepOptions opt;
    opt.want_d_min = true;
    opt.d_min_samples = 1000000;

    const auto rows = sweep_map(make, {-2.743}, {0.0, 0.0, 0.0}, opt);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].kind == AttractorKind::Chaotic);
    CHECK(rows[0].d_min < 1e-2);
    CHECK(homoclinic_attractor(rows[0]));
}

TEST_CASE("boundary crisis is bracketed by the all-escape bisection", "[slow]") {
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const auto crisis = detect_crisis(make, {1.0, 0.0, 0.0}, 0.86, 0.90, 1000.0, 1e-3);
    REQUIRE(crisis.has_value());
    CHECK(crisis->param == Catch::Approx(0.8732).margin(5e-3));
    CHECK(crisis->lo < crisis->hi);
    CHECK(crisis->hi - crisis->lo <= 1e-3 * 1.0001);

    CHECK_FALSE(detect_crisis(make, {1.0, 0.0, 0.0}, 0.50, 0.60, 200.0).has_value());
}

TEST_CASE("orientable scenario reports the full doubling chain", "[slow][scenario]") {
    const auto report = run_scenario("mira-orientable");
    CHECK(report.preset == "mira-orientable");
    CHECK(report.direction == -1);
    CHECK(report.ordered);

    const auto* ns = find_stage(report, StageKind::NeimarkSacker);
    REQUIRE(ns != nullptr);
    REQUIRE(ns->located);
    CHECK(ns->param == Catch::Approx(-1.495).margin(2e-3));

    const auto* d1 = find_stage(report, StageKind::CurveDoubling);
    REQUIRE(d1 != nullptr);
    REQUIRE(d1->located);
    CHECK(d1->param > -1.73);
    CHECK(d1->param < -1.70);

    const auto* d2 = find_stage(report, StageKind::CurveDoubling, 1);
    REQUIRE(d2 != nullptr);
    REQUIRE(d2->located);
    CHECK(d2->param > -1.76);
    CHECK(d2->param < -1.73);

    const auto* chaos = find_stage(report, StageKind::Chaotic);
    REQUIRE(chaos != nullptr);
    CHECK(chaos->located);

    const auto* flag = find_stage(report, StageKind::HomoclinicAttractor);
    REQUIRE(flag != nullptr);
    CHECK_FALSE(flag->located);  // close passes stay wider than the threshold here
    CHECK(flag->note.find("pass distance") != std::string::npos);
}

TEST_CASE("nonorientable scenario locates the spiral attractor", "[slow][scenario]") {
    const auto report = run_scenario("mira-nonorientable");
    CHECK(report.ordered);

    const auto* sp = find_stage(report, StageKind::StablePoint);
    REQUIRE(sp != nullptr);
    CHECK(sp->located);
    CHECK(sp->param == Catch::Approx(-2.705));

    const auto* ns = find_stage(report, StageKind::NeimarkSacker);
    REQUIRE(ns != nullptr);
    REQUIRE(ns->located);
    CHECK(ns->param == Catch::Approx(-2.712).margin(2e-3));

    const auto* curve = find_stage(report, StageKind::InvariantCurve);
    REQUIRE(curve != nullptr);
    CHECK(curve->located);

    const auto* d1 = find_stage(report, StageKind::CurveDoubling);
    REQUIRE(d1 != nullptr);
    REQUIRE(d1->located);
    CHECK(d1->param > -2.725);
    CHECK(d1->param < -2.718);

    const auto* flag = find_stage(report, StageKind::HomoclinicAttractor);
    REQUIRE(flag != nullptr);
    REQUIRE(flag->located);
    CHECK(flag->param == Catch::Approx(-2.743));
}

TEST_CASE("chemical oscillator scenario ends in honest gaps", "[slow][scenario]") {
    const auto report = run_scenario("gaspard-nicolis");
    CHECK(report.ordered);

    const auto* hopf = find_stage(report, StageKind::Hopf);
    REQUIRE(hopf != nullptr);
    REQUIRE(hopf->located);
    CHECK(hopf->param == Catch::Approx(0.2596).margin(2e-3));

    const auto* cycle = find_stage(report, StageKind::Cycle);
    REQUIRE(cycle != nullptr);
    CHECK(cycle->located);

    for (StageKind kind : {StageKind::NodeFocus, StageKind::PeriodDoubling, StageKind::Chaotic,
                           StageKind::HomoclinicAttractor}) {
        const auto* stage = find_stage(report, kind);
        CAPTURE(to_string(kind));
        REQUIRE(stage != nullptr);
        CHECK_FALSE(stage->located);
        CHECK_FALSE(stage->note.empty());
    }

    CHECK_THROWS_AS(run_scenario("nosuch"), ConfigError);
}

TEST_CASE("cubic flow scenario chains every stage", "[slow][scenario]") {
    const auto report = run_scenario("act");
    CHECK(report.preset == "act");
    CHECK(report.direction == 1);
    CHECK(report.ordered);
    REQUIRE(report.stages.size() == 8);

    const StageKind order[] = {StageKind::StablePoint, StageKind::Hopf,     StageKind::Cycle,
                               StageKind::NodeFocus,   StageKind::PeriodDoubling,
                               StageKind::Chaotic,     StageKind::HomoclinicAttractor,
                               StageKind::Crisis};
    for (std::size_t i = 0; i < report.stages.size(); ++i) {
        CAPTURE(i, to_string(report.stages[i].kind));
        CHECK(report.stages[i].kind == order[i]);
        CHECK(report.stages[i].located);
    }

    CHECK(find_stage(report, StageKind::Hopf)->param == Catch::Approx(0.4).margin(1e-4));
    CHECK(find_stage(report, StageKind::NodeFocus)->param == Catch::Approx(0.4927).margin(5e-3));
    CHECK(find_stage(report, StageKind::PeriodDoubling)->param ==
          Catch::Approx(0.7166).margin(5e-3));
    CHECK(find_stage(report, StageKind::HomoclinicAttractor)->param ==
          Catch::Approx(0.86311).margin(1.5e-3));
    CHECK(find_stage(report, StageKind::Crisis)->param == Catch::Approx(0.8732).margin(5e-3));
}
