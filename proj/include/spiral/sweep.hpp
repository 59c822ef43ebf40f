#pragma once

#include <cstdint>
#include <cstdio>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spiral/chaos.hpp"
#include "spiral/cycles.hpp"
#include "spiral/equilibria.hpp"
#include "spiral/homoclinic.hpp"
#include "spiral/systems.hpp"

namespace spiral {

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum SweepFlag : std::uint32_t {
    kRowDiverged = 1u << 0,       // orbit left the box during classification
    kRowColdStart = 1u << 1,      // row was seeded from the saddle, not warm-started
    kRowNoAnchor = 1u << 2,       // anchor point refinement failed at this parameter
    kRowNoDistance = 1u << 3,     // pass distance requested but unavailable
    kRowNoCount = 1u << 4,        // component count requested but unavailable
    kRowNoSection = 1u << 5,      // section sampling requested but produced nothing
};

struct SweepRow {
    double param = 0.0;
    AttractorKind kind = AttractorKind::Diverged;
    std::array<double, 3> lam{};
    double drift = kInf;
    double d_min = kInf;
    int components = 0;
    std::vector<double> section;
    std::uint32_t flags = 0;
    Vec3 x_end{};
};

inline bool homoclinic_attractor(const SweepRow& row, double d_tol = 1e-2) {
    return row.kind == AttractorKind::Chaotic && row.d_min < d_tol;
}

inline std::vector<double> param_grid(double lo, double hi, int n) {
    if (n < 2) throw ConfigError("parameter grid needs at least two points");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
}

// Fixed cross-section used for flow bifurcation diagrams: the recorded
// ordinate is the axis component of each up-crossing through the plane.
struct SectionPlane {
    Vec3 point{};
    Vec3 normal{0.0, 1.0, 0.0};
    Vec3 axis{};  // zero selects the first in-plane basis vector
};

struct FlowSweepOptions {
    double transient = 500.0;
    double horizon = 5000.0;
    double dead_band = 1e-3;
    bool want_d_min = false;
    double d_min_sample = 2000.0;
    double d_min_dt = 0.005;
    std::optional<SectionPlane> section;
    int max_section_samples = 128;
    double section_span = 200.0;
    double seed_offset = 1e-4;
    int jobs = 1;
    IntegratorConfig cfg{};
};

struct MapSweepOptions {
    long long transient = 100000;
    long long samples = 200000;
    double dead_band = 1e-3;
    bool want_d_min = false;
    long long d_min_samples = 200000;
    bool want_components = false;
    int count_samples = 60000;
    long long count_transient = 200000;
    bool want_section = false;
    int max_section_samples = 128;
    int section_coordinate = 0;
    double seed_offset = 1e-4;
    int jobs = 1;
};

namespace detail {

// Cold seed rule shared by sweeps and locators: the anchor point plus a small
// offset inside its complex eigenplane (diagonal offset for wholly real
// spectra). Clipping keeps the seed inside the system box when the anchor
// sits on a face.
inline Vec3 offset_seed(const Vec3& anchor, const Spectrum3& spectrum, const Mat3& jac,
                        double offset, const Box& box) {
    Vec3 seed;
    const int pi = complex_pair_index(spectrum);
    if (pi >= 0) {
        const auto plane = eigen_plane(jac, spectrum.ev[static_cast<std::size_t>(pi)]);
        seed = anchor + offset * plane.e1;
    } else {
        const double c = offset / std::sqrt(3.0);
        seed = anchor + Vec3{c, c, c};
    }
    for (int i = 0; i < 3; ++i)
        seed[i] = std::min(std::max(seed[i], box.lo[i]), box.hi[i]);
    return seed;
}

template <FlowLike F>
std::pair<Vec3, bool> flow_cold_seed(const F& flow, const Vec3& anchor_guess, double offset) {
    const auto root = newton_equilibrium(flow, anchor_guess);
    if (!root) {
        const double c = offset / std::sqrt(3.0);
        return {anchor_guess + Vec3{c, c, c}, false};
    }
    const Mat3 jac = flow.jac(*root);
    const Spectrum3 spectrum = eigenvalues_3x3(jac, SpectrumOrder::Flow);
    return {offset_seed(*root, spectrum, jac, offset, flow.box()), true};
}

template <MapLike M>
std::pair<Vec3, bool> map_cold_seed(const M& map, const Vec3& anchor_guess, double offset) {
    const auto root = newton_fixed_point(map, anchor_guess);
    if (!root) {
        const double c = offset / std::sqrt(3.0);
        return {anchor_guess + Vec3{c, c, c}, false};
    }
    const Mat3 jac = map.jac(*root);
    const Spectrum3 spectrum = eigenvalues_3x3(jac, SpectrumOrder::Map);
    return {offset_seed(*root, spectrum, jac, offset, map.box()), true};
}

template <FlowLike F>
std::vector<double> section_samples(const F& flow, const Vec3& seed, const SectionPlane& plane,
                                    double span, int max_samples, IntegratorConfig cfg) {
    if (!cfg.box) cfg.box = flow.box();
    const Vec3 n = normalized(plane.normal);
    Vec3 axis = plane.axis;
    if (norm(axis) < 1e-12) axis = plane_basis(n).first;
    std::vector<double> out;
    double prev_g = dot(seed - plane.point, n);
    bool have_prev = false;
    integrate_stream(
        flow, seed, span, cfg, {},
        [&](const DenseStep<3>& step) {
            const Vec3 x1 = step.head3_y1();
            const double g1 = dot(x1 - plane.point, n);
            if (have_prev && prev_g <= 0.0 && g1 > 0.0) {
                double a = step.t0, b = step.t1;
                for (int it = 0; it < 60 && std::abs(b - a) > 1e-12 * std::abs(step.h()); ++it) {
                    const double m = 0.5 * (a + b);
                    (dot(step.eval3(m) - plane.point, n) > 0.0 ? b : a) = m;
                }
                const Vec3 hit = step.eval3(0.5 * (a + b));
                out.push_back(dot(hit - plane.point, axis));
                if (static_cast<int>(out.size()) >= max_samples) return StepAction::Stop;
            }
            prev_g = g1;
            have_prev = true;
            return StepAction::Continue;
        },
        false);
    return out;
}

}  // namespace detail

// Sweeps classify the attractor on a parameter grid. Rows are produced in
// grid order; per-row failures are recorded in flags and never abort the
// sweep. Within a contiguous block the seed warm-starts from the previous
// row's endpoint; every block opens with a cold seed at the anchor. jobs > 1
// splits the grid into that many contiguous blocks evaluated concurrently,
// which moves the cold-start seams but keeps reruns of the same
// configuration identical.
template <class MakeFlow>
std::vector<SweepRow> sweep_flow(MakeFlow make, const std::vector<double>& grid,
                                 const Vec3& anchor_guess, FlowSweepOptions opt = {}) {
    const std::size_t n = grid.size();
    std::vector<SweepRow> rows(n);
    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(std::max<std::size_t>(n, 1))));

    auto run_block = [&](std::size_t begin, std::size_t end) {
        std::optional<Vec3> warm;
        for (std::size_t i = begin; i < end; ++i) {
            SweepRow& row = rows[i];
            row.param = grid[i];
            const auto flow = make(grid[i]);
            Vec3 seed;
            if (warm) {
                seed = *warm;
            } else {
                const auto [cold, ok] = detail::flow_cold_seed(flow, anchor_guess, opt.seed_offset);
                seed = cold;
                row.flags |= kRowColdStart;
                if (!ok) row.flags |= kRowNoAnchor;
            }
            const AttractorScan scan =
                classify_attractor(flow, seed, opt.transient, opt.horizon, opt.dead_band, opt.cfg);
            row.kind = scan.kind;
            row.lam = scan.lyap.lam;
            row.drift = scan.lyap.drift;
            row.x_end = scan.lyap.x_end;
            if (scan.kind == AttractorKind::Diverged) {
                row.flags |= kRowDiverged;
                warm.reset();
                continue;
            }
            warm = scan.lyap.x_end;
            if (opt.want_d_min) {
                const auto anchor = newton_equilibrium(flow, anchor_guess);
                if (!anchor) {
                    row.flags |= kRowNoAnchor | kRowNoDistance;
                } else {
                    const PassDistance pd = attractor_pass_distance(
                        flow, *anchor, scan.lyap.x_end, 0.0, opt.d_min_sample, opt.d_min_dt,
                        opt.cfg);
                    row.d_min = pd.d_min;
                    if (!std::isfinite(pd.d_min)) row.flags |= kRowNoDistance;
                }
            }
            if (opt.section) {
                row.section = detail::section_samples(flow, scan.lyap.x_end, *opt.section,
                                                      opt.section_span, opt.max_section_samples,
                                                      opt.cfg);
                if (row.section.empty()) row.flags |= kRowNoSection;
            }
        }
    };

    if (jobs == 1) {
        run_block(0, n);
    } else {
        std::vector<std::future<void>> tasks;
        tasks.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) {
            const std::size_t begin = n * static_cast<std::size_t>(j) / static_cast<std::size_t>(jobs);
            const std::size_t end = n * (static_cast<std::size_t>(j) + 1) / static_cast<std::size_t>(jobs);
            tasks.push_back(std::async(std::launch::async, run_block, begin, end));
        }
        for (auto& t : tasks) t.get();
    }
    return rows;
}

template <class MakeMap>
std::vector<SweepRow> sweep_map(MakeMap make, const std::vector<double>& grid,
                                const Vec3& anchor_guess, MapSweepOptions opt = {}) {
    const std::size_t n = grid.size();
    std::vector<SweepRow> rows(n);
    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(std::max<std::size_t>(n, 1))));

    auto run_block = [&](std::size_t begin, std::size_t end) {
        std::optional<Vec3> warm;
        for (std::size_t i = begin; i < end; ++i) {
            SweepRow& row = rows[i];
            row.param = grid[i];
            const auto map = make(grid[i]);
            Vec3 seed;
            if (warm) {
                seed = *warm;
            } else {
                const auto [cold, ok] = detail::map_cold_seed(map, anchor_guess, opt.seed_offset);
                seed = cold;
                row.flags |= kRowColdStart;
                if (!ok) row.flags |= kRowNoAnchor;
            }
            const AttractorScan scan =
                classify_attractor(map, seed, opt.transient, opt.samples, opt.dead_band);
            row.kind = scan.kind;
            row.lam = scan.lyap.lam;
            row.drift = scan.lyap.drift;
            row.x_end = scan.lyap.x_end;
            if (scan.kind == AttractorKind::Diverged) {
                row.flags |= kRowDiverged;
                warm.reset();
                continue;
            }
            warm = scan.lyap.x_end;
            std::optional<Vec3> anchor;
            if (opt.want_d_min || opt.want_components) anchor = newton_fixed_point(map, anchor_guess);
            if (opt.want_d_min) {
                if (!anchor) {
                    row.flags |= kRowNoAnchor | kRowNoDistance;
                } else {
                    const PassDistance pd =
                        map_pass_distance(map, *anchor, scan.lyap.x_end, 0, opt.d_min_samples);
                    row.d_min = pd.d_min;
                    if (!std::isfinite(pd.d_min)) row.flags |= kRowNoDistance;
                }
            }
            if (opt.want_components) {
                if (!anchor) {
                    row.flags |= kRowNoAnchor | kRowNoCount;
                } else if (scan.kind == AttractorKind::Curve) {
                    const ComponentCount cc = count_curve_components(
                        map, *anchor, scan.lyap.x_end, opt.count_samples, opt.count_transient);
                    if (cc.ok)
                        row.components = cc.total;
                    else
                        row.flags |= kRowNoCount;
                }
            }
            if (opt.want_section) {
                Vec3 x = scan.lyap.x_end;
                const Box box = map.box();
                row.section.reserve(static_cast<std::size_t>(opt.max_section_samples));
                for (int s = 0; s < opt.max_section_samples && box.contains(x); ++s) {
                    row.section.push_back(x[opt.section_coordinate]);
                    x = map.step(x);
                }
                if (row.section.empty()) row.flags |= kRowNoSection;
            }
        }
    };

    if (jobs == 1) {
        run_block(0, n);
    } else {
        std::vector<std::future<void>> tasks;
        tasks.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) {
            const std::size_t begin = n * static_cast<std::size_t>(j) / static_cast<std::size_t>(jobs);
            const std::size_t end = n * (static_cast<std::size_t>(j) + 1) / static_cast<std::size_t>(jobs);
            tasks.push_back(std::async(std::launch::async, run_block, begin, end));
        }
        for (auto& t : tasks) t.get();
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Boundary crisis
// ---------------------------------------------------------------------------

struct CrisisBracket {
    double param = 0.0;  // midpoint of the final bracket
    double lo = 0.0;     // bounded side: not every probe escapes
    double hi = 0.0;     // escaping side: every probe escapes
};

// Bisection on the binary outcome "all probe orbits leave the box before the
// horizon". Probes fan out around the saddle in its complex eigenplane. The
// range must straddle the outcome change, otherwise nothing is reported.
template <class MakeFlow>
std::optional<CrisisBracket> detect_crisis(MakeFlow make, const Vec3& saddle_guess, double lo,
                                           double hi, double horizon = 1000.0,
                                           double param_tol = 1e-4, int n_seeds = 8,
                                           double seed_radius = 1e-4, IntegratorConfig cfg = {}) {
    Vec3 warm = saddle_guess;
    auto all_escape = [&](double p) -> bool {
        const auto flow = make(p);
        IntegratorConfig run = cfg;
        if (!run.box) run.box = flow.box();
        const auto root = newton_equilibrium(flow, warm);
        const Vec3 anchor = root ? *root : saddle_guess;
        if (root) warm = *root;
        const Mat3 jac = flow.jac(anchor);
        const Spectrum3 spectrum = eigenvalues_3x3(jac, SpectrumOrder::Flow);
        const int pi = complex_pair_index(spectrum);
        Vec3 e1, e2;
        if (pi >= 0) {
            const auto plane = eigen_plane(jac, spectrum.ev[static_cast<std::size_t>(pi)]);
            e1 = plane.e1;
            e2 = plane.e2;
        } else {
            std::tie(e1, e2) = plane_basis({0.0, 0.0, 1.0});
        }
        for (int k = 0; k < n_seeds; ++k) {
            const double th = 2.0 * kPi * k / n_seeds;
            const Vec3 seed = anchor + seed_radius * (std::cos(th) * e1 + std::sin(th) * e2);
            const Trajectory traj = integrate(flow, seed, horizon, run);
            if (traj.reason != Termination::Escaped) return false;
        }
        return true;
    };

    if (all_escape(lo) || !all_escape(hi)) return std::nullopt;
    double a = lo, b = hi;
    for (int it = 0; it < 64 && b - a > param_tol; ++it) {
        const double mid = 0.5 * (a + b);
        (all_escape(mid) ? b : a) = mid;
    }
    return CrisisBracket{0.5 * (a + b), a, b};
}

// ---------------------------------------------------------------------------
// Scenario reports
// ---------------------------------------------------------------------------

enum class StageKind {
    StablePoint,
    Hopf,
    NeimarkSacker,
    Cycle,
    InvariantCurve,
    NodeFocus,
    PeriodDoubling,
    CurveDoubling,
    Chaotic,
    HomoclinicAttractor,
    Crisis,
};

inline const char* to_string(StageKind kind) {
    switch (kind) {
        case StageKind::StablePoint: return "stable-point";
        case StageKind::Hopf: return "hopf";
        case StageKind::NeimarkSacker: return "neimark-sacker";
        case StageKind::Cycle: return "cycle";
        case StageKind::InvariantCurve: return "invariant-curve";
        case StageKind::NodeFocus: return "node-focus";
        case StageKind::PeriodDoubling: return "period-doubling";
        case StageKind::CurveDoubling: return "curve-doubling";
        case StageKind::Chaotic: return "chaotic";
        case StageKind::HomoclinicAttractor: return "homoclinic-attractor";
        case StageKind::Crisis: return "crisis";
    }
    return "unknown";
}

struct Stage {
    StageKind kind = StageKind::StablePoint;
    double param = 0.0;
    bool located = false;  // false marks a gap: the stage was probed but not found
    std::string note;
};

struct ScenarioReport {
    std::string preset;
    int direction = 1;  // sign of parameter motion along the scan
    std::vector<Stage> stages;
    bool ordered = false;
};

inline void finalize_order(ScenarioReport& report) {
    report.ordered = true;
    double last = -report.direction * kInf;
    for (const Stage& s : report.stages) {
        if (!s.located) continue;
        if (report.direction * (s.param - last) <= 0.0) report.ordered = false;
        last = s.param;
    }
}

namespace detail {

inline Stage located_stage(StageKind kind, double param, std::string note = {}) {
    return Stage{kind, param, true, std::move(note)};
}

inline Stage gap_stage(StageKind kind, std::string note) {
    return Stage{kind, 0.0, false, std::move(note)};
}

template <class Num>
std::string short_num(Num v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", static_cast<double>(v));
    return buf;
}

// Bisects a change of the curve component count between two parameters with
// known counts. Escaping orbits end the search at the current bracket.
template <class MakeMap>
std::optional<double> locate_count_change(MakeMap make, const Vec3& anchor, double lo, int count_lo,
                                          double hi, double param_tol = 1e-3,
                                          int count_samples = 60000,
                                          long long count_transient = 200000,
                                          double seed_offset = 1e-4) {
    double a = lo, b = hi;
    for (int it = 0; it < 40 && std::abs(b - a) > param_tol; ++it) {
        const double mid = 0.5 * (a + b);
        const auto map = make(mid);
        const auto [seed, ok] = map_cold_seed(map, anchor, seed_offset);
        if (!ok) return std::nullopt;
        const ComponentCount cc =
            count_curve_components(map, anchor, seed, count_samples, count_transient);
        if (!cc.ok) break;
        (cc.total == count_lo ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// The four scenario presets reproduce each system's route to a spiral
// attractor as an ordered stage chain. Every stage is located by the
// corresponding detector; a detector that finds nothing leaves a gap stage
// with the reason in its note.

inline ScenarioReport scenario_act() {
    ScenarioReport report;
    report.preset = "act";
    report.direction = 1;
    auto make = [](double mu) { return ActFlow{mu, 0.4}; };
    const Vec3 saddle_guess{1.0, 0.0, 0.0};

    {
        const double mu = 0.35;
        const auto scan = classify_attractor(make(mu), {0.05, 0.0, 0.0}, 200.0, 2000.0);
        if (scan.kind == AttractorKind::Point)
            report.stages.push_back(detail::located_stage(StageKind::StablePoint, mu));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::StablePoint, "expected a stable point at mu=0.35, found " +
                                            std::string(to_string(scan.kind))));
    }

    if (const auto hopf = locate_hopf(make, 0.3, 0.5, saddle_guess))
        report.stages.push_back(detail::located_stage(
            StageKind::Hopf, hopf->param, "omega=" + detail::short_num(hopf->omega)));
    else
        report.stages.push_back(detail::gap_stage(StageKind::Hopf, "no pair crossing in [0.3, 0.5]"));

    {
        const double mu = 0.45;
        const auto flow = make(mu);
        const Vec3 seed = settle_orbit(flow, {1.01, 0.0, 0.0}, 300.0, {});
        const auto orbit = refine_cycle(flow, seed, 30.0);
        if (orbit && !orbit->focal)
            report.stages.push_back(detail::located_stage(
                StageKind::Cycle, mu, "T=" + detail::short_num(orbit->period)));
        else
            report.stages.push_back(detail::gap_stage(StageKind::Cycle, "no nodal cycle at mu=0.45"));
    }

    if (const auto nf = locate_cycle_focus_transition(make, 0.42, 0.70, {1.01, 0.0, 0.0}, 300.0, 30.0))
        report.stages.push_back(detail::located_stage(StageKind::NodeFocus, nf->param));
    else
        report.stages.push_back(
            detail::gap_stage(StageKind::NodeFocus, "discriminant keeps its sign in [0.42, 0.70]"));

    if (const auto pd = locate_period_doubling(make, 0.60, 0.80, {1.01, 0.0, 0.0}, 300.0, 30.0))
        report.stages.push_back(detail::located_stage(
            StageKind::PeriodDoubling, pd->param,
            pd->criticality == Criticality::Supercritical ? "supercritical" : "subcritical"));
    else
        report.stages.push_back(
            detail::gap_stage(StageKind::PeriodDoubling, "no multiplier reaches -1 in [0.60, 0.80]"));

    {
        const double mu = 0.84;
        const auto [seed, ok] = detail::flow_cold_seed(make(mu), saddle_guess, 1e-4);
        const auto scan = ok ? classify_attractor(make(mu), seed, 500.0, 8000.0)
                             : AttractorScan{};
        if (scan.kind == AttractorKind::Chaotic)
            report.stages.push_back(detail::located_stage(
                StageKind::Chaotic, mu, "lam1=" + detail::short_num(scan.lyap.lam[0])));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::Chaotic, "no positive exponent at mu=0.84"));
    }

    {
        HomoclinicOptions opt;
        const auto roots = locate_homoclinic(make, saddle_guess, 0.85, 0.88, opt);
        if (!roots.empty()) {
            const HomoclinicPoint& h = roots.front();
            const auto [seed, ok] = detail::flow_cold_seed(make(h.param), saddle_guess, 1e-4);
            PassDistance pd;
            if (ok)
                pd = attractor_pass_distance(make(h.param), h.saddle.x, seed, 200.0, 20000.0);
            if (ok && pd.d_min < 1e-2)
                report.stages.push_back(detail::located_stage(
                    StageKind::HomoclinicAttractor, h.param,
                    "d_min=" + detail::short_num(pd.d_min)));
            else
                report.stages.push_back(detail::gap_stage(
                    StageKind::HomoclinicAttractor,
                    "connection at mu=" + detail::short_num(h.param) +
                        " but attractor pass distance " + detail::short_num(pd.d_min)));
        } else {
            report.stages.push_back(detail::gap_stage(StageKind::HomoclinicAttractor,
                                                      "no splitting zero in [0.85, 0.88]"));
        }
    }

    if (const auto crisis = detect_crisis(make, saddle_guess, 0.86, 0.90))
        report.stages.push_back(detail::located_stage(StageKind::Crisis, crisis->param));
    else
        report.stages.push_back(
            detail::gap_stage(StageKind::Crisis, "escape outcome constant in [0.86, 0.90]"));

    finalize_order(report);
    return report;
}

inline ScenarioReport scenario_gaspard_nicolis() {
    ScenarioReport report;
    report.preset = "gaspard-nicolis";
    report.direction = 1;
    auto make = [](double beta) { return GnFlow{beta}; };
    const Vec3 interior_guess{0.73, 1.30, 0.17};
    IntegratorConfig cfg;
    cfg.max_step = 0.005;

    {
        const double beta = 0.22;
        const auto flow = make(beta);
        const auto root = newton_equilibrium(flow, interior_guess);
        const auto scan = root ? classify_attractor(flow, *root + Vec3{1e-3, 1e-3, 0.0}, 300.0,
                                                    1500.0, 1e-3, cfg)
                               : AttractorScan{};
        if (scan.kind == AttractorKind::Point)
            report.stages.push_back(detail::located_stage(StageKind::StablePoint, beta));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::StablePoint, "expected a stable point at beta=0.22, found " +
                                            std::string(to_string(scan.kind))));
    }

    if (const auto hopf = locate_hopf(make, 0.2, 0.3, interior_guess))
        report.stages.push_back(detail::located_stage(
            StageKind::Hopf, hopf->param, "omega=" + detail::short_num(hopf->omega)));
    else
        report.stages.push_back(detail::gap_stage(StageKind::Hopf, "no pair crossing in [0.2, 0.3]"));

    {
        const double beta = 0.32;
        const auto flow = make(beta);
        const Vec3 seed = settle_orbit(flow, {0.8, 1.2, 0.2}, 600.0, cfg);
        const auto orbit = refine_cycle(flow, seed, 25.0, 1, cfg);
        if (orbit && !orbit->focal)
            report.stages.push_back(detail::located_stage(
                StageKind::Cycle, beta, "T=" + detail::short_num(orbit->period)));
        else
            report.stages.push_back(detail::gap_stage(StageKind::Cycle, "no nodal cycle at beta=0.32"));
    }

    if (const auto nf =
            locate_cycle_focus_transition(make, 0.33, 0.45, {0.8, 1.2, 0.2}, 600.0, 25.0, cfg))
        report.stages.push_back(detail::located_stage(StageKind::NodeFocus, nf->param));
    else
        report.stages.push_back(
            detail::gap_stage(StageKind::NodeFocus, "discriminant keeps its sign in [0.33, 0.45]"));

    if (const auto pd = locate_period_doubling(make, 0.33, 0.45, {0.8, 1.2, 0.2}, 600.0, 25.0, cfg))
        report.stages.push_back(detail::located_stage(
            StageKind::PeriodDoubling, pd->param,
            pd->criticality == Criticality::Supercritical ? "supercritical" : "subcritical"));
    else
        report.stages.push_back(
            detail::gap_stage(StageKind::PeriodDoubling, "no multiplier reaches -1 in [0.33, 0.45]"));

    {
        const double beta = 0.385;
        const auto scan = classify_attractor(make(beta), {0.8, 1.2, 0.2}, 600.0, 3000.0, 1e-3, cfg);
        if (scan.kind == AttractorKind::Chaotic)
            report.stages.push_back(detail::located_stage(
                StageKind::Chaotic, beta, "lam1=" + detail::short_num(scan.lyap.lam[0])));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::Chaotic, "largest exponent " + detail::short_num(scan.lyap.lam[0]) +
                                        " at beta=0.385, attractor " +
                                        std::string(to_string(scan.kind))));
    }

    {
        HomoclinicOptions opt;
        opt.split.t_max = 60.0;
        opt.split.cfg.max_step = 0.005;
        const auto roots = locate_homoclinic(make, interior_guess, 0.38, 0.40, opt);
        if (!roots.empty())
            report.stages.push_back(detail::located_stage(StageKind::HomoclinicAttractor,
                                                          roots.front().param));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::HomoclinicAttractor,
                "no splitting zero with a close pass in [0.38, 0.40]"));
    }

    finalize_order(report);
    return report;
}

inline ScenarioReport scenario_mira_orientable() {
    ScenarioReport report;
    report.preset = "mira-orientable";
    report.direction = -1;
    auto make = [](double c) { return MiraCMap{1.49, 0.5, c}; };
    const Vec3 origin{0.0, 0.0, 0.0};

    {
        const double c = -1.45;
        const auto scan = classify_attractor(make(c), {1e-3, 1e-3, 1e-3}, 20000, 50000);
        if (scan.kind == AttractorKind::Point)
            report.stages.push_back(detail::located_stage(StageKind::StablePoint, c));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::StablePoint, "expected a stable point at C=-1.45, found " +
                                            std::string(to_string(scan.kind))));
    }

    {
        const auto bounds = scan_map_boundaries(make, origin, -1.6, -1.4);
        const BoundaryPoint* ns = nullptr;
        for (const auto& b : bounds)
            if (b.kind == BoundaryKind::NeimarkSacker) ns = &b;
        if (ns)
            report.stages.push_back(detail::located_stage(StageKind::NeimarkSacker, ns->param));
        else
            report.stages.push_back(
                detail::gap_stage(StageKind::NeimarkSacker, "no modulus-one pair in [-1.6, -1.4]"));
    }

    {
        const double c = -1.7;
        const auto map = make(c);
        const auto [seed, ok] = detail::map_cold_seed(map, origin, 1e-4);
        const auto scan = classify_attractor(map, seed, 100000LL, 200000LL);
        const ComponentCount cc = ok && scan.kind == AttractorKind::Curve
                                      ? count_curve_components(map, origin, scan.lyap.x_end)
                                      : ComponentCount{};
        if (cc.ok && cc.total == 1)
            report.stages.push_back(detail::located_stage(StageKind::InvariantCurve, c));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::InvariantCurve, "no single closed curve at C=-1.7"));
    }

    if (const auto d1 = detail::locate_count_change(make, origin, -1.70, 1, -1.73))
        report.stages.push_back(detail::located_stage(StageKind::CurveDoubling, *d1, "1 -> 2"));
    else
        report.stages.push_back(detail::gap_stage(StageKind::CurveDoubling,
                                                  "no count change in [-1.73, -1.70]"));

    if (const auto d2 = detail::locate_count_change(make, origin, -1.73, 2, -1.76))
        report.stages.push_back(detail::located_stage(StageKind::CurveDoubling, *d2, "2 -> 4"));
    else
        report.stages.push_back(detail::gap_stage(StageKind::CurveDoubling,
                                                  "no count change in [-1.76, -1.73]"));

    {
        const double c = -1.8;
        const auto [seed, ok] = detail::map_cold_seed(make(c), origin, 1e-4);
        const auto scan = ok ? classify_attractor(make(c), seed, 100000LL, 200000LL)
                             : AttractorScan{};
        if (scan.kind == AttractorKind::Chaotic)
            report.stages.push_back(detail::located_stage(
                StageKind::Chaotic, c, "lam1=" + detail::short_num(scan.lyap.lam[0])));
        else
            report.stages.push_back(
                detail::gap_stage(StageKind::Chaotic, "no positive exponent at C=-1.8"));
    }

    {
        const double c = -1.82;
        const auto map = make(c);
        const auto root = newton_fixed_point(map, origin);
        const auto [seed, ok] = detail::map_cold_seed(map, origin, 1e-4);
        const auto scan = ok ? classify_attractor(map, seed, 100000LL, 200000LL) : AttractorScan{};
        PassDistance pd;
        if (root && scan.kind == AttractorKind::Chaotic)
            pd = map_pass_distance(map, *root, scan.lyap.x_end, 0, 1000000);
        if (scan.kind == AttractorKind::Chaotic && pd.d_min < 1e-2)
            report.stages.push_back(detail::located_stage(
                StageKind::HomoclinicAttractor, c, "d_min=" + detail::short_num(pd.d_min)));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::HomoclinicAttractor,
                "at C=-1.82 attractor " + std::string(to_string(scan.kind)) +
                    ", fixed-point pass distance " + detail::short_num(pd.d_min)));
    }

    finalize_order(report);
    return report;
}

inline ScenarioReport scenario_mira_nonorientable() {
    ScenarioReport report;
    report.preset = "mira-nonorientable";
    report.direction = -1;
    auto make = [](double c) { return MiraCMap{-2.786, -0.915, c}; };
    const Vec3 origin{0.0, 0.0, 0.0};

    {
        const double c = -2.705;
        const auto scan = classify_attractor(make(c), {1e-3, 1e-3, 1e-3}, 20000, 50000);
        if (scan.kind == AttractorKind::Point)
            report.stages.push_back(detail::located_stage(StageKind::StablePoint, c));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::StablePoint, "expected a stable point at C=-2.705, found " +
                                            std::string(to_string(scan.kind))));
    }

    {
        const auto bounds = scan_map_boundaries(make, origin, -2.75, -2.68);
        const BoundaryPoint* ns = nullptr;
        for (const auto& b : bounds)
            if (b.kind == BoundaryKind::NeimarkSacker) ns = &b;
        if (ns)
            report.stages.push_back(detail::located_stage(StageKind::NeimarkSacker, ns->param));
        else
            report.stages.push_back(
                detail::gap_stage(StageKind::NeimarkSacker, "no modulus-one pair in [-2.75, -2.68]"));
    }

    {
        const double c = -2.718;
        const auto map = make(c);
        const auto scan = classify_attractor(map, {1e-3, 1e-3, 1e-3}, 100000LL, 200000LL);
        const ComponentCount cc = scan.kind == AttractorKind::Curve
                                      ? count_curve_components(map, origin, scan.lyap.x_end)
                                      : ComponentCount{};
        if (cc.ok && cc.total == 1)
            report.stages.push_back(detail::located_stage(StageKind::InvariantCurve, c));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::InvariantCurve, "no single closed curve at C=-2.718"));
    }

    if (const auto d1 = detail::locate_count_change(make, origin, -2.718, 1, -2.725, 1e-3, 60000,
                                                    200000, 1e-4))
        report.stages.push_back(detail::located_stage(StageKind::CurveDoubling, *d1, "1 -> 2"));
    else
        report.stages.push_back(detail::gap_stage(StageKind::CurveDoubling,
                                                  "no count change in [-2.725, -2.718]"));

    {
        const double c = -2.737;
        const auto [seed, ok] = detail::map_cold_seed(make(c), origin, 1e-4);
        const auto scan = ok ? classify_attractor(make(c), seed, 100000LL, 200000LL)
                             : AttractorScan{};
        if (scan.kind == AttractorKind::Chaotic)
            report.stages.push_back(detail::located_stage(
                StageKind::Chaotic, c, "lam1=" + detail::short_num(scan.lyap.lam[0])));
        else
            report.stages.push_back(
                detail::gap_stage(StageKind::Chaotic, "no positive exponent at C=-2.737"));
    }

    {
        const double c = -2.743;
        const auto map = make(c);
        const auto root = newton_fixed_point(map, origin);
        const auto [seed, ok] = detail::map_cold_seed(map, origin, 1e-4);
        const auto scan = ok ? classify_attractor(map, seed, 100000LL, 200000LL) : AttractorScan{};
        PassDistance pd;
        if (root && scan.kind == AttractorKind::Chaotic)
            pd = map_pass_distance(map, *root, scan.lyap.x_end, 0, 1000000);
        if (scan.kind == AttractorKind::Chaotic && pd.d_min < 1e-2)
            report.stages.push_back(detail::located_stage(
                StageKind::HomoclinicAttractor, c, "d_min=" + detail::short_num(pd.d_min)));
        else
            report.stages.push_back(detail::gap_stage(
                StageKind::HomoclinicAttractor,
                "at C=-2.743 attractor " + std::string(to_string(scan.kind)) +
                    ", fixed-point pass distance " + detail::short_num(pd.d_min)));
    }

    finalize_order(report);
    return report;
}

inline ScenarioReport run_scenario(const std::string& preset) {
    if (preset == "act") return scenario_act();
    if (preset == "gaspard-nicolis") return scenario_gaspard_nicolis();
    if (preset == "mira-orientable") return scenario_mira_orientable();
    if (preset == "mira-nonorientable") return scenario_mira_nonorientable();
    throw ConfigError("unknown scenario preset: " + preset);
}

inline std::vector<std::string> scenario_presets() {
    return {"act", "gaspard-nicolis", "mira-orientable", "mira-nonorientable"};
}

}  // namespace spiral
