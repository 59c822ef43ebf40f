#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "spiral/chaos.hpp"
#include "spiral/core.hpp"
#include "spiral/cycles.hpp"
#include "spiral/equilibria.hpp"
#include "spiral/homoclinic.hpp"
#include "spiral/integrate.hpp"
#include "spiral/io.hpp"
#include "spiral/manifolds.hpp"
#include "spiral/sweep.hpp"
#include "spiral/systems.hpp"

namespace {

using nlohmann::json;
using namespace spiral;

constexpr int kExitOk = 0;
constexpr int kExitNotFound = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
    std::string system;
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
};

const SystemInfo& system_info(const std::string& name) {
    for (const SystemInfo& info : system_catalog())
        if (info.name == name) return info;
    throw ConfigError("unknown system: " + name);
}

// Resolves a command's settings from defaults, then the config file, then
// --set flags. Keys naming system parameters are routed to the parameter
// set; every other key must be a defined setting.
class Resolved {
public:
    Resolved(const SystemInfo* info, const CommonArgs& args) : info_(info), args_(args) {}

    void define(const std::string& key, const std::string& fallback) {
        order_.push_back(key);
        values_[key] = fallback;
    }

    void finalize() {
        if (!args_.config_path.empty())
            for (const auto& [k, v] : load_key_values(args_.config_path)) assign(k, v);
        for (const std::string& s : args_.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got: " + s);
            const std::string key = detail::trim(s.substr(0, eq));
            if (key.empty()) throw ConfigError("--set expects key=value, got: " + s);
            assign(key, detail::trim(s.substr(eq + 1)));
        }
    }

    double num(const std::string& key) const { return parse_double(key, str(key)); }
    long long integer(const std::string& key) const { return parse_integer(key, str(key)); }

    const std::string& str(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw PreconditionError("undefined setting: " + key);
        return it->second;
    }

    double required_num(const std::string& key) const {
        if (str(key).empty()) throw ConfigError("key '" + key + "' is required");
        return num(key);
    }

    Vec3 triple(const std::string& kx, const std::string& ky, const std::string& kz) const {
        return {num(kx), num(ky), num(kz)};
    }

    const ParameterSet& params() const { return params_; }

    bool is_param(const std::string& key) const {
        if (!info_) return false;
        for (const ParamSpec& p : info_->params)
            if (key == p.name) return true;
        return false;
    }

    IntegratorConfig integrator() const {
        IntegratorConfig cfg;
        cfg.rtol = num("rtol");
        cfg.atol = num("atol");
        const double ms = num("max_step");
        if (ms > 0.0) cfg.max_step = ms;
        return cfg;
    }

    KeyValues echo() const {
        KeyValues out;
        if (info_) {
            const ParameterSet full =
                resolve_params(std::span<const ParamSpec>(info_->params), params_);
            for (const auto& [k, v] : full.items()) out.emplace_back(k, fmt_full(v));
        }
        for (const std::string& key : order_) out.emplace_back(key, values_.at(key));
        return out;
    }

private:
    void assign(const std::string& key, const std::string& value) {
        if (is_param(key)) {
            params_.set(key, parse_double(key, value));
            return;
        }
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown key: " + key);
        it->second = value;
    }

    const SystemInfo* info_;
    const CommonArgs& args_;
    ParameterSet params_;
    std::vector<std::string> order_;
    std::map<std::string, std::string> values_;
};

Provenance make_provenance(const std::string& command, const CommonArgs& args,
                           const Resolved* resolved) {
    Provenance prov;
    prov.command = command;
    if (!args.system.empty()) prov.config.emplace_back("system", args.system);
    if (resolved)
        for (auto& kv : resolved->echo()) prov.config.push_back(std::move(kv));
    prov.seed = args.seed;
    return prov;
}

int fail_not_found(const Provenance& prov, const std::string& message) {
    json err;
    err["error"] = message;
    err["command"] = prov.command;
    std::cout << err.dump() << "\n";
    return kExitNotFound;
}

std::string output_path(const CommonArgs& args, const std::string& file) {
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / file).string();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write file: " + path);
    out << text;
}

std::string fmt_complex(const Complex& c) {
    std::string out = fmt_full(c.real());
    if (c.imag() != 0.0) out += (c.imag() > 0.0 ? "+" : "") + fmt_full(c.imag()) + "i";
    return out;
}

int axis_index(const std::string& name) {
    if (name == "x" || name == "0") return 0;
    if (name == "y" || name == "1") return 1;
    if (name == "z" || name == "2") return 2;
    throw ConfigError("axis must be one of x, y, z: " + name);
}

void add_orbit_keys(Resolved& r) {
    r.define("x0", "0.1");
    r.define("y0", "0.1");
    r.define("z0", "0.1");
}

void add_integrator_keys(Resolved& r) {
    r.define("rtol", "1e-9");
    r.define("atol", "1e-12");
    r.define("max_step", "0");
}

// ---------------------------------------------------------------------------
// systems
// ---------------------------------------------------------------------------

int cmd_systems(const CommonArgs& args) {
    const Provenance prov = make_provenance("systems", args, nullptr);
    write_provenance(std::cout, prov);
    for (const SystemInfo& info : system_catalog()) {
        std::cout << info.name << " " << (info.is_flow ? "flow" : "map");
        for (const ParamSpec& p : info.params)
            std::cout << " " << p.name << "=" << fmt_full(p.default_value);
        std::cout << " box=[" << fmt_short(info.box.lo.x) << "," << fmt_short(info.box.hi.x)
                  << "]x[" << fmt_short(info.box.lo.y) << "," << fmt_short(info.box.hi.y) << "]x["
                  << fmt_short(info.box.lo.z) << "," << fmt_short(info.box.hi.z) << "]\n";
        std::cout << "  " << info.summary << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("transient", "0");
    if (info.is_flow) {
        r.define("span", "200");
        r.define("dt", "0.01");
        add_integrator_keys(r);
    } else {
        r.define("n", "2000");
    }
    r.finalize();

    const Provenance prov = make_provenance("simulate", args, &r);
    write_provenance(std::cout, prov);

    std::vector<std::vector<std::string>> rows;
    std::string reason;
    if (info.is_flow) {
        std::visit(
            [&](const auto& flow) {
                IntegratorConfig cfg = r.integrator();
                cfg.box = flow.box();
                Vec3 x = r.triple("x0", "y0", "z0");
                const double transient = r.num("transient");
                if (transient > 0.0) {
                    const Trajectory pre = integrate(flow, x, transient, cfg);
                    if (pre.reason != Termination::TimeReached) {
                        reason = to_string(pre.reason);
                        return;
                    }
                    x = pre.x_end;
                }
                const Trajectory traj =
                    integrate_sampled(flow, x, r.num("span"), r.num("dt"), cfg);
                reason = to_string(traj.reason);
                for (std::size_t i = 0; i < traj.t.size(); ++i)
                    rows.push_back({fmt_full(traj.t[i]), fmt_full(traj.x[i].x),
                                    fmt_full(traj.x[i].y), fmt_full(traj.x[i].z)});
            },
            make_flow(info.name, r.params()));
    } else {
        std::visit(
            [&](const auto& map) {
                const Box box = map.box();
                Vec3 x = r.triple("x0", "y0", "z0");
                reason = to_string(Termination::TimeReached);
                const long long transient = r.integer("transient");
                for (long long i = 0; i < transient; ++i) {
                    x = map.step(x);
                    if (!box.contains(x)) {
                        reason = to_string(Termination::Escaped);
                        return;
                    }
                }
                const long long n = r.integer("n");
                for (long long i = 0; i < n; ++i) {
                    rows.push_back({std::to_string(i), fmt_full(x.x), fmt_full(x.y),
                                    fmt_full(x.z)});
                    x = map.step(x);
                    if (!box.contains(x)) {
                        reason = to_string(Termination::Escaped);
                        return;
                    }
                }
            },
            make_map(info.name, r.params()));
    }

    const std::string path = output_path(args, "simulate-" + info.name + ".csv");
    std::ostringstream csv;
    write_csv(csv, prov, {info.is_flow ? "t" : "n", "x", "y", "z"}, rows);
    write_text_file(path, csv.str());
    std::cout << "termination " << reason << "\n";
    std::cout << "rows " << rows.size() << "\n";
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// equilibria
// ---------------------------------------------------------------------------

int cmd_equilibria(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    Resolved r(&info, args);
    if (!info.is_flow) r.define("period", "1");
    r.finalize();

    const Provenance prov = make_provenance("equilibria", args, &r);
    write_provenance(std::cout, prov);

    std::size_t count = 0;
    if (info.is_flow) {
        std::visit(
            [&](const auto& flow) {
                const auto eqs = find_equilibria(flow);
                count = eqs.size();
                for (const Equilibrium& eq : eqs) {
                    std::cout << "point " << fmt_full(eq.x.x) << " " << fmt_full(eq.x.y) << " "
                              << fmt_full(eq.x.z) << "\n";
                    std::cout << "  type " << to_string(eq.cls.type);
                    if (eq.cls.type == PointType::SaddleFocus21 ||
                        eq.cls.type == PointType::SaddleFocus12)
                        std::cout << " saddle_value " << fmt_full(eq.cls.saddle_value);
                    std::cout << "\n  eigenvalues";
                    for (const Complex& l : eq.spectrum.ev) std::cout << " " << fmt_complex(l);
                    std::cout << "\n";
                }
            },
            make_flow(info.name, r.params()));
    } else {
        std::visit(
            [&](const auto& map) {
                const int period = static_cast<int>(r.integer("period"));
                const auto pts = find_fixed_points(map, period);
                count = pts.size();
                for (const FixedPoint& fp : pts) {
                    std::cout << "point " << fmt_full(fp.x.x) << " " << fmt_full(fp.x.y) << " "
                              << fmt_full(fp.x.z) << "\n";
                    std::cout << "  period " << fp.period << " type " << to_string(fp.cls.type)
                              << (fp.cls.focal ? " focal" : "") << "\n  multipliers";
                    for (const Complex& l : fp.multipliers.ev) std::cout << " " << fmt_complex(l);
                    std::cout << "\n";
                }
            },
            make_map(info.name, r.params()));
    }
    std::cout << "count " << count << "\n";
    if (count == 0) return fail_not_found(prov, "no equilibria found");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// cycle
// ---------------------------------------------------------------------------

int cmd_cycle(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    if (!info.is_flow) throw ConfigError("cycle expects a flow system");
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("settle", "300");
    r.define("t_max", "30");
    r.define("nret", "1");
    add_integrator_keys(r);
    r.finalize();

    const Provenance prov = make_provenance("cycle", args, &r);
    write_provenance(std::cout, prov);

    int code = kExitOk;
    std::visit(
        [&](const auto& flow) {
            const IntegratorConfig cfg = r.integrator();
            const Vec3 seed = settle_orbit(flow, r.triple("x0", "y0", "z0"), r.num("settle"), cfg);
            const auto orbit = refine_cycle(flow, seed, r.num("t_max"),
                                            static_cast<int>(r.integer("nret")), cfg);
            if (!orbit) {
                code = fail_not_found(prov, "no periodic orbit found from this seed");
                return;
            }
            std::cout << "period " << fmt_full(orbit->period) << "\n";
            std::cout << "point " << fmt_full(orbit->x0.x) << " " << fmt_full(orbit->x0.y) << " "
                      << fmt_full(orbit->x0.z) << "\n";
            std::cout << "multipliers " << fmt_complex(orbit->nontrivial[0]) << " "
                      << fmt_complex(orbit->nontrivial[1]) << " trivial "
                      << fmt_complex(orbit->trivial) << "\n";
            std::cout << "focal " << (orbit->focal ? "yes" : "no") << "\n";
            std::cout << "residual " << fmt_full(orbit->residual) << "\n";
        },
        make_flow(info.name, r.params()));
    return code;
}

// ---------------------------------------------------------------------------
// lyapunov
// ---------------------------------------------------------------------------

int cmd_lyapunov(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("dead_band", "1e-3");
    if (info.is_flow) {
        r.define("transient", "500");
        r.define("span", "5000");
        add_integrator_keys(r);
    } else {
        r.define("transient", "100000");
        r.define("n", "200000");
    }
    r.finalize();

    const Provenance prov = make_provenance("lyapunov", args, &r);
    write_provenance(std::cout, prov);

    AttractorScan scan;
    if (info.is_flow) {
        std::visit(
            [&](const auto& flow) {
                scan = classify_attractor(flow, r.triple("x0", "y0", "z0"), r.num("transient"),
                                          r.num("span"), r.num("dead_band"), r.integrator());
            },
            make_flow(info.name, r.params()));
    } else {
        std::visit(
            [&](const auto& map) {
                scan = classify_attractor(map, r.triple("x0", "y0", "z0"), r.integer("transient"),
                                          r.integer("n"), r.num("dead_band"));
            },
            make_map(info.name, r.params()));
    }

    std::cout << "termination " << to_string(scan.lyap.reason) << "\n";
    if (scan.kind == AttractorKind::Diverged)
        return fail_not_found(prov, "orbit left the box; no spectrum available");
    std::cout << "exponents " << fmt_full(scan.lyap.lam[0]) << " " << fmt_full(scan.lyap.lam[1])
              << " " << fmt_full(scan.lyap.lam[2]) << "\n";
    std::cout << "drift " << fmt_full(scan.lyap.drift) << "\n";
    std::cout << "kind " << to_string(scan.kind) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// manifold
// ---------------------------------------------------------------------------

int cmd_manifold(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    if (!info.is_flow) throw ConfigError("manifold expects a flow system");
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("mode", "branch");
    r.define("side", "1");
    r.define("delta", "1e-5");
    r.define("arc_cap", "1000");
    r.define("t_cap", "1000");
    r.define("rays", "16");
    r.define("span", "100");
    add_integrator_keys(r);
    r.finalize();

    const Provenance prov = make_provenance("manifold", args, &r);
    write_provenance(std::cout, prov);

    int code = kExitOk;
    std::visit(
        [&](const auto& flow) {
            const auto root = newton_equilibrium(flow, r.triple("x0", "y0", "z0"));
            if (!root) {
                code = fail_not_found(prov, "no equilibrium near the given guess");
                return;
            }
            const Equilibrium eq = classify_equilibrium(flow, *root);
            std::cout << "point " << fmt_full(eq.x.x) << " " << fmt_full(eq.x.y) << " "
                      << fmt_full(eq.x.z) << " type " << to_string(eq.cls.type) << "\n";

            const std::string mode = r.str("mode");
            std::vector<std::vector<std::string>> rows;
            if (mode == "branch") {
                SeparatrixOptions opt;
                opt.delta = r.num("delta");
                opt.arc_cap = r.num("arc_cap");
                opt.t_cap = r.num("t_cap");
                opt.cfg = r.integrator();
                const Separatrix sep = track_separatrix(flow, eq, r.num("side"), opt);
                for (std::size_t i = 0; i < sep.traj.t.size(); ++i)
                    rows.push_back({fmt_full(sep.traj.t[i]), fmt_full(sep.traj.x[i].x),
                                    fmt_full(sep.traj.x[i].y), fmt_full(sep.traj.x[i].z)});
                const std::string path = output_path(args, "manifold-" + info.name + ".csv");
                std::ostringstream csv;
                write_csv(csv, prov, {"t", "x", "y", "z"}, rows);
                write_text_file(path, csv.str());
                std::cout << "arc_length " << fmt_full(sep.arc_length) << "\n";
                std::cout << "termination " << to_string(sep.traj.reason) << "\n";
                std::cout << "wrote " << path << "\n";
            } else if (mode == "surface") {
                const SurfaceRing ring = grow_spiral_surface(
                    flow, eq, static_cast<int>(r.integer("rays")), r.num("delta"), r.num("span"),
                    r.integrator());
                for (std::size_t k = 0; k < ring.rays.size(); ++k)
                    for (std::size_t i = 0; i < ring.rays[k].t.size(); ++i)
                        rows.push_back({std::to_string(k), fmt_full(ring.rays[k].t[i]),
                                        fmt_full(ring.rays[k].x[i].x),
                                        fmt_full(ring.rays[k].x[i].y),
                                        fmt_full(ring.rays[k].x[i].z)});
                const std::string path = output_path(args, "manifold-" + info.name + ".csv");
                std::ostringstream csv;
                write_csv(csv, prov, {"ray", "t", "x", "y", "z"}, rows);
                write_text_file(path, csv.str());
                std::cout << "rays " << ring.rays.size() << "\n";
                std::cout << "wrote " << path << "\n";
            } else {
                throw ConfigError("mode must be branch or surface: " + mode);
            }
        },
        make_flow(info.name, r.params()));
    return code;
}

// ---------------------------------------------------------------------------
// homoclinic
// ---------------------------------------------------------------------------

int cmd_homoclinic(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    if (!info.is_flow) throw ConfigError("homoclinic expects a flow system");
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("param", info.params.front().name);
    r.define("lo", "");
    r.define("hi", "");
    r.define("n_scan", "21");
    r.define("d_pass_max", "0.3");
    r.define("side", "-1");
    r.define("t_max", "300");
    r.define("r_far", "0.7");
    r.finalize();

    const Provenance prov = make_provenance("homoclinic", args, &r);
    write_provenance(std::cout, prov);

    const std::string scan_key = r.str("param");
    if (!r.is_param(scan_key)) throw ConfigError("not a parameter of this system: " + scan_key);
    const double lo = r.required_num("lo");
    const double hi = r.required_num("hi");

    int code = kExitOk;
    std::visit(
        [&](const auto& base) {
            using Sys = std::decay_t<decltype(base)>;
            auto make = [&](double v) {
                ParameterSet p = r.params();
                p.set(scan_key, v);
                return Sys::from(resolve_params(Sys::kSchema, p));
            };
            HomoclinicOptions opt;
            opt.n_scan = static_cast<int>(r.integer("n_scan"));
            opt.d_pass_max = r.num("d_pass_max");
            opt.split.side = r.num("side");
            opt.split.t_max = r.num("t_max");
            opt.split.r_far = r.num("r_far");
            const auto roots = locate_homoclinic(make, r.triple("x0", "y0", "z0"), lo, hi, opt);
            for (const HomoclinicPoint& h : roots) {
                std::cout << "connection " << scan_key << "=" << fmt_full(h.param) << " d_pass="
                          << fmt_full(h.split.d_pass) << " saddle=" << to_string(h.saddle.cls.type)
                          << "\n";
            }
            std::cout << "count " << roots.size() << "\n";
            if (roots.empty())
                code = fail_not_found(prov, "no splitting zero with a close pass in the range");
        },
        make_flow(info.name, r.params()));
    return code;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

std::vector<std::vector<std::string>> sweep_rows_to_csv(const std::vector<SweepRow>& rows) {
    std::vector<std::vector<std::string>> out;
    out.reserve(rows.size());
    for (const SweepRow& row : rows) {
        std::string section;
        for (std::size_t i = 0; i < row.section.size(); ++i) {
            if (i) section += ";";
            section += fmt_full(row.section[i]);
        }
        out.push_back({fmt_full(row.param), to_string(row.kind), fmt_full(row.lam[0]),
                       fmt_full(row.lam[1]), fmt_full(row.lam[2]), fmt_full(row.drift),
                       fmt_full(row.d_min), std::to_string(row.components),
                       std::to_string(row.flags), section});
    }
    return out;
}

int cmd_sweep(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("param", info.params.front().name);
    r.define("lo", "");
    r.define("hi", "");
    r.define("n", "41");
    r.define("d_min", "0");
    r.define("section", "0");
    if (info.is_flow) {
        r.define("transient", "500");
        r.define("horizon", "5000");
        r.define("sec_cx", "0");
        r.define("sec_cy", "0");
        r.define("sec_cz", "0");
        r.define("sec_nx", "0");
        r.define("sec_ny", "1");
        r.define("sec_nz", "0");
        add_integrator_keys(r);
    } else {
        r.define("transient", "100000");
        r.define("samples", "200000");
        r.define("components", "0");
        r.define("coord", "0");
    }
    r.finalize();

    const Provenance prov = make_provenance("sweep", args, &r);
    write_provenance(std::cout, prov);

    const std::string scan_key = r.str("param");
    if (!r.is_param(scan_key)) throw ConfigError("not a parameter of this system: " + scan_key);
    const auto grid =
        param_grid(r.required_num("lo"), r.required_num("hi"), static_cast<int>(r.integer("n")));
    const Vec3 anchor = r.triple("x0", "y0", "z0");

    std::vector<SweepRow> rows;
    if (info.is_flow) {
        std::visit(
            [&](const auto& base) {
                using Sys = std::decay_t<decltype(base)>;
                auto make = [&](double v) {
                    ParameterSet p = r.params();
                    p.set(scan_key, v);
                    return Sys::from(resolve_params(Sys::kSchema, p));
                };
                FlowSweepOptions opt;
                opt.transient = r.num("transient");
                opt.horizon = r.num("horizon");
                opt.want_d_min = r.integer("d_min") != 0;
                if (r.integer("section") != 0)
                    opt.section = SectionPlane{r.triple("sec_cx", "sec_cy", "sec_cz"),
                                               r.triple("sec_nx", "sec_ny", "sec_nz"),
                                               {}};
                opt.jobs = args.jobs;
                opt.cfg = r.integrator();
                rows = sweep_flow(make, grid, anchor, opt);
            },
            make_flow(info.name, r.params()));
    } else {
        std::visit(
            [&](const auto& base) {
                using Sys = std::decay_t<decltype(base)>;
                auto make = [&](double v) {
                    ParameterSet p = r.params();
                    p.set(scan_key, v);
                    return Sys::from(resolve_params(Sys::kSchema, p));
                };
                MapSweepOptions opt;
                opt.transient = r.integer("transient");
                opt.samples = r.integer("samples");
                opt.want_d_min = r.integer("d_min") != 0;
                opt.want_components = r.integer("components") != 0;
                opt.want_section = r.integer("section") != 0;
                opt.section_coordinate = axis_index(r.str("coord"));
                opt.jobs = args.jobs;
                rows = sweep_map(make, grid, anchor, opt);
            },
            make_map(info.name, r.params()));
    }

    const std::string path = output_path(args, "sweep-" + info.name + ".csv");
    std::ostringstream csv;
    write_csv(csv, prov,
              {"param", "kind", "lam1", "lam2", "lam3", "drift", "d_min", "components", "flags",
               "section"},
              sweep_rows_to_csv(rows));
    write_text_file(path, csv.str());
    std::cout << "rows " << rows.size() << "\n";
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

int cmd_scenario(const CommonArgs& args, const std::string& preset) {
    CommonArgs named = args;
    named.system.clear();
    const Provenance prov = [&] {
        Provenance p;
        p.command = "scenario";
        p.config.emplace_back("preset", preset);
        p.seed = args.seed;
        return p;
    }();
    write_provenance(std::cout, prov);

    const ScenarioReport report = run_scenario(preset);
    std::vector<std::vector<std::string>> rows;
    for (const Stage& s : report.stages) {
        std::cout << "stage " << to_string(s.kind) << " "
                  << (s.located ? "param=" + fmt_full(s.param) : "gap");
        if (!s.note.empty()) std::cout << " (" << s.note << ")";
        std::cout << "\n";
        rows.push_back({to_string(s.kind), s.located ? "yes" : "no",
                        s.located ? fmt_full(s.param) : "", s.note});
    }
    std::cout << "ordered " << (report.ordered ? "yes" : "no") << "\n";

    const std::string path = output_path(named, "scenario-" + preset + ".csv");
    std::ostringstream csv;
    write_csv(csv, prov, {"stage", "located", "param", "note"}, rows);
    write_text_file(path, csv.str());
    std::cout << "wrote " << path << "\n";

    if (!report.ordered)
        return fail_not_found(prov, "located stages violate the expected parameter ordering");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

PlotLimits fit_limits(const std::vector<std::pair<double, double>>& pts) {
    if (pts.empty()) throw DomainError("nothing to plot");
    PlotLimits lim{kInf, -kInf, kInf, -kInf};
    for (const auto& [x, y] : pts) {
        lim.x_lo = std::min(lim.x_lo, x);
        lim.x_hi = std::max(lim.x_hi, x);
        lim.y_lo = std::min(lim.y_lo, y);
        lim.y_hi = std::max(lim.y_hi, y);
    }
    const double dx = lim.x_hi - lim.x_lo, dy = lim.y_hi - lim.y_lo;
    const double px = dx > 0.0 ? 0.05 * dx : 1.0, py = dy > 0.0 ? 0.05 * dy : 1.0;
    lim.x_lo -= px;
    lim.x_hi += px;
    lim.y_lo -= py;
    lim.y_hi += py;
    return lim;
}

int cmd_plot(const CommonArgs& args) {
    const SystemInfo& info = system_info(args.system);
    Resolved r(&info, args);
    add_orbit_keys(r);
    r.define("mode", "attractor");
    r.define("ax", "x");
    r.define("ay", "y");
    r.define("transient", info.is_flow ? "200" : "10000");
    if (info.is_flow) {
        r.define("span", "500");
        r.define("dt", "0.01");
        add_integrator_keys(r);
    } else {
        r.define("n", "20000");
    }
    r.finalize();

    const Provenance prov = make_provenance("plot", args, &r);
    write_provenance(std::cout, prov);

    const std::string mode = r.str("mode");
    if (mode != "attractor") throw ConfigError("mode must be attractor: " + mode);
    const int ai = axis_index(r.str("ax"));
    const int aj = axis_index(r.str("ay"));
    const char* names[3] = {"x", "y", "z"};

    std::vector<std::pair<double, double>> pts;
    bool as_line = info.is_flow;
    if (info.is_flow) {
        std::visit(
            [&](const auto& flow) {
                IntegratorConfig cfg = r.integrator();
                cfg.box = flow.box();
                Vec3 x = r.triple("x0", "y0", "z0");
                const double transient = r.num("transient");
                if (transient > 0.0) {
                    const Trajectory pre = integrate(flow, x, transient, cfg);
                    if (pre.reason != Termination::TimeReached) return;
                    x = pre.x_end;
                }
                const Trajectory traj =
                    integrate_sampled(flow, x, r.num("span"), r.num("dt"), cfg);
                pts.reserve(traj.x.size());
                for (const Vec3& p : traj.x) pts.emplace_back(p[ai], p[aj]);
            },
            make_flow(info.name, r.params()));
    } else {
        std::visit(
            [&](const auto& map) {
                const Box box = map.box();
                Vec3 x = r.triple("x0", "y0", "z0");
                const long long transient = r.integer("transient");
                for (long long i = 0; i < transient; ++i) {
                    x = map.step(x);
                    if (!box.contains(x)) return;
                }
                const long long n = r.integer("n");
                pts.reserve(static_cast<std::size_t>(n));
                for (long long i = 0; i < n; ++i) {
                    pts.emplace_back(x[ai], x[aj]);
                    x = map.step(x);
                    if (!box.contains(x)) return;
                }
            },
            make_map(info.name, r.params()));
    }

    if (pts.empty()) return fail_not_found(prov, "orbit left the box before any samples");

    SvgPlot plot(fit_limits(pts), info.name + std::string(" attractor"), names[ai], names[aj]);
    if (as_line)
        plot.polyline(pts, "#1f6fb4", 0.6);
    else
        plot.scatter(pts, "#1f6fb4", 0.7);
    const std::string path = output_path(args, "plot-" + info.name + ".svg");
    std::ostringstream svg;
    plot.render(svg, prov);
    write_text_file(path, svg.str());
    std::cout << "points " << pts.size() << "\n";
    std::cout << "wrote " << path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiral-attractor toolkit: locate, characterize, and sweep the bifurcation "
                 "scenarios of three-dimensional flows and maps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.failure_message(CLI::FailureMessage::help);

    CommonArgs args;
    std::string preset;

    auto add_common = [&](CLI::App* sub, bool with_system) {
        if (with_system)
            sub->add_option("--system", args.system, "system name (see the systems command)")
                ->required();
        sub->add_option("--config", args.config_path, "flat key=value settings file");
        sub->add_option("--set", args.sets, "override one setting or parameter, key=value");
        sub->add_option("--out", args.out_dir, "output directory for generated files");
        sub->add_option("--seed", args.seed, "seed recorded in provenance headers");
        return sub;
    };

    add_common(app.add_subcommand("systems", "list the built-in systems"), false);
    add_common(app.add_subcommand("simulate", "integrate or iterate one orbit to CSV"), true);
    add_common(app.add_subcommand("equilibria", "find and classify equilibria / fixed points"),
               true);
    add_common(app.add_subcommand("cycle", "refine a periodic orbit and its multipliers"), true);
    add_common(app.add_subcommand("lyapunov", "Lyapunov spectrum and attractor class"), true);
    add_common(app.add_subcommand("manifold", "track a separatrix branch or spiral surface"),
               true);
    add_common(app.add_subcommand("homoclinic", "locate homoclinic connections in a range"), true);
    auto* sweep_cmd =
        add_common(app.add_subcommand("sweep", "classify attractors across a parameter grid"),
                   true);
    sweep_cmd->add_option("--jobs", args.jobs, "contiguous parameter blocks run concurrently")
        ->check(CLI::PositiveNumber);
    auto* scenario_cmd =
        add_common(app.add_subcommand("scenario", "run a preset bifurcation-scenario report"),
                   false);
    scenario_cmd->add_option("--preset", preset, "scenario preset name")
        ->required()
        ->check(CLI::IsMember(scenario_presets()));
    add_common(app.add_subcommand("plot", "render an attractor projection to SVG"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "systems") return cmd_systems(args);
        if (name == "simulate") return cmd_simulate(args);
        if (name == "equilibria") return cmd_equilibria(args);
        if (name == "cycle") return cmd_cycle(args);
        if (name == "lyapunov") return cmd_lyapunov(args);
        if (name == "manifold") return cmd_manifold(args);
        if (name == "homoclinic") return cmd_homoclinic(args);
        if (name == "sweep") return cmd_sweep(args);
        if (name == "scenario") return cmd_scenario(args, preset);
        if (name == "plot") return cmd_plot(args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        err["command"] = name;
        std::cout << err.dump() << "\n";
        return kExitNotFound;
    }
    return kExitUsage;
}
