#pragma once

#include <concepts>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spiral/core.hpp"

namespace spiral {

// Named real parameters. Order is preserved for deterministic echoing.
class ParameterSet {
public:
    ParameterSet() = default;

    ParameterSet(std::initializer_list<std::pair<const char*, double>> init) {
        for (const auto& [k, v] : init) set(k, v);
    }

    bool has(std::string_view name) const {
        for (const auto& [k, v] : kv_)
            if (k == name) return true;
        return false;
    }

    double get(std::string_view name) const {
        for (const auto& [k, v] : kv_)
            if (k == name) return v;
        throw ConfigError("missing parameter: " + std::string(name));
    }

    void set(std::string_view name, double value) {
        if (!std::isfinite(value))
            throw DomainError("non-finite value for parameter: " + std::string(name));
        for (auto& [k, v] : kv_)
            if (k == name) { v = value; return; }
        kv_.emplace_back(std::string(name), value);
    }

    const std::vector<std::pair<std::string, double>>& items() const { return kv_; }

private:
    std::vector<std::pair<std::string, double>> kv_;
};

struct ParamSpec {
    const char* name;
    double default_value;
};

// Fills a schema's defaults, then applies overrides; unknown names are rejected.
inline ParameterSet resolve_params(std::span<const ParamSpec> schema,
                                   const ParameterSet& overrides) {
    ParameterSet out;
    for (const ParamSpec& p : schema) out.set(p.name, p.default_value);
    for (const auto& [k, v] : overrides.items()) {
        bool known = false;
        for (const ParamSpec& p : schema)
            if (k == p.name) known = true;
        if (!known) throw ConfigError("unknown parameter: " + k);
        out.set(k, v);
    }
    return out;
}

template <class F>
concept FlowLike = requires(const F f, const Vec3 s) {
    { f.rhs(s) } -> std::same_as<Vec3>;
    { f.jac(s) } -> std::same_as<Mat3>;
    { f.box() } -> std::same_as<Box>;
    { f.max_step() } -> std::same_as<double>;
};

template <class M>
concept MapLike = requires(const M m, const Vec3 s) {
    { m.step(s) } -> std::same_as<Vec3>;
    { m.jac(s) } -> std::same_as<Mat3>;
    { m.box() } -> std::same_as<Box>;
};

// x' = y, y' = z, z' = -y - beta z + mu x (1 - x).
// Constant divergence -beta; equilibria at (0,0,0) and (1,0,0).
struct ActFlow {
    static constexpr const char* kName = "act";
    static constexpr ParamSpec kSchema[] = {{"mu", 0.8}, {"beta", 0.4}};

    double mu = 0.8, beta = 0.4;

    static ActFlow from(const ParameterSet& ps) {
        return {ps.get("mu"), ps.get("beta")};
    }

    Vec3 rhs(const Vec3& s) const {
        return {s.y, s.z, -s.y - beta * s.z + mu * s.x * (1.0 - s.x)};
    }

    Mat3 jac(const Vec3& s) const {
        return Mat3::from_rows({0, 1, 0}, {0, 0, 1}, {mu * (1.0 - 2.0 * s.x), -1.0, -beta});
    }

    Box box() const { return {{-2, -2, -2}, {3, 3, 3}}; }
    double max_step() const { return kInf; }

    ParameterSet params() const {
        ParameterSet p;
        p.set("mu", mu);
        p.set("beta", beta);
        return p;
    }
};

// Chemical-oscillator flow:
//   x' = x (beta x - f y - z + g)
//   y' = y (x + s z - alpha)
//   z' = (x - alpha z^3 + b z^2 - c z) / eps
// The 1/eps factor makes z fast; integration caps the step at eps/2.
struct GnFlow {
    static constexpr const char* kName = "gaspard-nicolis";
    static constexpr ParamSpec kSchema[] = {
        {"beta", 0.3}, {"b", 3.0},   {"eps", 0.01}, {"f", 0.5},
        {"g", 0.6},    {"s", 0.3},   {"c", 4.8},    {"alpha", 0.7825}};

    double beta = 0.3, b = 3.0, eps = 0.01, f = 0.5, g = 0.6, s = 0.3, c = 4.8,
           alpha = 0.7825;

    static GnFlow from(const ParameterSet& ps) {
        GnFlow sys{ps.get("beta"), ps.get("b"),  ps.get("eps"), ps.get("f"),
                   ps.get("g"),    ps.get("s"),  ps.get("c"),   ps.get("alpha")};
        if (!(sys.eps > 0.0)) throw ConfigError("gaspard-nicolis requires eps > 0");
        return sys;
    }

    Vec3 rhs(const Vec3& st) const {
        return {st.x * (beta * st.x - f * st.y - st.z + g),
                st.y * (st.x + s * st.z - alpha),
                (st.x - alpha * st.z * st.z * st.z + b * st.z * st.z - c * st.z) / eps};
    }

    Mat3 jac(const Vec3& st) const {
        return Mat3::from_rows(
            {2.0 * beta * st.x - f * st.y - st.z + g, -f * st.x, -st.x},
            {st.y, st.x + s * st.z - alpha, s * st.y},
            {1.0 / eps, 0.0, (-3.0 * alpha * st.z * st.z + 2.0 * b * st.z - c) / eps});
    }

    Box box() const { return {{-1, -1, -1}, {10, 10, 10}}; }
    double max_step() const { return eps / 2.0; }

    ParameterSet params() const {
        ParameterSet p;
        p.set("beta", beta);
        p.set("b", b);
        p.set("eps", eps);
        p.set("f", f);
        p.set("g", g);
        p.set("s", s);
        p.set("c", c);
        p.set("alpha", alpha);
        return p;
    }
};

// Three-dimensional quadratic map in companion form:
//   (x, y, z) -> (y, z, B x + C y + A z - y^2)
// Constant Jacobian determinant B; the origin is always a fixed point.
struct MiraCMap {
    static constexpr const char* kName = "mira";
    static constexpr ParamSpec kSchema[] = {{"A", 1.49}, {"B", 0.5}, {"C", -1.7}};

    double A = 1.49, B = 0.5, C = -1.7;

    static MiraCMap from(const ParameterSet& ps) {
        return {ps.get("A"), ps.get("B"), ps.get("C")};
    }

    Vec3 step(const Vec3& s) const {
        return {s.y, s.z, B * s.x + C * s.y + A * s.z - s.y * s.y};
    }

    Mat3 jac(const Vec3& s) const {
        return Mat3::from_rows({0, 1, 0}, {0, 0, 1}, {B, C - 2.0 * s.y, A});
    }

    Box box() const { return {{-100, -100, -100}, {100, 100, 100}}; }
    int orientation() const { return B > 0.0 ? 1 : (B < 0.0 ? -1 : 0); }

    ParameterSet params() const {
        ParameterSet p;
        p.set("A", A);
        p.set("B", B);
        p.set("C", C);
        return p;
    }
};

// Variant of the quadratic map with an affine offset:
//   (x, y, z) -> (y, z, M1 + B x + M2 z - y^2)
// Fixed points are away from the origin and are found numerically.
struct MiraMMap {
    static constexpr const char* kName = "mira-m";
    static constexpr ParamSpec kSchema[] = {{"M1", 0.35}, {"M2", 0.8}, {"B", 0.7}};

    double M1 = 0.35, M2 = 0.8, B = 0.7;

    static MiraMMap from(const ParameterSet& ps) {
        return {ps.get("M1"), ps.get("M2"), ps.get("B")};
    }

    Vec3 step(const Vec3& s) const {
        return {s.y, s.z, M1 + B * s.x + M2 * s.z - s.y * s.y};
    }

    Mat3 jac(const Vec3& s) const {
        return Mat3::from_rows({0, 1, 0}, {0, 0, 1}, {B, -2.0 * s.y, M2});
    }

    Box box() const { return {{-100, -100, -100}, {100, 100, 100}}; }
    int orientation() const { return B > 0.0 ? 1 : (B < 0.0 ? -1 : 0); }

    ParameterSet params() const {
        ParameterSet p;
        p.set("M1", M1);
        p.set("M2", M2);
        p.set("B", B);
        return p;
    }
};

using FlowVariant = std::variant<ActFlow, GnFlow>;
using MapVariant = std::variant<MiraCMap, MiraMMap>;

// Checked evaluation entry points (the raw rhs/step/jac skip the checks for
// speed inside the integrator loops).
template <FlowLike F>
Vec3 eval(const F& f, const Vec3& s) {
    if (!finite(s)) throw DomainError("non-finite state");
    return f.rhs(s);
}

template <MapLike M>
Vec3 eval(const M& m, const Vec3& s) {
    if (!finite(s)) throw DomainError("non-finite state");
    return m.step(s);
}

template <class S>
Mat3 eval_jacobian(const S& sys, const Vec3& s) {
    if (!finite(s)) throw DomainError("non-finite state");
    return sys.jac(s);
}

struct SystemInfo {
    std::string name;
    bool is_flow;
    std::vector<ParamSpec> params;
    std::string summary;
    Box box;
};

inline const std::vector<SystemInfo>& system_catalog() {
    static const std::vector<SystemInfo> cat = {
        {ActFlow::kName, true,
         {ActFlow::kSchema[0], ActFlow::kSchema[1]},
         "cubic-nonlinearity flow with constant divergence -beta", ActFlow{}.box()},
        {GnFlow::kName, true,
         {GnFlow::kSchema[0], GnFlow::kSchema[1], GnFlow::kSchema[2], GnFlow::kSchema[3],
          GnFlow::kSchema[4], GnFlow::kSchema[5], GnFlow::kSchema[6], GnFlow::kSchema[7]},
         "chemical-oscillator flow with fast z variable (stiffness 1/eps)", GnFlow{}.box()},
        {MiraCMap::kName, false,
         {MiraCMap::kSchema[0], MiraCMap::kSchema[1], MiraCMap::kSchema[2]},
         "quadratic 3D map, companion form, det = B", MiraCMap{}.box()},
        {MiraMMap::kName, false,
         {MiraMMap::kSchema[0], MiraMMap::kSchema[1], MiraMMap::kSchema[2]},
         "quadratic 3D map with affine offset, det = B", MiraMMap{}.box()},
    };
    return cat;
}

inline bool is_flow_name(std::string_view name) {
    return name == ActFlow::kName || name == GnFlow::kName;
}

inline bool is_map_name(std::string_view name) {
    return name == MiraCMap::kName || name == MiraMMap::kName;
}

inline FlowVariant make_flow(std::string_view name, const ParameterSet& overrides) {
    if (name == ActFlow::kName)
        return ActFlow::from(resolve_params(ActFlow::kSchema, overrides));
    if (name == GnFlow::kName)
        return GnFlow::from(resolve_params(GnFlow::kSchema, overrides));
    throw ConfigError("unknown flow system: " + std::string(name));
}

inline MapVariant make_map(std::string_view name, const ParameterSet& overrides) {
    if (name == MiraCMap::kName)
        return MiraCMap::from(resolve_params(MiraCMap::kSchema, overrides));
    if (name == MiraMMap::kName)
        return MiraMMap::from(resolve_params(MiraMMap::kSchema, overrides));
    throw ConfigError("unknown map system: " + std::string(name));
}

}  // namespace spiral
