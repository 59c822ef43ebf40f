#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "spiral/eigen3.hpp"
#include "spiral/integrate.hpp"

namespace spiral {

enum class AttractorKind { Diverged, Point, Cycle, Torus, Curve, Chaotic };

inline const char* to_string(AttractorKind k) {
    switch (k) {
        case AttractorKind::Diverged: return "diverged";
        case AttractorKind::Point: return "point";
        case AttractorKind::Cycle: return "cycle";
        case AttractorKind::Torus: return "torus";
        case AttractorKind::Curve: return "curve";
        case AttractorKind::Chaotic: return "chaotic";
    }
    return "?";
}

struct LyapunovResult {
    std::array<double, 3> lam{};  // descending
    double drift = kInf;          // half-window vs full-window largest exponent
    double span = 0.0;            // time units (flows) or iterates (maps) measured
    Termination reason = Termination::TimeReached;
    Vec3 x_end;
};

// Tangent-frame exponents with periodic reorthonormalization. The seed is
// settled for t_transient first; the measurement window is split in half so
// the drift between halves exposes unconverged estimates.
template <FlowLike F>
LyapunovResult lyapunov_flow(const F& flow, const Vec3& seed, double t_transient,
                             double t_total, double renorm_interval = 1.0,
                             IntegratorConfig cfg = {}) {
    if (!cfg.box) cfg.box = flow.box();
    LyapunovResult out;
    const Trajectory pre = integrate_stream(
        flow, seed, t_transient, cfg, {},
        [](const DenseStep<3>&) { return StepAction::Continue; }, false);
    out.reason = pre.reason;
    out.x_end = pre.x_end;
    if (pre.reason != Termination::TimeReached) return out;

    const double half = 0.5 * t_total;
    const VariationalResult a =
        integrate_with_tangents(flow, pre.x_end, Mat3::identity(), half, cfg, renorm_interval);
    out.reason = a.reason;
    out.x_end = a.x_end;
    if (a.reason != Termination::TimeReached) return out;
    const VariationalResult b =
        integrate_with_tangents(flow, a.x_end, a.Q_end, half, cfg, renorm_interval);
    out.reason = b.reason;
    out.x_end = b.x_end;
    if (b.reason != Termination::TimeReached) return out;

    const Vec3 sums = a.log_sums + b.log_sums;
    for (int i = 0; i < 3; ++i) out.lam[i] = sums[i] / t_total;
    std::sort(out.lam.begin(), out.lam.end(), std::greater<>());
    out.drift = std::abs(a.log_sums.x / half - sums.x / t_total);
    out.span = t_total;
    return out;
}

// Per-iterate Jacobian QR accumulation for maps.
template <MapLike M>
LyapunovResult lyapunov_map(const M& map, Vec3 x, long long transient, long long n) {
    LyapunovResult out;
    const Box box = map.box();
    for (long long i = 0; i < transient; ++i) {
        x = map.step(x);
        if (!box.contains(x)) {
            out.reason = Termination::Escaped;
            out.x_end = x;
            return out;
        }
    }
    Mat3 Q = Mat3::identity();
    Vec3 acc{0, 0, 0};
    Vec3 acc_half{0, 0, 0};
    for (long long i = 0; i < n; ++i) {
        x = map.step(x);
        if (!box.contains(x)) {
            out.reason = Termination::Escaped;
            out.x_end = x;
            return out;
        }
        Mat3 W = map.jac(x) * Q;
        const Vec3 norms = detail::gram_schmidt(W);
        Q = W;
        for (int c = 0; c < 3; ++c) acc[c] += std::log(std::max(norms[c], 1e-300));
        if (i + 1 == n / 2) acc_half = acc;
    }
    for (int i = 0; i < 3; ++i) out.lam[i] = acc[i] / static_cast<double>(n);
    std::sort(out.lam.begin(), out.lam.end(), std::greater<>());
    out.drift = std::abs(acc_half.x / static_cast<double>(n / 2) -
                         acc.x / static_cast<double>(n));
    out.span = static_cast<double>(n);
    out.x_end = x;
    return out;
}

// Exponent taxonomy with a dead band around zero: flows own a neutral
// direction along the vector field, maps do not.
inline AttractorKind classify_spectrum(const std::array<double, 3>& lam, bool is_flow,
                                       double dead_band = 1e-3) {
    if (lam[0] > dead_band) return AttractorKind::Chaotic;
    if (lam[0] < -dead_band) return AttractorKind::Point;
    if (!is_flow) return AttractorKind::Curve;
    return lam[1] > -dead_band ? AttractorKind::Torus : AttractorKind::Cycle;
}

struct AttractorScan {
    LyapunovResult lyap;
    AttractorKind kind = AttractorKind::Diverged;
};

template <FlowLike F>
AttractorScan classify_attractor(const F& flow, const Vec3& seed, double t_transient,
                                 double t_total, double dead_band = 1e-3,
                                 IntegratorConfig cfg = {}) {
    AttractorScan out;
    out.lyap = lyapunov_flow(flow, seed, t_transient, t_total, 1.0, cfg);
    if (out.lyap.reason == Termination::TimeReached)
        out.kind = classify_spectrum(out.lyap.lam, true, dead_band);
    return out;
}

template <MapLike M>
AttractorScan classify_attractor(const M& map, const Vec3& seed, long long transient,
                                 long long n, double dead_band = 1e-3) {
    AttractorScan out;
    out.lyap = lyapunov_map(map, seed, transient, n);
    if (out.lyap.reason == Termination::TimeReached)
        out.kind = classify_spectrum(out.lyap.lam, false, dead_band);
    return out;
}

namespace detail {

// Uniform-cell spatial hash over a point cloud for nearest-neighbor queries.
class PointGrid {
  public:
    PointGrid(const std::vector<Vec3>& pts, double cell) : pts_(pts), cell_(cell) {
        lo_ = pts.front();
        for (const Vec3& p : pts) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            lo_.z = std::min(lo_.z, p.z);
        }
        cells_.reserve(pts.size());
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            cells_[key_of(pts[i])].push_back(i);
    }

    // Nearest distinct point; expands the shell radius until the found
    // distance is certified against all unexplored cells, which lie farther
    // than cell times the number of scanned shells.
    double nearest_distance(int i) const {
        const Vec3 p = pts_[i];
        double best = kInf;
        for (int shell = 0;; ++shell) {
            scan_shell(p, shell, [&](int j) {
                if (j == i) return;
                best = std::min(best, norm(pts_[j] - p));
            });
            if (best <= cell_ * shell || shell > 1024) return best;
        }
    }

    // Visits every stored index whose distance to p can be at most radius:
    // anything within radius lies at most ceil(radius / cell) cells away on
    // each axis.
    template <class Fn>
    void visit_within(const Vec3& p, double radius, Fn&& fn) const {
        const int shells = static_cast<int>(std::ceil(radius / cell_ - 1e-12));
        for (int s = 0; s <= shells; ++s) scan_shell(p, s, fn);
    }

  private:
    static constexpr std::int64_t kOff = 1 << 20;

    std::int64_t key_of(const Vec3& p) const {
        const auto ix = static_cast<std::int64_t>(std::floor((p.x - lo_.x) / cell_)) + kOff;
        const auto iy = static_cast<std::int64_t>(std::floor((p.y - lo_.y) / cell_)) + kOff;
        const auto iz = static_cast<std::int64_t>(std::floor((p.z - lo_.z) / cell_)) + kOff;
        return (ix << 42) | (iy << 21) | iz;
    }

    template <class Fn>
    void scan_shell(const Vec3& p, int shell, Fn&& fn) const {
        const auto cx = static_cast<std::int64_t>(std::floor((p.x - lo_.x) / cell_)) + kOff;
        const auto cy = static_cast<std::int64_t>(std::floor((p.y - lo_.y) / cell_)) + kOff;
        const auto cz = static_cast<std::int64_t>(std::floor((p.z - lo_.z) / cell_)) + kOff;
        for (std::int64_t dx = -shell; dx <= shell; ++dx)
            for (std::int64_t dy = -shell; dy <= shell; ++dy)
                for (std::int64_t dz = -shell; dz <= shell; ++dz) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != shell)
                        continue;
                    const std::int64_t k =
                        ((cx + dx) << 42) | ((cy + dy) << 21) | (cz + dz);
                    const auto it = cells_.find(k);
                    if (it == cells_.end()) continue;
                    for (int j : it->second) fn(j);
                }
    }

    const std::vector<Vec3>& pts_;
    double cell_;
    Vec3 lo_;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

// Median nearest-neighbor spacing, estimated over a deterministic stride
// subsample of query points against the full cloud.
inline double median_nn_distance(const std::vector<Vec3>& pts) {
    Vec3 lo = pts.front(), hi = pts.front();
    for (const Vec3& p : pts) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
    const double diag = norm(hi - lo);
    if (diag == 0.0) return 0.0;
    const int n = static_cast<int>(pts.size());
    const double cell = std::max(diag * 12.0 / n, diag / 60000.0);
    const PointGrid grid(pts, cell);
    const int stride = std::max(1, n / 8192);
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n / stride) + 1);
    for (int i = 0; i < n; i += stride) d.push_back(grid.nearest_distance(i));
    const auto mid = d.begin() + d.size() / 2;
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

// Largest k among {2, 4, 8} whose index-mod-k parts stay farther apart than
// factor times the median sample spacing; 1 when none do.
inline int piece_count(const std::vector<Vec3>& pts, double mednn, double factor = 8.0) {
    if (mednn <= 0.0) return 1;
    const double sep = factor * mednn;
    const PointGrid grid(pts, sep);
    int best = 1;
    for (int k : {2, 4, 8}) {
        bool separated = true;
        for (int i = 0; i < static_cast<int>(pts.size()) && separated; ++i)
            grid.visit_within(pts[i], sep, [&](int j) {
                if (j % k == i % k) return;
                if (norm(pts[j] - pts[i]) <= sep) separated = false;
            });
        if (separated) best = k;
    }
    return best;
}

// Cluster count of a value set from its sorted-gap spectrum: c clusters need
// the (c-1) widest gaps to dominate the next one. 0 means too few values.
inline int gap_cluster_count(std::vector<double> vals, double ratio_threshold = 3.0,
                             double min_sep = 1e-9) {
    if (vals.size() < 6) return 0;
    std::sort(vals.begin(), vals.end());
    std::vector<double> gaps;
    gaps.reserve(vals.size() - 1);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        const double g = vals[i + 1] - vals[i];
        if (g > min_sep) gaps.push_back(g);
    }
    std::sort(gaps.begin(), gaps.end(), std::greater<>());
    if (gaps.size() < 2) return 1;
    int best_c = 1;
    double best_r = 1.0;
    for (int c = 2; c <= 12; ++c) {
        if (c - 1 >= static_cast<int>(gaps.size())) break;
        const double r = gaps[c - 2] / gaps[c - 1];
        if (r > best_r) {
            best_r = r;
            best_c = c;
        }
    }
    return best_r > ratio_threshold ? best_c : 1;
}

// Mode vote over narrow angular sectors: each sector with enough samples
// reports the radial cluster count of its points.
inline int strand_vote(const std::vector<double>& theta, const std::vector<double>& radius,
                       int n_sectors = 12, double half_width = 0.02, int min_pts = 20) {
    std::map<int, int> votes;
    for (int j = 0; j < n_sectors; ++j) {
        const double th0 = -kPi + 2.0 * kPi * (j + 0.5) / n_sectors;
        std::vector<double> rs;
        for (std::size_t i = 0; i < theta.size(); ++i)
            if (std::abs(std::remainder(theta[i] - th0, 2.0 * kPi)) < half_width)
                rs.push_back(radius[i]);
        if (static_cast<int>(rs.size()) < min_pts) continue;
        const int c = gap_cluster_count(std::move(rs));
        if (c > 0) ++votes[c];
    }
    if (votes.empty()) return 0;
    int best = 0, best_n = 0;
    for (const auto& [c, n] : votes)
        if (n > best_n) {
            best = c;
            best_n = n;
        }
    return best;
}

}  // namespace detail

struct ComponentCount {
    int total = 0;
    int pieces = 1;
    int strands = 1;
    bool ok = false;
};

// Counts the closed components of an invariant curve as cyclically visited
// pieces times radially nested strands. Pieces come from index-mod-k cluster
// separation; strands from radial gap clustering, viewed in the eigenplane
// frame of the centre point for a single piece and in the leading PCA plane
// of one piece otherwise.
template <MapLike M>
ComponentCount count_curve_components(const M& map, const Vec3& frame_center, Vec3 x,
                                      int n = 60000, long long transient = 200000) {
    ComponentCount out;
    const Box box = map.box();
    for (long long i = 0; i < transient; ++i) {
        x = map.step(x);
        if (!box.contains(x)) return out;
    }
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x = map.step(x);
        if (!box.contains(x)) return out;
        pts.push_back(x);
    }

    const double mednn = detail::median_nn_distance(pts);
    out.pieces = detail::piece_count(pts, mednn);

    std::vector<Vec3> piece;
    piece.reserve(pts.size() / out.pieces + 1);
    for (std::size_t i = 0; i < pts.size(); i += out.pieces) piece.push_back(pts[i]);

    std::vector<double> theta(piece.size()), radius(piece.size());
    bool framed = false;
    if (out.pieces == 1) {
        const Mat3 J = map.jac(frame_center);
        const Spectrum3 s = eigenvalues_3x3(J, SpectrumOrder::Map);
        const int pi = complex_pair_index(s);
        const int ri = real_eig_index(s);
        if (pi >= 0 && ri >= 0) {
            const CVec3 v = eigenvector(J, s.ev[pi]);
            const Vec3 re{v[0].real(), v[1].real(), v[2].real()};
            const Vec3 im{v[0].imag(), v[1].imag(), v[2].imag()};
            const Vec3 vr = real_eigenvector(J, s.ev[ri].real());
            Mat3 F;
            if (invert3(Mat3::from_cols(re, im, vr), F)) {
                for (std::size_t i = 0; i < piece.size(); ++i) {
                    const Vec3 q = F * (piece[i] - frame_center);
                    theta[i] = std::atan2(q.y, q.x);
                    radius[i] = std::hypot(q.x, q.y);
                }
                framed = true;
            }
        }
    }
    if (!framed) {
        Vec3 c{0, 0, 0};
        for (const Vec3& p : piece) c += p;
        c = c / static_cast<double>(piece.size());
        Mat3 cov{};
        for (const Vec3& p : piece) {
            const Vec3 d = p - c;
            for (int r = 0; r < 3; ++r)
                for (int cc = 0; cc < 3; ++cc) cov(r, cc) += d[r] * d[cc];
        }
        const Spectrum3 s = eigenvalues_3x3(cov, SpectrumOrder::Flow);
        const Vec3 normal = real_eigenvector(cov, s.ev[2].real());
        const auto [e1, e2] = plane_basis(normal);
        for (std::size_t i = 0; i < piece.size(); ++i) {
            const Vec3 d = piece[i] - c;
            theta[i] = std::atan2(dot(d, e2), dot(d, e1));
            radius[i] = std::hypot(dot(d, e1), dot(d, e2));
        }
    }

    const int strands = detail::strand_vote(theta, radius);
    if (strands <= 0) return out;
    out.strands = strands;
    out.total = out.pieces * out.strands;
    out.ok = true;
    return out;
}

}  // namespace spiral
