#include "geomcoder/traj/curve.hpp"

#include <algorithm>
#include <cmath>

#include "geomcoder/core/error.hpp"
#include "geomcoder/geom/ops.hpp"

namespace geomcoder::traj {

namespace {

struct BezierHalves {
    CubicBezier a, b;
};

BezierHalves split_half(const CubicBezier& c) {
    const Point3 p01 = (c.p0 + c.p1) * 0.5;
    const Point3 p12 = (c.p1 + c.p2) * 0.5;
    const Point3 p23 = (c.p2 + c.p3) * 0.5;
    const Point3 p012 = (p01 + p12) * 0.5;
    const Point3 p123 = (p12 + p23) * 0.5;
    const Point3 mid = (p012 + p123) * 0.5;
    return {{c.p0, p01, p012, mid}, {mid, p123, p23, c.p3}};
}

double bezier_length_rec(const CubicBezier& c, double tol, int depth) {
    const double chord = (c.p3 - c.p0).norm();
    const double poly = (c.p1 - c.p0).norm() + (c.p2 - c.p1).norm() + (c.p3 - c.p2).norm();
    if (poly - chord < tol || depth > 24) return 0.5 * (poly + chord);
    const BezierHalves h = split_half(c);
    return bezier_length_rec(h.a, 0.5 * tol, depth + 1) + bezier_length_rec(h.b, 0.5 * tol, depth + 1);
}

// Piecewise-linear (t, cumulative length) table from adaptive flattening.
void bezier_table_rec(const CubicBezier& c, double t0, double t1, double tol, int depth,
                      std::vector<std::pair<double, double>>& table) {
    const double chord = (c.p3 - c.p0).norm();
    const double poly = (c.p1 - c.p0).norm() + (c.p2 - c.p1).norm() + (c.p3 - c.p2).norm();
    if (poly - chord < tol || depth > 24) {
        table.emplace_back(t1, table.back().second + 0.5 * (poly + chord));
        return;
    }
    const BezierHalves h = split_half(c);
    const double tm = 0.5 * (t0 + t1);
    bezier_table_rec(h.a, t0, tm, 0.5 * tol, depth + 1, table);
    bezier_table_rec(h.b, tm, t1, 0.5 * tol, depth + 1, table);
}

std::vector<double> segment_lengths(const Composite& c, double tol) {
    std::vector<double> lens;
    lens.reserve(c.segments.size());
    for (const Curve& s : c.segments) lens.push_back(arc_length(s, tol));
    return lens;
}

}  // namespace

double Arc::radius() const {
    return (start_point - axis_point).cross(axis_dir.vec()).norm();
}

Arc make_arc(const Point3& axis_point, const UnitVec3& axis_dir, const Point3& start_point,
             double sweep) {
    Arc a{axis_point, axis_dir, start_point, sweep};
    if (a.radius() < 1e-9) throw InvalidCurve("arc: start point lies on the axis");
    const double s = std::abs(sweep);
    if (!(s > 0.0) || s > 2.0 * kPi + 1e-12)
        throw InvalidCurve("arc: |sweep| must be in (0, 2*pi]");
    return a;
}

Composite make_composite(std::vector<Curve> segments) {
    if (segments.empty()) throw InvalidCurve("composite: needs at least one segment");
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        if ((curve_end(segments[i]) - curve_start(segments[i + 1])).norm() > 1e-6)
            throw InvalidCurve("composite: segment " + std::to_string(i + 1) +
                               " does not start where segment " + std::to_string(i) + " ends");
    }
    return Composite{std::move(segments)};
}

Point3 curve_start(const Curve& c) { return eval_curve(c, 0.0); }
Point3 curve_end(const Curve& c) { return eval_curve(c, 1.0); }

Point3 eval_curve(const Curve& c, double t) {
    t = clamp01(t);
    return std::visit(
        [&](const auto& g) -> Point3 {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                return g.start + (g.end - g.start) * t;
            } else if constexpr (std::is_same_v<T, Arc>) {
                return rotate_about_axis(g.start_point, g.axis_point, g.axis_dir, t * g.sweep);
            } else if constexpr (std::is_same_v<T, CubicBezier>) {
                const Point3 a = g.p0 + (g.p1 - g.p0) * t;
                const Point3 b = g.p1 + (g.p2 - g.p1) * t;
                const Point3 d = g.p2 + (g.p3 - g.p2) * t;
                const Point3 ab = a + (b - a) * t;
                const Point3 bd = b + (d - b) * t;
                return ab + (bd - ab) * t;
            } else {
                const std::vector<double> lens = segment_lengths(g, 1e-5);
                double total = 0.0;
                for (double l : lens) total += l;
                if (total <= 0.0) return curve_start(g.segments.front());
                double s = t * total;
                for (std::size_t i = 0; i < g.segments.size(); ++i) {
                    if (s <= lens[i] || i + 1 == g.segments.size()) {
                        const double u = lens[i] > 0.0 ? clamp01(s / lens[i]) : 0.0;
                        return eval_curve(g.segments[i], u);
                    }
                    s -= lens[i];
                }
                return curve_end(g.segments.back());
            }
        },
        c.value);
}

Vec3 curve_tangent(const Curve& c, double t) {
    t = clamp01(t);
    return std::visit(
        [&](const auto& g) -> Vec3 {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                return (g.end - g.start).normalized();
            } else if constexpr (std::is_same_v<T, Arc>) {
                const Point3 p = rotate_about_axis(g.start_point, g.axis_point, g.axis_dir,
                                                   t * g.sweep);
                const Vec3 rel = p - g.axis_point;
                const Vec3 radial = rel - g.axis_dir.vec() * g.axis_dir.dot(rel);
                Vec3 tang = g.axis_dir.vec().cross(radial).normalized();
                return g.sweep >= 0.0 ? tang : -tang;
            } else if constexpr (std::is_same_v<T, CubicBezier>) {
                const Vec3 d = (g.p1 - g.p0) * (3.0 * (1 - t) * (1 - t)) +
                               (g.p2 - g.p1) * (6.0 * (1 - t) * t) +
                               (g.p3 - g.p2) * (3.0 * t * t);
                if (d.norm() > 1e-12) return d.normalized();
                // degenerate control polygon: finite difference fallback
                const Vec3 fd = eval_curve(Curve{g}, std::min(t + 1e-6, 1.0)) -
                                eval_curve(Curve{g}, std::max(t - 1e-6, 0.0));
                return fd.norm() > 1e-15 ? fd.normalized() : Vec3{1, 0, 0};
            } else {
                const std::vector<double> lens = segment_lengths(g, 1e-5);
                double total = 0.0;
                for (double l : lens) total += l;
                if (total <= 0.0) return curve_tangent(g.segments.front(), 0.0);
                double s = t * total;
                for (std::size_t i = 0; i < g.segments.size(); ++i) {
                    if (s <= lens[i] || i + 1 == g.segments.size()) {
                        const double u = lens[i] > 0.0 ? clamp01(s / lens[i]) : 0.0;
                        return curve_tangent(g.segments[i], u);
                    }
                    s -= lens[i];
                }
                return curve_tangent(g.segments.back(), 1.0);
            }
        },
        c.value);
}

double arc_length(const Curve& c, double tol) {
    if (!(tol > 0.0)) throw InvalidCurve("arc_length: tol must be > 0");
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                return (g.end - g.start).norm();
            } else if constexpr (std::is_same_v<T, Arc>) {
                return g.radius() * std::abs(g.sweep);
            } else if constexpr (std::is_same_v<T, CubicBezier>) {
                return bezier_length_rec(g, tol, 0);
            } else {
                double total = 0.0;
                for (const Curve& s : g.segments) total += arc_length(s, tol);
                return total;
            }
        },
        c.value);
}

double param_at_length(const Curve& c, double s, double tol) {
    const double total = arc_length(c, tol);
    if (total <= 0.0) return 0.0;
    s = std::clamp(s, 0.0, total);
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineSegment> || std::is_same_v<T, Arc>) {
                return s / total;  // constant speed
            } else if constexpr (std::is_same_v<T, CubicBezier>) {
                std::vector<std::pair<double, double>> table{{0.0, 0.0}};
                bezier_table_rec(g, 0.0, 1.0, tol, 0, table);
                const double target = s / total * table.back().second;
                auto it = std::lower_bound(
                    table.begin(), table.end(), target,
                    [](const std::pair<double, double>& e, double v) { return e.second < v; });
                if (it == table.begin()) return 0.0;
                const auto [t1, s1] = *it;
                const auto [t0, s0] = *(it - 1);
                return s1 > s0 ? t0 + (t1 - t0) * (target - s0) / (s1 - s0) : t0;
            } else {
                const std::vector<double> lens = segment_lengths(g, tol);
                double acc = 0.0;
                for (std::size_t i = 0; i < g.segments.size(); ++i) {
                    if (s <= acc + lens[i] || i + 1 == g.segments.size()) {
                        const double local_s = std::clamp(s - acc, 0.0, lens[i]);
                        const double u = param_at_length(g.segments[i], local_s, tol);
                        return (acc + u * lens[i]) / total;
                    }
                    acc += lens[i];
                }
                return 1.0;
            }
        },
        c.value);
}

Curve transform_curve(const Curve& c, const RigidTransform& t) {
    return std::visit(
        [&](const auto& g) -> Curve {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                return Curve{LineSegment{t.apply(g.start), t.apply(g.end)}};
            } else if constexpr (std::is_same_v<T, Arc>) {
                return Curve{Arc{t.apply(g.axis_point), UnitVec3::from(t.apply_dir(g.axis_dir.vec())),
                                 t.apply(g.start_point), g.sweep}};
            } else if constexpr (std::is_same_v<T, CubicBezier>) {
                return Curve{CubicBezier{t.apply(g.p0), t.apply(g.p1), t.apply(g.p2), t.apply(g.p3)}};
            } else {
                Composite out;
                out.segments.reserve(g.segments.size());
                for (const Curve& s : g.segments) out.segments.push_back(transform_curve(s, t));
                return Curve{std::move(out)};
            }
        },
        c.value);
}

}  // namespace geomcoder::traj
