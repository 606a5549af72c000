// Parametric trajectory curves: line segments, circular arcs about an axis,
// cubic Beziers, and C0-continuous composites.
#pragma once

#include <variant>
#include <vector>

#include "geomcoder/geom/primitives.hpp"

namespace geomcoder::traj {

struct Curve;

struct LineSegment {
    Point3 start;
    Point3 end;
};

struct Arc {
    Point3 axis_point;
    UnitVec3 axis_dir;
    Point3 start_point;  // not on the axis
    double sweep = 0.0;  // radians, |sweep| in (0, 2*pi]

    double radius() const;
};

struct CubicBezier {
    Point3 p0, p1, p2, p3;
};

struct Composite {
    std::vector<Curve> segments;  // C0-continuous: end_i == start_{i+1}
};

struct Curve {
    std::variant<LineSegment, Arc, CubicBezier, Composite> value;

    Curve() : value(LineSegment{}) {}
    Curve(LineSegment s) : value(std::move(s)) {}
    Curve(Arc a) : value(std::move(a)) {}
    Curve(CubicBezier b) : value(std::move(b)) {}
    Curve(Composite c) : value(std::move(c)) {}
};

// Validated constructors (throw InvalidCurve on broken invariants).
Arc make_arc(const Point3& axis_point, const UnitVec3& axis_dir, const Point3& start_point,
             double sweep);
Composite make_composite(std::vector<Curve> segments);

Point3 curve_start(const Curve& c);
Point3 curve_end(const Curve& c);

// Line: lerp. Arc: rotation by t*sweep. Bezier: de Casteljau.
// Composite: arc-length-proportional dispatch across segments.
Point3 eval_curve(const Curve& c, double t);

// Unit tangent at parameter t (derivative direction of travel).
Vec3 curve_tangent(const Curve& c, double t);

// Exact for lines and arcs; adaptive subdivision for Beziers until the
// chord-vs-control-polygon gap is below tol; composites sum their parts.
double arc_length(const Curve& c, double tol = 1e-5);

// Parameter t such that the arc length from 0 to t equals `s` (s in [0, L]).
double param_at_length(const Curve& c, double s, double tol = 1e-5);

Curve transform_curve(const Curve& c, const RigidTransform& t);

}  // namespace geomcoder::traj
