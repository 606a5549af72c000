#include "geomcoder/geom/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomcoder/core/error.hpp"

namespace geomcoder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double plane_sdf(const Point3& p, const Plane& pl) { return pl.normal.dot(p) - pl.offset; }

double cuboid_sdf(const Point3& p, const Cuboid& c) {
    const Vec3 local = c.orientation.conjugate().rotate(p - c.center);
    const Vec3 q{std::abs(local.x) - c.half_extents.x, std::abs(local.y) - c.half_extents.y,
                 std::abs(local.z) - c.half_extents.z};
    const Vec3 qp{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
    return qp.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
}

double cylinder_sdf(const Point3& p, const Cylinder& c) {
    const Vec3 rel = p - c.axis_point;
    const double t = c.axis_dir.dot(rel);
    const double radial = (rel - c.axis_dir.vec() * t).norm();
    const double dr = radial - c.radius;
    const double dz = std::abs(t - 0.5 * c.height) - 0.5 * c.height;
    const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
    return outside + std::min(std::max(dr, dz), 0.0);
}

double line_distance(const Point3& p, const Point3& a, const UnitVec3& d) {
    return (p - a).cross(d.vec()).norm();
}

// Ericson, Real-Time Collision Detection 5.1.5.
Point3 closest_on_triangle(const Point3& p, const Point3& a, const Point3& b, const Point3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double envelope_sdf(const Point3& p, const ConvexEnvelope& env) {
    bool inside = true;
    double min_face_depth = kInf;
    for (const auto& f : env.faces) {
        const Point3& a = env.vertices[f[0]];
        const Point3& b = env.vertices[f[1]];
        const Point3& c = env.vertices[f[2]];
        const Vec3 n = (b - a).cross(c - a).normalized();
        const double d = n.dot(p - a);
        if (d > 0.0) inside = false;
        min_face_depth = std::min(min_face_depth, -d);
    }
    if (inside) return -min_face_depth;

    double best = kInf;
    for (const auto& f : env.faces) {
        const Point3 q = closest_on_triangle(p, env.vertices[f[0]], env.vertices[f[1]],
                                             env.vertices[f[2]]);
        best = std::min(best, (p - q).norm());
    }
    return best;
}

double hinge_sdf(const Point3& p, const HingeAxis& h) {
    return line_distance(p, h.point, h.direction);
}

// --- analytic clearances ------------------------------------------------

double clearance_plane(const Plane& pl, const GeometricPrimitive& other) {
    struct Visitor {
        const Plane& pl;
        double operator()(const Sphere& s) const { return plane_sdf(s.center, pl) - s.radius; }
        double operator()(const Plane& o) const {
            const Vec3 c = pl.normal.vec().cross(o.normal.vec());
            if (c.norm() > 1e-9) return 0.0;  // non-parallel planes intersect
            const double s = pl.normal.dot(o.normal.vec()) >= 0.0 ? 1.0 : -1.0;
            return std::abs(pl.offset - s * o.offset);
        }
        double operator()(const Cuboid& c) const {
            const Mat3 r = c.orientation.to_matrix();
            double best = kInf;
            for (int sx : {-1, 1})
                for (int sy : {-1, 1})
                    for (int sz : {-1, 1}) {
                        const Point3 corner = c.center + r.col(0) * (sx * c.half_extents.x) +
                                              r.col(1) * (sy * c.half_extents.y) +
                                              r.col(2) * (sz * c.half_extents.z);
                        best = std::min(best, plane_sdf(corner, pl));
                    }
            return best;
        }
        double operator()(const Cylinder& cy) const {
            const Point3 top = cy.axis_point + cy.axis_dir.vec() * cy.height;
            const double axial = std::min(plane_sdf(cy.axis_point, pl), plane_sdf(top, pl));
            const double cosa = pl.normal.dot(cy.axis_dir.vec());
            const double lateral = cy.radius * std::sqrt(std::max(0.0, 1.0 - cosa * cosa));
            return axial - lateral;
        }
        double operator()(const HingeAxis& h) const {
            if (std::abs(pl.normal.dot(h.direction.vec())) > 1e-9) return 0.0;
            return plane_sdf(h.point, pl);
        }
        double operator()(const ConvexEnvelope& e) const {
            double best = kInf;
            for (const Point3& v : e.vertices) best = std::min(best, plane_sdf(v, pl));
            return best;
        }
    };
    return std::visit(Visitor{pl}, other);
}

// Closest distance between two lines (a1,d1) and (a2,d2).
double line_line_distance(const Point3& a1, const UnitVec3& d1, const Point3& a2,
                          const UnitVec3& d2) {
    const Vec3 c = d1.vec().cross(d2.vec());
    const double cn = c.norm();
    if (cn < 1e-12) return line_distance(a2, a1, d1);  // parallel
    return std::abs((a2 - a1).dot(c)) / cn;
}

}  // namespace

Point3 rotate_about_axis(const Point3& p, const Point3& axis_point, const UnitVec3& axis_dir,
                         double angle) {
    const Vec3 k = axis_dir.vec();
    const Vec3 v = p - axis_point;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Vec3 rotated = v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
    return axis_point + rotated;
}

double distance_to_primitive(const Point3& p, const GeometricPrimitive& prim) {
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Sphere>) return (p - g.center).norm() - g.radius;
            else if constexpr (std::is_same_v<T, Plane>) return plane_sdf(p, g);
            else if constexpr (std::is_same_v<T, Cuboid>) return cuboid_sdf(p, g);
            else if constexpr (std::is_same_v<T, Cylinder>) return cylinder_sdf(p, g);
            else if constexpr (std::is_same_v<T, HingeAxis>) return hinge_sdf(p, g);
            else return envelope_sdf(p, g);
        },
        prim);
}

GeometricPrimitive transform_primitive(const GeometricPrimitive& prim, const RigidTransform& t) {
    return std::visit(
        [&](const auto& g) -> GeometricPrimitive {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return Sphere{t.apply(g.center), g.radius};
            } else if constexpr (std::is_same_v<T, Plane>) {
                const Vec3 n = t.apply_dir(g.normal.vec());
                // plane point maps through t; offset follows
                const Point3 onplane = t.apply(g.normal.vec() * g.offset);
                return Plane{UnitVec3::from(n), n.dot(onplane)};
            } else if constexpr (std::is_same_v<T, Cuboid>) {
                return Cuboid{t.apply(g.center), g.half_extents,
                              (t.rotation * g.orientation).normalized()};
            } else if constexpr (std::is_same_v<T, Cylinder>) {
                return Cylinder{t.apply(g.axis_point), UnitVec3::from(t.apply_dir(g.axis_dir.vec())),
                                g.radius, g.height};
            } else if constexpr (std::is_same_v<T, HingeAxis>) {
                return HingeAxis{t.apply(g.point), UnitVec3::from(t.apply_dir(g.direction.vec())),
                                 g.swing_range};
            } else {
                ConvexEnvelope e = g;
                for (Point3& v : e.vertices) v = t.apply(v);
                return e;
            }
        },
        prim);
}

double primitive_clearance(const GeometricPrimitive& a, const GeometricPrimitive& b,
                           double sampling_resolution) {
    // Sphere against anything reduces to a point query.
    if (const auto* s = std::get_if<Sphere>(&a))
        return distance_to_primitive(s->center, b) - s->radius;
    if (const auto* s = std::get_if<Sphere>(&b))
        return distance_to_primitive(s->center, a) - s->radius;
    if (const auto* pl = std::get_if<Plane>(&a)) return clearance_plane(*pl, b);
    if (const auto* pl = std::get_if<Plane>(&b)) return clearance_plane(*pl, a);

    const auto* ha = std::get_if<HingeAxis>(&a);
    const auto* hb = std::get_if<HingeAxis>(&b);
    if (ha && hb) return line_line_distance(ha->point, ha->direction, hb->point, hb->direction);

    // Sampled symmetric minimum; a hinge axis has no surface to sample, so
    // only the other surface is sampled against its line distance.
    double best = kInf;
    if (!ha)
        for (const Point3& p : sample_surface(a, sampling_resolution))
            best = std::min(best, distance_to_primitive(p, b));
    if (!hb)
        for (const Point3& p : sample_surface(b, sampling_resolution))
            best = std::min(best, distance_to_primitive(p, a));
    return best;
}

std::vector<Point3> sample_surface(const GeometricPrimitive& prim, double spacing) {
    std::vector<Point3> out;
    const double s = std::max(spacing, 1e-4);

    if (const auto* sp = std::get_if<Sphere>(&prim)) {
        const double area = 4.0 * kPi * sp->radius * sp->radius;
        const int n = std::max(32, static_cast<int>(std::ceil(area / (s * s))));
        // Fibonacci lattice
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        out.reserve(n);
        for (int i = 0; i < n; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = golden * i;
            out.push_back(sp->center +
                          Vec3{r * std::cos(th), r * std::sin(th), z} * sp->radius);
        }
        return out;
    }

    if (const auto* cy = std::get_if<Cylinder>(&prim)) {
        // Build an orthonormal frame around the axis.
        const Vec3 d = cy->axis_dir.vec();
        const Vec3 ref = std::abs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        const Vec3 u = d.cross(ref).normalized();
        const Vec3 v = d.cross(u);
        const int na = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * cy->radius / s)));
        const int nz = std::max(2, static_cast<int>(std::ceil(cy->height / s)) + 1);
        for (int iz = 0; iz < nz; ++iz) {
            const double t = cy->height * iz / (nz - 1);
            for (int ia = 0; ia < na; ++ia) {
                const double th = 2.0 * kPi * ia / na;
                out.push_back(cy->axis_point + d * t +
                              (u * std::cos(th) + v * std::sin(th)) * cy->radius);
            }
        }
        // caps: concentric rings
        for (double cap_t : {0.0, cy->height}) {
            const Point3 c = cy->axis_point + d * cap_t;
            for (double rho = 0.0; rho < cy->radius; rho += s) {
                const int nr = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * rho / s)));
                for (int ia = 0; ia < nr; ++ia) {
                    const double th = 2.0 * kPi * ia / nr;
                    out.push_back(c + (u * std::cos(th) + v * std::sin(th)) * rho);
                }
            }
        }
        return out;
    }

    if (const auto* cb = std::get_if<Cuboid>(&prim)) {
        const Mat3 r = cb->orientation.to_matrix();
        const Vec3 he = cb->half_extents;
        auto face_grid = [&](int fixed_axis, double sign) {
            const int a1 = (fixed_axis + 1) % 3, a2 = (fixed_axis + 2) % 3;
            const double h1 = (&he.x)[a1], h2 = (&he.x)[a2], hf = (&he.x)[fixed_axis];
            const int n1 = std::max(2, static_cast<int>(std::ceil(2.0 * h1 / s)) + 1);
            const int n2 = std::max(2, static_cast<int>(std::ceil(2.0 * h2 / s)) + 1);
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j) {
                    Vec3 local{0, 0, 0};
                    (&local.x)[fixed_axis] = sign * hf;
                    (&local.x)[a1] = -h1 + 2.0 * h1 * i / (n1 - 1);
                    (&local.x)[a2] = -h2 + 2.0 * h2 * j / (n2 - 1);
                    out.push_back(cb->center + r * local);
                }
        };
        for (int axis = 0; axis < 3; ++axis) {
            face_grid(axis, 1.0);
            face_grid(axis, -1.0);
        }
        return out;
    }

    if (const auto* pl = std::get_if<Plane>(&prim)) {
        // Unbounded plane: a 4 m patch around the foot of the origin.
        const Vec3 n = pl->normal.vec();
        const Vec3 ref = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        const Vec3 u = n.cross(ref).normalized();
        const Vec3 v = n.cross(u);
        const Point3 c = n * pl->offset;
        const int half = static_cast<int>(std::ceil(2.0 / s));
        for (int i = -half; i <= half; ++i)
            for (int j = -half; j <= half; ++j) out.push_back(c + u * (i * s) + v * (j * s));
        return out;
    }

    if (const auto* h = std::get_if<HingeAxis>(&prim)) {
        const int n = static_cast<int>(std::ceil(2.0 / s)) + 1;
        for (int i = 0; i < n; ++i)
            out.push_back(h->point + h->direction.vec() * (-1.0 + 2.0 * i / (n - 1)));
        return out;
    }

    const auto& env = std::get<ConvexEnvelope>(prim);
    for (const auto& f : env.faces) {
        const Point3& a = env.vertices[f[0]];
        const Point3& b = env.vertices[f[1]];
        const Point3& c = env.vertices[f[2]];
        const double longest = std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
        const int n = std::max(1, static_cast<int>(std::ceil(longest / s)));
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n - i; ++j) {
                const double wa = static_cast<double>(i) / n;
                const double wb = static_cast<double>(j) / n;
                out.push_back(a * wa + b * wb + c * (1.0 - wa - wb));
            }
    }
    return out;
}

Point3 primitive_center(const GeometricPrimitive& prim) {
    return std::visit(
        [](const auto& g) -> Point3 {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Sphere>) return g.center;
            else if constexpr (std::is_same_v<T, Plane>) return g.normal.vec() * g.offset;
            else if constexpr (std::is_same_v<T, Cuboid>) return g.center;
            else if constexpr (std::is_same_v<T, Cylinder>)
                return g.axis_point + g.axis_dir.vec() * (0.5 * g.height);
            else if constexpr (std::is_same_v<T, HingeAxis>) return g.point;
            else {
                Point3 c{};
                for (const Point3& v : g.vertices) c += v;
                return g.vertices.empty() ? c : c / static_cast<double>(g.vertices.size());
            }
        },
        prim);
}

double grasp_dimension(const GeometricPrimitive& prim) {
    return std::visit(
        [](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Sphere>) return 2.0 * g.radius;
            else if constexpr (std::is_same_v<T, Cylinder>) return 2.0 * g.radius;
            else if constexpr (std::is_same_v<T, Cuboid>)
                return 2.0 * std::min({g.half_extents.x, g.half_extents.y, g.half_extents.z});
            else if constexpr (std::is_same_v<T, ConvexEnvelope>) {
                if (g.vertices.empty()) return kInf;
                Vec3 lo = g.vertices[0], hi = g.vertices[0];
                for (const Point3& v : g.vertices) {
                    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
                    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
                }
                return std::min({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
            } else {
                return kInf;  // planes and hinge axes are not graspable
            }
        },
        prim);
}

const char* primitive_kind_name(const GeometricPrimitive& prim) {
    switch (prim.index()) {
        case 0: return "sphere";
        case 1: return "cylinder";
        case 2: return "cuboid";
        case 3: return "plane";
        case 4: return "hinge";
        default: return "envelope";
    }
}

Sphere make_sphere(const Point3& center, double radius) {
    if (!(radius > 0.0) || !center.finite()) throw DegenerateInput("sphere: radius must be > 0");
    return {center, radius};
}

Cylinder make_cylinder(const Point3& base_center, const Vec3& axis, double radius, double height) {
    if (!(radius > 0.0) || !(height > 0.0))
        throw DegenerateInput("cylinder: radius and height must be > 0");
    if (axis.norm() < 1e-12) throw DegenerateInput("cylinder: axis must be nonzero");
    return {base_center, UnitVec3::from(axis), radius, height};
}

Cuboid make_cuboid(const Point3& center, const Vec3& half_extents, const Quat& orientation) {
    if (!(half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0))
        throw DegenerateInput("cuboid: half extents must be > 0");
    return {center, half_extents, orientation.normalized()};
}

}  // namespace geomcoder
