// Incremental 3D convex hull. Deterministic: fixed insertion order, canonical
// vertex/face ordering of the result.
#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "geomcoder/core/error.hpp"
#include "geomcoder/geom/ops.hpp"

namespace geomcoder {
namespace {

struct Face {
    std::array<int, 3> v;
    Vec3 normal;     // unit, outward
    double offset;   // normal . x = offset on the face plane
    bool alive = true;
};

Vec3 face_normal(const Point3& a, const Point3& b, const Point3& c) {
    return (b - a).cross(c - a);
}

// Orients (a,b,c) so the normal points away from `interior`; returns false on
// a degenerate (near-zero-area) triangle.
bool make_face(const std::vector<Point3>& pts, int a, int b, int c, const Point3& interior,
               Face& out) {
    Vec3 n = face_normal(pts[a], pts[b], pts[c]);
    const double len = n.norm();
    if (len < 1e-14) return false;
    n = n / len;
    double d = n.dot(pts[a]);
    if (n.dot(interior) > d) {
        std::swap(b, c);
        n = -n;
        d = -d;
    }
    out.v = {a, b, c};
    out.normal = n;
    out.offset = d;
    out.alive = true;
    return true;
}

}  // namespace

ConvexEnvelope make_envelope(std::span<const Point3> points) {
    // Exact-duplicate removal keeps the hull vertex set well defined.
    std::vector<Point3> pts;
    pts.reserve(points.size());
    for (const Point3& p : points) {
        bool dup = false;
        for (const Point3& q : pts)
            if (q.x == p.x && q.y == p.y && q.z == p.z) { dup = true; break; }
        if (!dup) pts.push_back(p);
    }
    if (pts.size() < 4) throw DegenerateInput("convex envelope needs >= 4 distinct points");

    double span_scale = 0.0;
    Vec3 lo = pts[0], hi = pts[0];
    for (const Point3& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    span_scale = (hi - lo).norm();
    const double eps = 1e-9 * (1.0 + span_scale);

    // Initial simplex: farthest pair among axis extremes, then farthest from
    // the line, then farthest from the plane.
    int i0 = 0, i1 = 0;
    double best = -1.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            const double d = (pts[i] - pts[j]).squared_norm();
            if (d > best) { best = d; i0 = static_cast<int>(i); i1 = static_cast<int>(j); }
        }
    if (best < eps * eps) throw DegenerateInput("convex envelope: all points coincident");

    const Vec3 dir = (pts[i1] - pts[i0]).normalized();
    int i2 = -1;
    best = eps;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec3 r = pts[i] - pts[i0];
        const double d = (r - dir * r.dot(dir)).norm();
        if (d > best) { best = d; i2 = static_cast<int>(i); }
    }
    if (i2 < 0) throw DegenerateInput("convex envelope: points are collinear");

    Vec3 n0 = face_normal(pts[i0], pts[i1], pts[i2]).normalized();
    int i3 = -1;
    best = eps;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double d = std::abs(n0.dot(pts[i] - pts[i0]));
        if (d > best) { best = d; i3 = static_cast<int>(i); }
    }
    if (i3 < 0) throw DegenerateInput("convex envelope: points are coplanar");

    const Point3 interior = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;

    std::vector<Face> faces;
    auto add_face = [&](int a, int b, int c) {
        Face f;
        if (make_face(pts, a, b, c, interior, f)) faces.push_back(f);
    };
    add_face(i0, i1, i2);
    add_face(i0, i1, i3);
    add_face(i0, i2, i3);
    add_face(i1, i2, i3);

    for (int pi = 0; pi < static_cast<int>(pts.size()); ++pi) {
        if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
        const Point3& p = pts[pi];

        // Directed edges of visible faces; horizon edges appear exactly once.
        std::map<std::pair<int, int>, int> edge_count;
        bool visible_any = false;
        for (Face& f : faces) {
            if (!f.alive) continue;
            if (f.normal.dot(p) - f.offset > eps) {
                visible_any = true;
                f.alive = false;
                const std::array<std::pair<int, int>, 3> edges{
                    std::pair{f.v[0], f.v[1]}, std::pair{f.v[1], f.v[2]}, std::pair{f.v[2], f.v[0]}};
                for (auto [u, v] : edges) {
                    auto key = std::minmax(u, v);
                    edge_count[{key.first, key.second}]++;
                }
            }
        }
        if (!visible_any) continue;

        for (const auto& [edge, count] : edge_count)
            if (count == 1) add_face(edge.first, edge.second, pi);

        faces.erase(std::remove_if(faces.begin(), faces.end(),
                                   [](const Face& f) { return !f.alive; }),
                    faces.end());
    }

    // Canonical output: vertices sorted lexicographically, faces reindexed,
    // rotated to smallest index first, and sorted.
    std::vector<int> used;
    for (const Face& f : faces)
        for (int v : f.v) used.push_back(v);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    std::vector<int> order(used.begin(), used.end());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Point3& pa = pts[a];
        const Point3& pb = pts[b];
        if (pa.x != pb.x) return pa.x < pb.x;
        if (pa.y != pb.y) return pa.y < pb.y;
        return pa.z < pb.z;
    });
    std::vector<int> remap(pts.size(), -1);
    ConvexEnvelope env;
    env.vertices.reserve(order.size());
    for (size_t k = 0; k < order.size(); ++k) {
        remap[order[k]] = static_cast<int>(k);
        env.vertices.push_back(pts[order[k]]);
    }
    env.faces.reserve(faces.size());
    for (const Face& f : faces) {
        std::array<int, 3> t{remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]};
        // rotate so the smallest index leads, preserving winding
        int s = 0;
        if (t[1] < t[s]) s = 1;
        if (t[2] < t[s]) s = 2;
        env.faces.push_back({t[s], t[(s + 1) % 3], t[(s + 2) % 3]});
    }
    std::sort(env.faces.begin(), env.faces.end());
    return env;
}

}  // namespace geomcoder
