// Exact geometric queries on primitives. All functions are pure; signed
// distances are negative inside, positive outside, zero on the surface, so
// constraint checks read uniformly as "clearance >= margin".
#pragma once

#include <span>
#include <vector>

#include "geomcoder/geom/primitives.hpp"

namespace geomcoder {

// Rodrigues rotation of p about the line (axis_point, axis_dir).
Point3 rotate_about_axis(const Point3& p, const Point3& axis_point, const UnitVec3& axis_dir,
                         double angle);

// Signed surface distance. Exact for sphere/plane/cuboid/cylinder; exact for
// envelopes via facet planes (inside) and point-triangle distance (outside).
// A hinge axis is treated as its line (unsigned distance, no interior).
double distance_to_primitive(const Point3& p, const GeometricPrimitive& prim);

GeometricPrimitive transform_primitive(const GeometricPrimitive& prim, const RigidTransform& t);

// Signed separation between two primitives; negative iff interpenetrating.
// Analytic for any pair involving a sphere or a plane; other pairs sample
// both surfaces at `sampling_resolution` and take the symmetric minimum
// (error bounded by the resolution).
double primitive_clearance(const GeometricPrimitive& a, const GeometricPrimitive& b,
                           double sampling_resolution = 0.005);

// Deterministic surface sampling at roughly `spacing` meters between samples.
std::vector<Point3> sample_surface(const GeometricPrimitive& prim, double spacing);

// Representative point used for grasping and obstacle-escape directions.
Point3 primitive_center(const GeometricPrimitive& prim);

// Smallest graspable cross-section (sphere/cylinder: diameter; cuboid: twice
// the smallest half-extent; envelope: tightest axis-aligned extent).
double grasp_dimension(const GeometricPrimitive& prim);

// Builds the envelope (hull vertices + outward triangles) for >= 4 non-coplanar
// points; throws DegenerateInput otherwise. Vertex order is deterministic.
ConvexEnvelope make_envelope(std::span<const Point3> points);

// Validated constructors.
Sphere make_sphere(const Point3& center, double radius);
Cylinder make_cylinder(const Point3& base_center, const Vec3& axis, double radius, double height);
Cuboid make_cuboid(const Point3& center, const Vec3& half_extents, const Quat& orientation);

}  // namespace geomcoder
