// Geometric primitive parameterizations of objects and functional parts.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geomcoder/core/math.hpp"

namespace geomcoder {

struct Sphere {
    Point3 center;
    double radius = 0.0;  // > 0
};

struct Cylinder {
    Point3 axis_point;   // base-center; the cylinder spans [0, height] along axis_dir
    UnitVec3 axis_dir;
    double radius = 0.0;  // > 0
    double height = 0.0;  // > 0
};

struct Cuboid {
    Point3 center;
    Vec3 half_extents;  // all > 0
    Quat orientation;   // columns of the rotation matrix are the box axes
};

struct Plane {
    UnitVec3 normal;
    double offset = 0.0;  // signed distance of the plane from the origin along normal
};

struct HingeAxis {
    Point3 point;       // any point on the axis
    UnitVec3 direction;
    std::array<double, 2> swing_range{0.0, kPi / 2};  // [lo, hi], lo <= hi
};

// Triangulated convex hull. `vertices` is the spec'd representation (every
// vertex on the hull); `faces` are derived at construction and carried so
// distance queries do not rebuild the hull.
struct ConvexEnvelope {
    std::vector<Point3> vertices;
    std::vector<std::array<int, 3>> faces;  // outward-wound triangles into vertices
};

using GeometricPrimitive = std::variant<Sphere, Cylinder, Cuboid, Plane, HingeAxis, ConvexEnvelope>;

struct ParamObject {
    std::string object_id;
    std::string class_label;
    std::vector<std::pair<std::string, GeometricPrimitive>> parts;  // unique part names
    std::optional<std::string> functional_part;  // part to grasp/actuate

    const GeometricPrimitive* find_part(const std::string& name) const {
        for (const auto& [n, p] : parts)
            if (n == name) return &p;
        return nullptr;
    }
};

struct RobotProfile {
    double base_footprint_radius = 0.25;
    double arm_reach_radius = 1.3;
    double gripper_aperture_max = 0.12;
    double passage_width = 0.5;  // minimum clear width the base needs
    double max_tilt = 2.2;       // radians
};

const char* primitive_kind_name(const GeometricPrimitive& prim);

}  // namespace geomcoder
