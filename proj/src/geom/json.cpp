#include "geomcoder/geom/json.hpp"

#include "geomcoder/geom/ops.hpp"

namespace geomcoder {

json primitive_to_json(const GeometricPrimitive& prim) {
    json j;
    j["kind"] = primitive_kind_name(prim);
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                j["center"] = to_json(g.center);
                j["radius"] = g.radius;
            } else if constexpr (std::is_same_v<T, Cylinder>) {
                j["axis_point"] = to_json(g.axis_point);
                j["axis_dir"] = to_json(g.axis_dir);
                j["radius"] = g.radius;
                j["height"] = g.height;
            } else if constexpr (std::is_same_v<T, Cuboid>) {
                j["center"] = to_json(g.center);
                j["half_extents"] = to_json(g.half_extents);
                j["orientation"] = to_json(g.orientation);
            } else if constexpr (std::is_same_v<T, Plane>) {
                j["normal"] = to_json(g.normal);
                j["offset"] = g.offset;
            } else if constexpr (std::is_same_v<T, HingeAxis>) {
                j["point"] = to_json(g.point);
                j["direction"] = to_json(g.direction);
                j["swing_range"] = json::array({g.swing_range[0], g.swing_range[1]});
            } else {
                json verts = json::array();
                for (const Point3& v : g.vertices) verts.push_back(to_json(v));
                j["vertices"] = verts;
            }
        },
        prim);
    return j;
}

GeometricPrimitive primitive_from_json(const json& j) {
    const std::string kind = require_field(j, "kind", "primitive").get<std::string>();
    if (kind == "sphere") {
        return make_sphere(vec3_from_json(require_field(j, "center", "sphere"), "sphere.center"),
                           require_number(j, "radius", "sphere"));
    }
    if (kind == "cylinder") {
        return make_cylinder(
            vec3_from_json(require_field(j, "axis_point", "cylinder"), "cylinder.axis_point"),
            unitvec_from_json(require_field(j, "axis_dir", "cylinder"), "cylinder.axis_dir").vec(),
            require_number(j, "radius", "cylinder"), require_number(j, "height", "cylinder"));
    }
    if (kind == "cuboid") {
        return make_cuboid(
            vec3_from_json(require_field(j, "center", "cuboid"), "cuboid.center"),
            vec3_from_json(require_field(j, "half_extents", "cuboid"), "cuboid.half_extents"),
            quat_from_json(require_field(j, "orientation", "cuboid"), "cuboid.orientation"));
    }
    if (kind == "plane") {
        return Plane{unitvec_from_json(require_field(j, "normal", "plane"), "plane.normal"),
                     require_number(j, "offset", "plane")};
    }
    if (kind == "hinge") {
        const json& sr = require_field(j, "swing_range", "hinge");
        if (!sr.is_array() || sr.size() != 2) throw SchemaError("hinge.swing_range: expected [lo, hi]");
        const double lo = sr[0].get<double>(), hi = sr[1].get<double>();
        if (lo > hi) throw SchemaError("hinge.swing_range: lo must be <= hi");
        return HingeAxis{vec3_from_json(require_field(j, "point", "hinge"), "hinge.point"),
                         unitvec_from_json(require_field(j, "direction", "hinge"), "hinge.direction"),
                         {lo, hi}};
    }
    if (kind == "envelope") {
        const json& verts = require_field(j, "vertices", "envelope");
        if (!verts.is_array()) throw SchemaError("envelope.vertices: expected array");
        std::vector<Point3> pts;
        pts.reserve(verts.size());
        for (const auto& v : verts) pts.push_back(vec3_from_json(v, "envelope.vertex"));
        return make_envelope(pts);  // re-derives faces; input vertices are the hull
    }
    throw SchemaError("primitive: unknown kind '" + kind + "'");
}

json param_object_to_json(const ParamObject& obj) {
    json parts = json::array();
    for (const auto& [name, prim] : obj.parts)
        parts.push_back(json{{"name", name}, {"primitive", primitive_to_json(prim)}});
    json j{{"object_id", obj.object_id}, {"class_label", obj.class_label}, {"parts", parts}};
    if (obj.functional_part) j["functional_part"] = *obj.functional_part;
    return j;
}

ParamObject param_object_from_json(const json& j) {
    ParamObject obj;
    obj.object_id = require_field(j, "object_id", "object").get<std::string>();
    obj.class_label = require_field(j, "class_label", "object").get<std::string>();
    const json& parts = require_field(j, "parts", "object");
    if (!parts.is_array()) throw SchemaError("object.parts: expected array");
    for (const auto& p : parts) {
        const std::string name = require_field(p, "name", "part").get<std::string>();
        if (obj.find_part(name)) throw SchemaError("object.parts: duplicate part '" + name + "'");
        obj.parts.emplace_back(name, primitive_from_json(require_field(p, "primitive", "part")));
    }
    if (j.contains("functional_part")) {
        obj.functional_part = j.at("functional_part").get<std::string>();
        if (!obj.find_part(*obj.functional_part))
            throw SchemaError("object.functional_part: no part named '" + *obj.functional_part + "'");
    }
    return obj;
}

json robot_profile_to_json(const RobotProfile& p) {
    return json{{"base_footprint_radius", p.base_footprint_radius},
                {"arm_reach_radius", p.arm_reach_radius},
                {"gripper_aperture_max", p.gripper_aperture_max},
                {"passage_width", p.passage_width},
                {"max_tilt", p.max_tilt}};
}

RobotProfile robot_profile_from_json(const json& j) {
    RobotProfile p;
    p.base_footprint_radius = require_number(j, "base_footprint_radius", "profile");
    p.arm_reach_radius = require_number(j, "arm_reach_radius", "profile");
    p.gripper_aperture_max = require_number(j, "gripper_aperture_max", "profile");
    p.passage_width = require_number(j, "passage_width", "profile");
    p.max_tilt = require_number(j, "max_tilt", "profile");
    if (p.base_footprint_radius <= 0 || p.arm_reach_radius <= 0 || p.gripper_aperture_max <= 0 ||
        p.passage_width <= 0 || p.max_tilt <= 0)
        throw SchemaError("profile: all fields must be > 0");
    return p;
}

}  // namespace geomcoder
