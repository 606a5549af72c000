#include "geomcoder/sim/world.hpp"

#include <algorithm>

#include "geomcoder/geom/json.hpp"
#include "geomcoder/geom/ops.hpp"
#include "geomcoder/scene/io.hpp"

namespace geomcoder::sim {

RigidTransform rotation_about_line(const Point3& point, const UnitVec3& dir, double angle) {
    const Quat q = Quat::from_axis_angle(dir.vec(), angle);
    return RigidTransform{q, point - q.rotate(point)};
}

Cuboid Door::panel_at(double a) const {
    return std::get<Cuboid>(transform_primitive(panel, rotation_about_line(hinge.point,
                                                                           hinge.direction, a)));
}

Cylinder Door::handle_at(double a) const {
    return std::get<Cylinder>(
        transform_primitive(handle, rotation_about_line(hinge.point, hinge.direction, a)));
}

Point3 Door::handle_grasp_at(double a) const {
    const Cylinder h = handle_at(a);
    return h.axis_point + h.axis_dir.vec() * (0.5 * h.height);
}

double Door::panel_width() const {
    const Mat3 r = panel.orientation.to_matrix();
    const std::array<double, 3> he{panel.half_extents.x, panel.half_extents.y,
                                   panel.half_extents.z};
    int k_n = 0;
    for (int k = 1; k < 3; ++k)
        if (he[k] < he[k_n]) k_n = k;
    const int k_a = (k_n + 1) % 3, k_b = (k_n + 2) % 3;
    const Vec3 v = hinge.direction.vec();
    const int k_v = std::abs(r.col(k_a).dot(v)) >= std::abs(r.col(k_b).dot(v)) ? k_a : k_b;
    return 2.0 * he[k_v == k_a ? k_b : k_a];
}

double Door::handle_orbit() const {
    return (handle_grasp_at(0.0) - hinge.point).cross(hinge.direction.vec()).norm();
}

Cuboid Drawer::body_at(double e) const {
    Cuboid b = body;
    b.center += axis.vec() * e;
    return b;
}

Cylinder Drawer::handle_at(double e) const {
    Cylinder h = handle;
    h.axis_point += axis.vec() * e;
    return h;
}

Point3 Drawer::handle_grasp_at(double e) const {
    const Cylinder h = handle_at(e);
    return h.axis_point + h.axis_dir.vec() * (0.5 * h.height);
}

Door* SceneWorld::find_door(const std::string& id) {
    for (auto& d : doors)
        if (d.id == id) return &d;
    return nullptr;
}
const Door* SceneWorld::find_door(const std::string& id) const {
    for (const auto& d : doors)
        if (d.id == id) return &d;
    return nullptr;
}
Drawer* SceneWorld::find_drawer(const std::string& id) {
    for (auto& d : drawers)
        if (d.id == id) return &d;
    return nullptr;
}
const Drawer* SceneWorld::find_drawer(const std::string& id) const {
    for (const auto& d : drawers)
        if (d.id == id) return &d;
    return nullptr;
}
FreeObject* SceneWorld::find_object(const std::string& id) {
    for (auto& o : free_objects)
        if (o.id == id) return &o;
    return nullptr;
}
const FreeObject* SceneWorld::find_object(const std::string& id) const {
    for (const auto& o : free_objects)
        if (o.id == id) return &o;
    return nullptr;
}
Stain* SceneWorld::find_stain(const std::string& id) {
    for (auto& s : stains)
        if (s.id == id) return &s;
    return nullptr;
}
const Stain* SceneWorld::find_stain(const std::string& id) const {
    for (const auto& s : stains)
        if (s.id == id) return &s;
    return nullptr;
}

std::vector<ParamObject> SceneWorld::param_objects() const {
    std::vector<ParamObject> out;
    for (const Door& d : doors) {
        ParamObject o;
        o.object_id = d.id;
        o.class_label = "door";
        o.parts = {{"panel", d.panel_at(d.angle)},
                   {"hinge", d.hinge},
                   {"handle", d.handle_at(d.angle)}};
        o.functional_part = "handle";
        out.push_back(std::move(o));
    }
    for (const Drawer& d : drawers) {
        ParamObject o;
        o.object_id = d.id;
        o.class_label = "drawer";
        o.parts = {{"body", d.body_at(d.extension)}, {"handle", d.handle_at(d.extension)}};
        o.functional_part = "handle";
        out.push_back(std::move(o));
    }
    for (const FreeObject& f : free_objects) {
        ParamObject o;
        o.object_id = f.id;
        o.class_label = f.class_label;
        o.parts = {{"body", f.primitive}};
        o.functional_part = "body";
        out.push_back(std::move(o));
    }
    for (const Stain& s : stains) {
        ParamObject o;
        o.object_id = s.id;
        o.class_label = "stain";
        o.parts = {{"patch", s.patch}};
        o.functional_part = "patch";
        out.push_back(std::move(o));
    }
    return out;
}

std::map<std::string, int> SceneWorld::door_labels() const {
    std::map<std::string, int> out;
    for (const Door& d : doors)
        if (d.map_label != 0) out[d.id] = d.map_label;
    return out;
}

json world_to_json(const SceneWorld& world) {
    json obstacles = json::array();
    for (const GeometricPrimitive& p : world.static_obstacles)
        obstacles.push_back(primitive_to_json(p));
    json doors = json::array();
    for (const Door& d : world.doors)
        doors.push_back(json{{"id", d.id},
                             {"map_label", d.map_label},
                             {"hinge", primitive_to_json(d.hinge)},
                             {"panel", primitive_to_json(d.panel)},
                             {"handle", primitive_to_json(d.handle)},
                             {"angle", d.angle}});
    json drawers = json::array();
    for (const Drawer& d : world.drawers)
        drawers.push_back(json{{"id", d.id},
                               {"body", primitive_to_json(d.body)},
                               {"handle", primitive_to_json(d.handle)},
                               {"axis", to_json(d.axis)},
                               {"extension", d.extension},
                               {"max_extension", d.max_extension}});
    json objects = json::array();
    for (const FreeObject& f : world.free_objects)
        objects.push_back(json{{"id", f.id},
                               {"class_label", f.class_label},
                               {"primitive", primitive_to_json(f.primitive)}});
    json stains = json::array();
    for (const Stain& s : world.stains)
        stains.push_back(json{{"id", s.id},
                              {"patch", primitive_to_json(s.patch)},
                              {"coverage", s.coverage}});
    return json{{"static_obstacles", obstacles},
                {"doors", doors},
                {"drawers", drawers},
                {"free_objects", objects},
                {"stains", stains},
                {"map", scene::birdseye_to_json(world.map)},
                {"robot", json{{"base", json::array({world.robot_start_x, world.robot_start_y,
                                                     world.robot_start_heading})}}}};
}

SceneWorld world_from_json(const json& j) {
    SceneWorld w;
    for (const auto& p : require_field(j, "static_obstacles", "scene"))
        w.static_obstacles.push_back(primitive_from_json(p));
    for (const auto& d : require_field(j, "doors", "scene")) {
        Door door;
        door.id = require_field(d, "id", "door").get<std::string>();
        door.map_label = static_cast<int>(require_number(d, "map_label", "door"));
        door.hinge = std::get<HingeAxis>(primitive_from_json(require_field(d, "hinge", "door")));
        door.panel = std::get<Cuboid>(primitive_from_json(require_field(d, "panel", "door")));
        door.handle = std::get<Cylinder>(primitive_from_json(require_field(d, "handle", "door")));
        door.angle = require_number(d, "angle", "door");
        if (door.angle < door.hinge.swing_range[0] - 1e-9 ||
            door.angle > door.hinge.swing_range[1] + 1e-9)
            throw SchemaError("door '" + door.id + "': angle outside swing range");
        w.doors.push_back(std::move(door));
    }
    for (const auto& d : require_field(j, "drawers", "scene")) {
        Drawer dr;
        dr.id = require_field(d, "id", "drawer").get<std::string>();
        dr.body = std::get<Cuboid>(primitive_from_json(require_field(d, "body", "drawer")));
        dr.handle = std::get<Cylinder>(primitive_from_json(require_field(d, "handle", "drawer")));
        dr.axis = unitvec_from_json(require_field(d, "axis", "drawer"), "drawer.axis");
        dr.extension = require_number(d, "extension", "drawer");
        dr.max_extension = require_number(d, "max_extension", "drawer");
        if (dr.extension < -1e-9 || dr.extension > dr.max_extension + 1e-9)
            throw SchemaError("drawer '" + dr.id + "': extension outside [0, max_extension]");
        w.drawers.push_back(std::move(dr));
    }
    for (const auto& f : require_field(j, "free_objects", "scene")) {
        FreeObject obj;
        obj.id = require_field(f, "id", "object").get<std::string>();
        obj.class_label = require_field(f, "class_label", "object").get<std::string>();
        obj.primitive = primitive_from_json(require_field(f, "primitive", "object"));
        w.free_objects.push_back(std::move(obj));
    }
    for (const auto& s : require_field(j, "stains", "scene")) {
        Stain st;
        st.id = require_field(s, "id", "stain").get<std::string>();
        st.patch = std::get<Cuboid>(primitive_from_json(require_field(s, "patch", "stain")));
        st.coverage = require_number(s, "coverage", "stain");
        if (st.coverage < 0.0 || st.coverage > 1.0)
            throw SchemaError("stain '" + st.id + "': coverage outside [0, 1]");
        w.stains.push_back(std::move(st));
    }
    w.map = scene::birdseye_from_json(require_field(j, "map", "scene"));
    const json& robot = require_field(j, "robot", "scene");
    const json& base = require_field(robot, "base", "scene.robot");
    if (!base.is_array() || base.size() != 3)
        throw SchemaError("scene.robot.base: expected [x, y, heading]");
    w.robot_start_x = base[0].get<double>();
    w.robot_start_y = base[1].get<double>();
    w.robot_start_heading = base[2].get<double>();
    return w;
}

json robot_state_to_json(const RobotState& r) {
    json g;
    switch (r.gripper.state) {
        case traj::GripperState::open: g = "open"; break;
        case traj::GripperState::closed: g = "closed"; break;
        case traj::GripperState::width: g = r.gripper.width; break;
    }
    json out{{"base", json::array({r.base_x, r.base_y, r.heading})},
             {"ee_pose", to_json(r.ee_pose)},
             {"gripper", g}};
    if (r.held) out["held"] = *r.held;
    return out;
}

json subtask_result_to_json(const SubtaskResult& r) {
    json events = json::array();
    for (const Event& e : r.events)
        events.push_back(json{{"time_index", e.time_index},
                              {"kind", e.kind},
                              {"detail", e.detail},
                              {"value", e.value}});
    json out{{"subtask_index", r.subtask_index},
             {"outcome", r.success ? "success" : "failure"},
             {"events", events}};
    if (!r.success) out["reason"] = r.failure_reason;
    return out;
}

std::string trace_to_jsonl(const ExecutionTrace& t) {
    std::string out;
    for (const TraceStep& s : t.steps) {
        const json line{{"time_index", s.time_index},
                        {"subtask_index", s.subtask_index},
                        {"waypoint_index", s.waypoint_index},
                        {"robot", robot_state_to_json(s.robot)}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace geomcoder::sim
