// Simulated articulated scene: doors on hinges, sliding drawers, free
// objects, stain patches, and the bird's-eye map used for navigation.
// Articulated geometry is stored at its zero configuration; posed primitives
// are derived from the current angle/extension.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomcoder/core/json.hpp"
#include "geomcoder/geom/primitives.hpp"
#include "geomcoder/scene/scene.hpp"
#include "geomcoder/traj/trajectory.hpp"

namespace geomcoder::sim {

// Rotation about the line (point, dir) as a rigid transform.
RigidTransform rotation_about_line(const Point3& point, const UnitVec3& dir, double angle);

struct Door {
    std::string id;
    int map_label = 0;
    HingeAxis hinge;
    Cuboid panel;     // closed (angle 0) pose
    Cylinder handle;  // closed (angle 0) pose
    double angle = 0.0;

    Cuboid panel_at(double a) const;
    Cylinder handle_at(double a) const;
    Point3 handle_grasp_at(double a) const;
    double panel_width() const;   // horizontal in-face extent
    double handle_orbit() const;  // grasp-point distance to the hinge axis
};

struct Drawer {
    std::string id;
    Cuboid body;      // extension 0 pose
    Cylinder handle;  // extension 0 pose
    UnitVec3 axis;    // outward slide direction
    double extension = 0.0;
    double max_extension = 0.3;

    Cuboid body_at(double e) const;
    Cylinder handle_at(double e) const;
    Point3 handle_grasp_at(double e) const;
};

struct FreeObject {
    std::string id;
    std::string class_label;
    GeometricPrimitive primitive;
};

struct Stain {
    std::string id;
    Cuboid patch;  // thin
    double coverage = 0.0;

    // 1 cm coverage grid over the patch face, built lazily.
    std::vector<std::uint8_t> covered;
    int grid_rows = 0;
    int grid_cols = 0;
};

struct SceneWorld {
    std::vector<GeometricPrimitive> static_obstacles;
    std::vector<Door> doors;
    std::vector<Drawer> drawers;
    std::vector<FreeObject> free_objects;
    std::vector<Stain> stains;
    scene::BirdsEyeMap map;
    double robot_start_x = 0.0;
    double robot_start_y = 0.0;
    double robot_start_heading = 0.0;

    Door* find_door(const std::string& id);
    Drawer* find_drawer(const std::string& id);
    FreeObject* find_object(const std::string& id);
    Stain* find_stain(const std::string& id);
    const Door* find_door(const std::string& id) const;
    const Drawer* find_drawer(const std::string& id) const;
    const FreeObject* find_object(const std::string& id) const;
    const Stain* find_stain(const std::string& id) const;

    // Snapshot of every object as a ParamObject with its posed primitives.
    std::vector<ParamObject> param_objects() const;
    std::map<std::string, int> door_labels() const;
};

struct RobotState {
    double base_x = 0.0;
    double base_y = 0.0;
    double heading = 0.0;
    Pose ee_pose;
    traj::GripperCommand gripper = traj::GripperCommand::opened();
    std::optional<std::string> held;

    Point3 base_lifted() const { return {base_x, base_y, 0.0}; }
};

struct Event {
    int time_index = 0;
    std::string kind;  // collision | slip | drop | grasp-miss | reach-violation
    std::string detail;
    double value = 0.0;
};

struct SubtaskResult {
    int subtask_index = 0;
    bool success = false;
    std::string failure_reason;  // empty on success
    std::vector<Event> events;
};

struct TraceStep {
    int time_index = 0;
    int subtask_index = 0;
    int waypoint_index = 0;
    RobotState robot;
};

struct ExecutionTrace {
    std::vector<TraceStep> steps;
    std::vector<json> world_snapshots;  // at subtask boundaries
    bool long_term_success = false;
};

json world_to_json(const SceneWorld& world);
SceneWorld world_from_json(const json& j);

json robot_state_to_json(const RobotState& r);
json subtask_result_to_json(const SubtaskResult& r);
std::string trace_to_jsonl(const ExecutionTrace& t);

}  // namespace geomcoder::sim
