// Constraint-aware trajectory synthesis and arc-length-uniform waypoint
// sampling for manipulation subtasks.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "geomcoder/core/json.hpp"
#include "geomcoder/traj/curve.hpp"

namespace geomcoder::traj {

// --- orientation assignment along a curve --------------------------------

struct FixedOrientation {
    Quat orientation;
};
struct TangentAligned {
    UnitVec3 up_hint{};  // defaults to +z
};
struct RadialFacing {};  // toward the axis; arcs only
struct TiltRamp {
    UnitVec3 axis{};       // tilt axis
    double start = 0.0;    // radians at ramp begin
    double end = 0.0;      // radians at curve end; |end| <= robot max_tilt
    double ramp_start = 0.0;  // arc-length fraction where ramping begins
};

using OrientationPolicy = std::variant<FixedOrientation, TangentAligned, RadialFacing, TiltRamp>;

// --- waypoints ------------------------------------------------------------

enum class GripperState { open, closed, width };

struct GripperCommand {
    GripperState state = GripperState::open;
    double width = 0.0;  // meters, used when state == width

    static GripperCommand opened() { return {GripperState::open, 0.0}; }
    static GripperCommand closed() { return {GripperState::closed, 0.0}; }
    static GripperCommand with_width(double w) { return {GripperState::width, w}; }
    bool operator==(const GripperCommand&) const = default;
};

struct Waypoint {
    Pose pose;
    GripperCommand gripper;
    double dwell = 0.0;  // seconds
};

struct ConstraintSet {
    double clearance_margin = 0.0;
    std::vector<GeometricPrimitive> obstacles;
    RobotProfile robot;
    Pose base_pose;
};

struct TrajectorySpec {
    Curve curve;
    OrientationPolicy orientation = FixedOrientation{Quat::identity()};
    int waypoint_count = 16;
    std::vector<std::pair<int, GripperCommand>> gripper_program;  // (waypoint index, command)
};

struct Violation {
    std::string check;   // "clearance" | "reach" | "tilt" | "aperture"
    double measured = 0.0;
    double limit = 0.0;
};

struct ConstraintReport {
    double min_clearance = 0.0;
    bool reach_ok = true;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

// --- operations -----------------------------------------------------------

// Waypoints at arc-length-uniform parameters (first t=0, last t=1), oriented
// per policy; gripper commands from the program carry forward between entries.
std::vector<Waypoint> sample_waypoints(const TrajectorySpec& spec, const ConstraintSet& constraints);

// Arc about the hinge through the grasp point; radius is preserved exactly.
Arc synth_door_arc(const HingeAxis& hinge, const Point3& grasp, double sweep);

// Minimal opening angle such that panel_width * sin(theta) >= passage_width.
double required_sweep(double panel_width, double passage_width);

// Cubic Bezier from start to end whose interior control points are lifted
// along the obstacle-escape direction by the smallest feasible amount from a
// doubling search. Deterministic.
CubicBezier synth_bezier_avoid(const Point3& start, const Point3& end,
                               const ConstraintSet& constraints);

// Transit to a hover above the target opening, then tilt in place.
TrajectorySpec synth_pour(const Pose& grasp, const GeometricPrimitive& vessel,
                          const GeometricPrimitive& target, const ConstraintSet& constraints);

// Straight pull from the handle midpoint along the drawer's outward normal.
LineSegment synth_drawer_pull(const Cuboid& drawer, const Cylinder& handle, double pull_distance);

// Minimum over arc-length-uniform samples of the distance to the nearest
// obstacle; +inf when there are no obstacles.
double min_clearance(const Curve& curve, std::span<const GeometricPrimitive> obstacles,
                     int samples);

ConstraintReport check_constraints(const TrajectorySpec& spec, const ConstraintSet& constraints);

// Opening center and radius of a container's receiving aperture.
struct Opening {
    Point3 center;
    double radius = 0.0;
};
Opening opening_of(const GeometricPrimitive& prim);

// Height of a primitive along world z (vessel height for pouring).
double vertical_extent(const GeometricPrimitive& prim);

// --- serialization ----------------------------------------------------------

json curve_to_json(const Curve& c);
Curve curve_from_json(const json& j);
json spec_to_json(const TrajectorySpec& spec);
TrajectorySpec spec_from_json(const json& j);
json waypoints_to_json(const std::vector<Waypoint>& wps);
std::string waypoints_to_csv(const std::vector<Waypoint>& wps);

}  // namespace geomcoder::traj
