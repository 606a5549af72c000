#include "geomcoder/plan/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "geomcoder/geom/json.hpp"
#include "geomcoder/geom/ops.hpp"

namespace geomcoder::plan {

namespace {

using traj::Curve;
using traj::GripperCommand;
using traj::LineSegment;
using traj::TrajectorySpec;

const ParamObject& require_object(std::span<const ParamObject> objects, const std::string& id) {
    for (const ParamObject& o : objects)
        if (o.object_id == id) return o;
    throw SynthesisFailed("no scene object with id '" + id + "'");
}

template <typename T>
const T* part_of(const ParamObject& obj) {
    for (const auto& [name, prim] : obj.parts)
        if (const T* p = std::get_if<T>(&prim)) return p;
    return nullptr;
}

const GeometricPrimitive& grasp_part(const ParamObject& obj) {
    if (obj.functional_part)
        if (const GeometricPrimitive* p = obj.find_part(*obj.functional_part)) return *p;
    if (obj.parts.empty()) throw MissingPrimitive("object '" + obj.object_id + "' has no parts");
    return obj.parts.front().second;
}

double param_or(const json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    if (!params.at(key).is_number()) throw SchemaError(std::string("param '") + key + "' must be a number");
    return params.at(key).get<double>();
}

int waypoints_or(const json& params, int fallback) {
    return static_cast<int>(param_or(params, "waypoints", fallback));
}

// Horizontal in-face half width of a door panel given the hinge direction.
double panel_half_width(const Cuboid& panel, const Vec3& vertical) {
    const Mat3 r = panel.orientation.to_matrix();
    const std::array<double, 3> he{panel.half_extents.x, panel.half_extents.y,
                                   panel.half_extents.z};
    int k_n = 0;
    for (int k = 1; k < 3; ++k)
        if (he[k] < he[k_n]) k_n = k;
    const int k_a = (k_n + 1) % 3, k_b = (k_n + 2) % 3;
    const int k_v =
        std::abs(r.col(k_a).dot(vertical)) >= std::abs(r.col(k_b).dot(vertical)) ? k_a : k_b;
    return he[k_v == k_a ? k_b : k_a];
}

Point3 cylinder_midpoint(const Cylinder& c) {
    return c.axis_point + c.axis_dir.vec() * (0.5 * c.height);
}

// --- recipes ---------------------------------------------------------------

SynthesisOutcome build_door_arc(const json& params, const ParamObject& door,
                                const traj::ConstraintSet& constraints, const RobotProfile& robot,
                                bool closing) {
    const HingeAxis* hinge = part_of<HingeAxis>(door);
    if (!hinge) throw MissingPrimitive("object '" + door.object_id + "' has no hinge part");
    const Cylinder* handle = part_of<Cylinder>(door);
    if (!handle) throw MissingPrimitive("object '" + door.object_id + "' has no handle part");

    double sweep;
    json resolved = json::object();
    if (params.contains("sweep")) {
        sweep = params.at("sweep").get<double>();
        resolved["sweep"] = sweep;
    } else {
        double base = kPi / 2;
        if (const Cuboid* panel = part_of<Cuboid>(door)) {
            const double width = 2.0 * panel_half_width(*panel, hinge->direction.vec());
            base = std::max(traj::required_sweep(width, robot.passage_width), kPi / 2);
        }
        sweep = std::min(base, hinge->swing_range[1]);
    }

    const int count = waypoints_or(params, 16);
    resolved["waypoints"] = count;

    TrajectorySpec spec;
    spec.curve = Curve{closing
                           ? traj::make_arc(hinge->point, hinge->direction,
                                            cylinder_midpoint(*handle), -sweep)
                           : traj::synth_door_arc(*hinge, cylinder_midpoint(*handle), sweep)};
    spec.orientation = traj::RadialFacing{};
    spec.waypoint_count = count;
    spec.gripper_program = {{0, GripperCommand::closed()}, {count - 1, GripperCommand::opened()}};
    (void)constraints;
    return {spec, closing ? "door-arc-close" : "door-arc", resolved};
}

SynthesisOutcome build_drawer_pull(const json& params, const ParamObject& drawer, bool closing) {
    const Cuboid* body = part_of<Cuboid>(drawer);
    if (!body) throw MissingPrimitive("object '" + drawer.object_id + "' has no body part");
    const Cylinder* handle = part_of<Cylinder>(drawer);
    if (!handle) throw MissingPrimitive("object '" + drawer.object_id + "' has no handle part");

    const double depth =
        2.0 * std::min({body->half_extents.x, body->half_extents.y, body->half_extents.z});
    const double pull = param_or(params, "pull_distance", 0.8 * depth);
    json resolved{{"pull_distance", pull}};

    LineSegment seg = traj::synth_drawer_pull(*body, *handle, pull);
    if (closing) std::swap(seg.start, seg.end);

    const int count = waypoints_or(params, 12);
    resolved["waypoints"] = count;
    TrajectorySpec spec;
    spec.curve = Curve{seg};
    spec.orientation = traj::TangentAligned{};
    spec.waypoint_count = count;
    spec.gripper_program = {{0, GripperCommand::closed()}, {count - 1, GripperCommand::opened()}};
    return {spec, closing ? "drawer-push" : "drawer-pull", resolved};
}

SynthesisOutcome build_pick(const json& params, const ParamObject& obj,
                            const RobotProfile& robot) {
    const GeometricPrimitive& part = grasp_part(obj);
    if (grasp_dimension(part) > robot.gripper_aperture_max)
        throw SynthesisFailed("object '" + obj.object_id + "' grasp dimension " +
                              std::to_string(grasp_dimension(part)) + " exceeds aperture");
    const double lift = param_or(params, "lift", 0.12);
    const Point3 grasp = primitive_center(part);
    const int count = waypoints_or(params, 8);

    TrajectorySpec spec;
    spec.curve = Curve{LineSegment{grasp + Vec3{0, 0, lift}, grasp}};
    spec.orientation = traj::FixedOrientation{Quat::identity()};
    spec.waypoint_count = count;
    spec.gripper_program = {{0, GripperCommand::opened()}, {count - 1, GripperCommand::closed()}};
    return {spec, "pick-lift", json{{"lift", lift}, {"waypoints", count}}};
}

SynthesisOutcome build_place(const json& params, const ParamObject& obj,
                             std::span<const ParamObject> objects,
                             const traj::ConstraintSet& constraints) {
    if (!params.contains("destination")) throw SchemaError("place: missing param 'destination'");
    const GeometricPrimitive& held = grasp_part(obj);
    const Point3 start = primitive_center(held);

    Point3 support;
    const json& dest = params.at("destination");
    if (dest.is_string()) {
        const ParamObject& target = require_object(objects, dest.get<std::string>());
        support = traj::opening_of(grasp_part(target)).center;
    } else {
        support = vec3_from_json(dest, "place.destination");
    }
    const Point3 release = support + Vec3{0, 0, 0.5 * traj::vertical_extent(held)};

    const double lift = param_or(params, "lift", 0.15);
    const Point3 hover1 = start + Vec3{0, 0, lift};
    const Point3 hover2 = release + Vec3{0, 0, lift};

    const traj::CubicBezier transit = traj::synth_bezier_avoid(hover1, hover2, constraints);

    const int count = waypoints_or(params, 24);
    TrajectorySpec spec;
    spec.curve = Curve{traj::make_composite(
        {Curve{LineSegment{start, hover1}}, Curve{transit}, Curve{LineSegment{hover2, release}}})};
    spec.orientation = traj::FixedOrientation{Quat::identity()};
    spec.waypoint_count = count;
    spec.gripper_program = {{0, GripperCommand::closed()}, {count - 1, GripperCommand::opened()}};
    return {spec, "place-lift-avoid", json{{"lift", lift}, {"waypoints", count}}};
}

SynthesisOutcome build_pour(const json& params, const ParamObject& vessel,
                            std::span<const ParamObject> objects,
                            const traj::ConstraintSet& constraints) {
    if (!params.contains("into")) throw SchemaError("pour: missing param 'into'");
    const ParamObject& target = require_object(objects, params.at("into").get<std::string>());
    const Pose grasp{primitive_center(grasp_part(vessel)), Quat::identity()};
    TrajectorySpec spec =
        traj::synth_pour(grasp, grasp_part(vessel), grasp_part(target), constraints);
    if (params.contains("waypoints")) spec.waypoint_count = waypoints_or(params, 16);
    return {spec, "pour-transit-tilt", json::object()};
}

SynthesisOutcome build_wipe(const json& params, const ParamObject& stain) {
    const Cuboid* patch = part_of<Cuboid>(stain);
    if (!patch) throw MissingPrimitive("object '" + stain.object_id + "' has no patch part");
    const double radius = param_or(params, "wipe_radius", 0.05);
    if (!(radius > 0.0)) throw SchemaError("wipe: wipe_radius must be > 0");

    // Serpentine over the patch top face: rows along the longest in-plane
    // axis, stepping across the other at the wipe radius.
    const Mat3 r = patch->orientation.to_matrix();
    const std::array<double, 3> he{patch->half_extents.x, patch->half_extents.y,
                                   patch->half_extents.z};
    int k_n = 0;
    for (int k = 1; k < 3; ++k)
        if (he[k] < he[k_n]) k_n = k;
    int k_u = (k_n + 1) % 3, k_v = (k_n + 2) % 3;
    if (he[k_u] < he[k_v]) std::swap(k_u, k_v);
    const Vec3 u = r.col(k_u), v = r.col(k_v);
    const Vec3 n = r.col(k_n).z >= 0.0 ? r.col(k_n) : -r.col(k_n);
    const Point3 top = patch->center + n * he[k_n];

    std::vector<Point3> verts;
    const int rows = std::max(2, static_cast<int>(std::ceil(2.0 * he[k_v] / radius)) + 1);
    for (int i = 0; i < rows; ++i) {
        const double vv = -he[k_v] + 2.0 * he[k_v] * i / (rows - 1);
        const Point3 a = top + u * -he[k_u] + v * vv;
        const Point3 b = top + u * he[k_u] + v * vv;
        if (i % 2 == 0) {
            verts.push_back(a);
            verts.push_back(b);
        } else {
            verts.push_back(b);
            verts.push_back(a);
        }
    }
    std::vector<Curve> segs;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        segs.push_back(Curve{LineSegment{verts[i], verts[i + 1]}});
        total += (verts[i + 1] - verts[i]).norm();
    }

    // Waypoints dense enough that the resampled polyline hugs the corners.
    const int count =
        std::min(512, std::max(48, static_cast<int>(std::ceil(total / (0.25 * radius)))));
    TrajectorySpec spec;
    spec.curve = Curve{traj::make_composite(std::move(segs))};
    spec.orientation = traj::FixedOrientation{Quat::identity()};
    spec.waypoint_count = count;
    spec.gripper_program = {{0, GripperCommand::closed()}};
    return {spec, "wipe-serpentine", json{{"wipe_radius", radius}}};
}

SynthesisOutcome run_template(const std::string& template_id, const json& params,
                              const Subtask& subtask, std::span<const ParamObject> objects,
                              const traj::ConstraintSet& constraints, const RobotProfile& robot) {
    if (subtask.target_ids.empty()) throw SynthesisFailed("subtask has no target");
    const ParamObject& target = require_object(objects, subtask.target_ids.front());
    if (template_id == "door-arc") return build_door_arc(params, target, constraints, robot, false);
    if (template_id == "door-arc-close")
        return build_door_arc(params, target, constraints, robot, true);
    if (template_id == "drawer-pull") return build_drawer_pull(params, target, false);
    if (template_id == "drawer-push") return build_drawer_pull(params, target, true);
    if (template_id == "pick-lift") return build_pick(params, target, robot);
    if (template_id == "place-lift-avoid") return build_place(params, target, objects, constraints);
    if (template_id == "pour-transit-tilt") return build_pour(params, target, objects, constraints);
    if (template_id == "wipe-serpentine") return build_wipe(params, target);
    throw SynthesisFailed("unknown template '" + template_id + "'");
}

std::string template_for(const Subtask& subtask, std::span<const ParamObject> objects) {
    if (subtask.target_ids.empty()) throw SynthesisFailed("subtask has no target");
    const ParamObject& target = require_object(objects, subtask.target_ids.front());
    switch (subtask.verb) {
        case Verb::open:
        case Verb::close: {
            const bool closing = subtask.verb == Verb::close;
            if (part_of<HingeAxis>(target) != nullptr)
                return closing ? "door-arc-close" : "door-arc";
            if (part_of<Cuboid>(target) != nullptr && part_of<Cylinder>(target) != nullptr)
                return closing ? "drawer-push" : "drawer-pull";
            throw MissingPrimitive("object '" + target.object_id +
                                   "' has neither a hinge nor a drawer body");
        }
        case Verb::pick: return "pick-lift";
        case Verb::place: return "place-lift-avoid";
        case Verb::pour: return "pour-transit-tilt";
        case Verb::wipe: return "wipe-serpentine";
        case Verb::navigate:
            throw SynthesisFailed("navigate has no manipulation trajectory");
    }
    throw SynthesisFailed("unsupported verb");
}

json merge_params(const json& defaults, const json& overrides) {
    json out = defaults.is_object() ? defaults : json::object();
    if (overrides.is_object())
        for (auto it = overrides.cbegin(); it != overrides.cend(); ++it) out[it.key()] = it.value();
    return out;
}

}  // namespace

SynthesisOutcome TemplateSynthesizer::synthesize(const Subtask& subtask,
                                                 std::span<const ParamObject> objects,
                                                 const traj::ConstraintSet& constraints,
                                                 const RobotProfile& robot) {
    return run_template(template_for(subtask, objects), subtask.params, subtask, objects,
                        constraints, robot);
}

SynthesisOutcome TemplateSynthesizer::instantiate(const std::string& template_id,
                                                  const json& params, const Subtask& subtask,
                                                  std::span<const ParamObject> objects,
                                                  const traj::ConstraintSet& constraints,
                                                  const RobotProfile& robot) {
    return run_template(template_id, params, subtask, objects, constraints, robot);
}

json ExternalProcessProvider::encode_request(const Subtask& subtask,
                                             std::span<const ParamObject> objects,
                                             const traj::ConstraintSet& constraints,
                                             const RobotProfile& robot) {
    json objs = json::array();
    for (const ParamObject& o : objects) objs.push_back(param_object_to_json(o));
    return json{{"subtask", json{{"verb", verb_name(subtask.verb)},
                                 {"targets", subtask.target_ids},
                                 {"params", subtask.params}}},
                {"objects", objs},
                {"constraints", constraints_to_json(constraints)},
                {"robot", robot_profile_to_json(robot)}};
}

SynthesisOutcome ExternalProcessProvider::decode_response(const json& j) {
    const std::string status = require_field(j, "status", "response").get<std::string>();
    if (status != "ok")
        throw SynthesisFailed("external provider: " +
                              (j.contains("message") ? j.at("message").get<std::string>()
                                                     : std::string("unspecified error")));
    SynthesisOutcome out;
    out.spec = traj::spec_from_json(require_field(j, "spec", "response"));
    out.template_id = require_field(j, "template_id", "response").get<std::string>();
    out.resolved_params = j.contains("params") ? j.at("params") : json::object();
    return out;
}

SynthesisOutcome ExternalProcessProvider::synthesize(const Subtask& subtask,
                                                     std::span<const ParamObject> objects,
                                                     const traj::ConstraintSet& constraints,
                                                     const RobotProfile& robot) {
    if (command_.empty()) throw SynthesisFailed("external provider: no command configured");
    const auto dir = std::filesystem::temp_directory_path();
    const std::string tag = std::to_string(
        std::hash<std::string>{}(canonical_dump(encode_request(subtask, objects, constraints,
                                                               robot))));
    const auto req = dir / ("geomcoder-req-" + tag + ".json");
    const auto resp = dir / ("geomcoder-resp-" + tag + ".json");
    save_json_file(req.string(), encode_request(subtask, objects, constraints, robot));
    const std::string cmd = command_ + " < " + req.string() + " > " + resp.string();
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        std::filesystem::remove(req);
        throw SynthesisFailed("external provider exited with status " + std::to_string(rc));
    }
    json out;
    try {
        out = load_json_file(resp.string());
    } catch (const Error& e) {
        std::filesystem::remove(req);
        std::filesystem::remove(resp);
        throw SynthesisFailed(std::string("external provider response unreadable: ") + e.what());
    }
    std::filesystem::remove(req);
    std::filesystem::remove(resp);
    return decode_response(out);
}

ValidationDecision validate_generated(const traj::TrajectorySpec& spec,
                                      const traj::ConstraintSet& constraints) {
    const traj::ConstraintReport report = traj::check_constraints(spec, constraints);
    ValidationDecision d;
    d.accepted = report.ok();
    for (const traj::Violation& v : report.violations) d.reasons.push_back(v.check);
    return d;
}

SynthesisResult synthesize_subtask(const Subtask& subtask, std::span<const ParamObject> objects,
                                   const traj::ConstraintSet& constraints,
                                   const RobotProfile& robot, SkillCache& cache,
                                   SynthesisProvider& provider) {
    if (subtask.verb == Verb::navigate)
        throw SynthesisFailed("navigate subtasks are routed to the grid planner");
    if (subtask.target_ids.empty()) throw SynthesisFailed("subtask has no target");
    const ParamObject& target = require_object(objects, subtask.target_ids.front());
    const SkillKey key{target.class_label, subtask.verb};

    TemplateSynthesizer instantiator;
    if (const auto record = cache.get(key)) {
        const json params = merge_params(record->default_params, subtask.params);
        try {
            SynthesisOutcome out = instantiator.instantiate(record->template_id, params, subtask,
                                                            objects, constraints, robot);
            const ValidationDecision d = validate_generated(out.spec, constraints);
            cache.record_validation(key, d.accepted);
            if (d.accepted) return {out.spec, Provenance::cached, out.template_id};
        } catch (const MissingPrimitive&) {
            throw;
        } catch (const Error&) {
            cache.record_validation(key, false);
            // stale recipe; fall through to fresh synthesis
        }
    }

    std::string rejected;
    for (int attempt = 0; attempt < 2; ++attempt) {  // retry budget of 1
        SynthesisOutcome out = provider.synthesize(subtask, objects, constraints, robot);
        const ValidationDecision d = validate_generated(out.spec, constraints);
        if (d.accepted) {
            SkillRecord record;
            record.key = key;
            record.template_id = out.template_id;
            record.default_params = out.resolved_params;
            record.validation_stats.successes = 1;
            cache.put(std::move(record));
            return {out.spec, Provenance::generated, out.template_id};
        }
        rejected.clear();
        for (const std::string& r : d.reasons) rejected += (rejected.empty() ? "" : ", ") + r;
    }
    throw SynthesisFailed("generated trajectory rejected by validation (" + rejected + ")");
}

json constraints_to_json(const traj::ConstraintSet& constraints) {
    json obstacles = json::array();
    for (const GeometricPrimitive& o : constraints.obstacles)
        obstacles.push_back(primitive_to_json(o));
    return json{{"clearance_margin", constraints.clearance_margin},
                {"obstacles", obstacles},
                {"robot", robot_profile_to_json(constraints.robot)},
                {"base_pose", to_json(constraints.base_pose)}};
}

traj::ConstraintSet constraints_from_json(const json& j) {
    traj::ConstraintSet c;
    c.clearance_margin = require_number(j, "clearance_margin", "constraints");
    if (c.clearance_margin < 0.0) throw SchemaError("constraints.clearance_margin: must be >= 0");
    const json& obstacles = require_field(j, "obstacles", "constraints");
    if (!obstacles.is_array()) throw SchemaError("constraints.obstacles: expected array");
    for (const auto& o : obstacles) c.obstacles.push_back(primitive_from_json(o));
    c.robot = robot_profile_from_json(require_field(j, "robot", "constraints"));
    c.base_pose = pose_from_json(require_field(j, "base_pose", "constraints"), "constraints.base_pose");
    return c;
}

}  // namespace geomcoder::plan
