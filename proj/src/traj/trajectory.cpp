#include "geomcoder/traj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "geomcoder/core/error.hpp"
#include "geomcoder/geom/json.hpp"
#include "geomcoder/geom/ops.hpp"

namespace geomcoder::traj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal sampling density and slack for the avoidance search: the synthesized
// curve must stay above the margin under any later (denser) re-check, so the
// builder demands margin + slack at its own sample count.
constexpr int kAvoidSamples = 4096;
constexpr double kAvoidSlack = 1e-3;
constexpr int kCheckSamples = 512;

Quat frame_from_axes(const Vec3& x, const Vec3& y, const Vec3& z) {
    return Quat::from_matrix(Mat3::from_columns(x, y, z));
}

Quat tangent_frame(const Vec3& tangent, const Vec3& up_hint) {
    const Vec3 x = tangent;
    Vec3 z = up_hint - x * up_hint.dot(x);
    if (z.norm() < 1e-9) {
        const Vec3 alt = std::abs(x.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
        z = alt - x * alt.dot(x);
    }
    z = z.normalized();
    return frame_from_axes(x, z.cross(x), z);
}

// Innermost Arc at global parameter t (composites recurse by arc length).
const Arc* arc_at(const Curve& c, double t, double& local_t) {
    if (const auto* a = std::get_if<Arc>(&c.value)) {
        local_t = t;
        return a;
    }
    if (const auto* comp = std::get_if<Composite>(&c.value)) {
        double total = 0.0;
        std::vector<double> lens;
        for (const Curve& s : comp->segments) {
            lens.push_back(arc_length(s));
            total += lens.back();
        }
        if (total <= 0.0) return nullptr;
        double s = clamp01(t) * total;
        for (std::size_t i = 0; i < comp->segments.size(); ++i) {
            if (s <= lens[i] || i + 1 == comp->segments.size()) {
                const double u = lens[i] > 0.0 ? clamp01(s / lens[i]) : 0.0;
                return arc_at(comp->segments[i], u, local_t);
            }
            s -= lens[i];
        }
    }
    return nullptr;
}

double tilt_angle_at(const TiltRamp& ramp, double u) {
    if (u <= ramp.ramp_start) return ramp.start;
    const double span = 1.0 - ramp.ramp_start;
    const double f = span > 1e-12 ? (u - ramp.ramp_start) / span : 1.0;
    return ramp.start + (ramp.end - ramp.start) * clamp01(f);
}

Quat orientation_at(const OrientationPolicy& policy, const Curve& curve, double t, double u) {
    return std::visit(
        [&](const auto& p) -> Quat {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, FixedOrientation>) {
                return p.orientation;
            } else if constexpr (std::is_same_v<T, TangentAligned>) {
                return tangent_frame(curve_tangent(curve, t), p.up_hint.vec());
            } else if constexpr (std::is_same_v<T, RadialFacing>) {
                double lt = 0.0;
                const Arc* arc = arc_at(curve, t, lt);
                if (!arc) throw PolicyViolation("radial-facing orientation requires an arc");
                const Point3 pos = eval_curve(Curve{*arc}, lt);
                const Vec3 rel = pos - arc->axis_point;
                const Vec3 z = arc->axis_dir.vec();
                const Vec3 radial = rel - z * z.dot(rel);
                const Vec3 x = (-radial).normalized();  // face the hinge
                return frame_from_axes(x, z.cross(x), z);
            } else {
                return Quat::from_axis_angle(p.axis.vec(), tilt_angle_at(p, u));
            }
        },
        policy);
}

std::vector<Waypoint> sample_impl(const TrajectorySpec& spec, const ConstraintSet& constraints,
                                  bool enforce_tilt) {
    if (spec.waypoint_count < 2)
        throw PolicyViolation("sample_waypoints: waypoint_count must be >= 2");
    for (const auto& [idx, cmd] : spec.gripper_program)
        if (idx < 0 || idx >= spec.waypoint_count)
            throw PolicyViolation("sample_waypoints: gripper program index out of range");
    if (enforce_tilt) {
        if (const auto* ramp = std::get_if<TiltRamp>(&spec.orientation)) {
            if (std::abs(ramp->end) > constraints.robot.max_tilt + 1e-12)
                throw PolicyViolation("tilt ramp end " + std::to_string(ramp->end) +
                                      " exceeds max tilt " +
                                      std::to_string(constraints.robot.max_tilt));
        }
    }

    const int n = spec.waypoint_count;
    const double total = arc_length(spec.curve);
    std::vector<Waypoint> out;
    out.reserve(n);
    GripperCommand current = GripperCommand::opened();
    for (int j = 0; j < n; ++j) {
        const double frac = static_cast<double>(j) / (n - 1);
        const double t = total > 0.0 ? param_at_length(spec.curve, frac * total) : frac;
        Waypoint wp;
        wp.pose.position = eval_curve(spec.curve, t);
        wp.pose.orientation = orientation_at(spec.orientation, spec.curve, t, frac);
        for (const auto& [idx, cmd] : spec.gripper_program)
            if (idx == j) current = cmd;
        wp.gripper = current;
        out.push_back(wp);
    }
    return out;
}

}  // namespace

std::vector<Waypoint> sample_waypoints(const TrajectorySpec& spec,
                                       const ConstraintSet& constraints) {
    return sample_impl(spec, constraints, /*enforce_tilt=*/true);
}

Arc synth_door_arc(const HingeAxis& hinge, const Point3& grasp, double sweep) {
    const double radius = (grasp - hinge.point).cross(hinge.direction.vec()).norm();
    if (radius < 0.01)
        throw DegenerateRadius("synth_door_arc: grasp within 1 cm of the hinge axis");
    if (!(sweep > 0.0) || sweep > hinge.swing_range[1] + 1e-12)
        throw SweepOutOfRange("synth_door_arc: sweep " + std::to_string(sweep) +
                              " outside (0, " + std::to_string(hinge.swing_range[1]) + "]");
    return make_arc(hinge.point, hinge.direction, grasp, sweep);
}

double required_sweep(double panel_width, double passage_width) {
    if (!(panel_width > 0.0) || !(passage_width > 0.0))
        throw Infeasible("required_sweep: widths must be > 0");
    if (passage_width > panel_width)
        throw Infeasible("required_sweep: passage " + std::to_string(passage_width) +
                         " wider than panel " + std::to_string(panel_width));
    return std::asin(passage_width / panel_width);
}

CubicBezier synth_bezier_avoid(const Point3& start, const Point3& end,
                               const ConstraintSet& constraints) {
    auto clearance_at = [&](const Point3& p) {
        double best = kInf;
        for (const GeometricPrimitive& obs : constraints.obstacles)
            best = std::min(best, distance_to_primitive(p, obs));
        return best;
    };
    if (clearance_at(start) < constraints.clearance_margin)
        throw EndpointInCollision("synth_bezier_avoid: start violates the clearance margin");
    if (clearance_at(end) < constraints.clearance_margin)
        throw EndpointInCollision("synth_bezier_avoid: end violates the clearance margin");

    const Point3 a = start + (end - start) * (1.0 / 3.0);
    const Point3 b = start + (end - start) * (2.0 / 3.0);
    if (constraints.obstacles.empty()) return CubicBezier{start, a, b, end};

    const Point3 mid = (start + end) * 0.5;
    Vec3 escape{};
    for (const GeometricPrimitive& obs : constraints.obstacles) {
        const Vec3 d = mid - primitive_center(obs);
        if (d.norm() > 1e-9) escape += d.normalized();
    }
    escape = escape.norm() > 1e-9 ? escape.normalized() : Vec3{0, 0, 1};

    auto feasible = [&](double h, double slack) -> std::optional<CubicBezier> {
        const CubicBezier c{start, a + escape * h, b + escape * h, end};
        if (min_clearance(Curve{c}, constraints.obstacles, kAvoidSamples) >=
            constraints.clearance_margin + slack)
            return c;
        return std::nullopt;
    };

    if (auto c = feasible(0.0, kAvoidSlack)) return *c;
    for (double h = 0.05; h <= 2.0; h *= 2.0)
        if (auto c = feasible(h, kAvoidSlack)) return *c;
    if (auto c = feasible(2.0, kAvoidSlack)) return *c;
    throw NoFeasibleCurve("synth_bezier_avoid: no lift <= 2 m achieves the margin");
}

Opening opening_of(const GeometricPrimitive& prim) {
    if (const auto* s = std::get_if<Sphere>(&prim))
        return {s->center + Vec3{0, 0, s->radius}, s->radius};
    if (const auto* cy = std::get_if<Cylinder>(&prim)) {
        const Point3 p0 = cy->axis_point;
        const Point3 p1 = cy->axis_point + cy->axis_dir.vec() * cy->height;
        return {p1.z >= p0.z ? p1 : p0, cy->radius};
    }
    if (const auto* cb = std::get_if<Cuboid>(&prim)) {
        const Mat3 r = cb->orientation.to_matrix();
        int k_up = 0;
        double best = -1.0;
        for (int k = 0; k < 3; ++k) {
            const double a = std::abs(r.col(k).z);
            if (a > best) {
                best = a;
                k_up = k;
            }
        }
        const double sign = r.col(k_up).z >= 0.0 ? 1.0 : -1.0;
        const Point3 center = cb->center + r.col(k_up) * (sign * (&cb->half_extents.x)[k_up]);
        const double r1 = (&cb->half_extents.x)[(k_up + 1) % 3];
        const double r2 = (&cb->half_extents.x)[(k_up + 2) % 3];
        return {center, std::min(r1, r2)};
    }
    if (const auto* env = std::get_if<ConvexEnvelope>(&prim)) {
        double zmax = -kInf;
        for (const Point3& v : env->vertices) zmax = std::max(zmax, v.z);
        Point3 c{};
        int n = 0;
        for (const Point3& v : env->vertices)
            if (v.z > zmax - 0.02) {
                c += v;
                ++n;
            }
        c = n > 0 ? c / n : primitive_center(prim);
        return {c, 0.5 * grasp_dimension(prim)};
    }
    throw MissingPrimitive("opening_of: primitive has no well-defined opening");
}

double vertical_extent(const GeometricPrimitive& prim) {
    return std::visit(
        [](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return 2.0 * g.radius;
            } else if constexpr (std::is_same_v<T, Cylinder>) {
                const double dz = std::abs(g.axis_dir.z);
                return g.height * dz + 2.0 * g.radius * std::sqrt(std::max(0.0, 1.0 - dz * dz));
            } else if constexpr (std::is_same_v<T, Cuboid>) {
                const Mat3 r = g.orientation.to_matrix();
                return 2.0 * (std::abs(r.m[2][0]) * g.half_extents.x +
                              std::abs(r.m[2][1]) * g.half_extents.y +
                              std::abs(r.m[2][2]) * g.half_extents.z);
            } else if constexpr (std::is_same_v<T, ConvexEnvelope>) {
                double lo = kInf, hi = -kInf;
                for (const Point3& v : g.vertices) {
                    lo = std::min(lo, v.z);
                    hi = std::max(hi, v.z);
                }
                return g.vertices.empty() ? 0.0 : hi - lo;
            } else {
                return 0.0;
            }
        },
        prim);
}

TrajectorySpec synth_pour(const Pose& grasp, const GeometricPrimitive& vessel,
                          const GeometricPrimitive& target, const ConstraintSet& constraints) {
    if (constraints.robot.max_tilt <= 0.5)
        throw PolicyViolation("synth_pour: max tilt " + std::to_string(constraints.robot.max_tilt) +
                              " rad cannot pour");
    const Opening opening = opening_of(target);
    const double vessel_h = vertical_extent(vessel);
    const Point3 hover =
        opening.center + Vec3{0, 0, 0.5 * vessel_h + constraints.clearance_margin};

    const Point3 base{constraints.base_pose.position.x, constraints.base_pose.position.y, 0.0};
    if ((hover - base).norm() > constraints.robot.arm_reach_radius)
        throw UnreachableHover("synth_pour: hover point outside arm reach");

    double tilt_end = std::min(2.0, constraints.robot.max_tilt);
    // Opening of the tilted vessel swings by (h/2)*sin(tilt); keep it inside
    // the target opening.
    if (vessel_h > 1e-9) {
        const double geom_max = std::asin(std::min(1.0, opening.radius / (0.5 * vessel_h)));
        tilt_end = std::min(tilt_end, geom_max);
    }
    if (tilt_end <= 0.5)
        throw PolicyViolation("synth_pour: vessel too tall for the target opening");

    const Vec3 travel = hover - grasp.position;
    Vec3 axis = Vec3{0, 0, 1}.cross(Vec3{travel.x, travel.y, 0.0});
    axis = axis.norm() > 1e-9 ? axis.normalized() : Vec3{1, 0, 0};

    TrajectorySpec spec;
    spec.curve = Curve{make_composite({Curve{LineSegment{grasp.position, hover}},
                                       Curve{LineSegment{hover, hover}}})};
    spec.orientation = TiltRamp{UnitVec3::from(axis), 0.0, tilt_end, 0.75};
    spec.waypoint_count = 16;
    spec.gripper_program = {{0, GripperCommand::closed()}};
    return spec;
}

LineSegment synth_drawer_pull(const Cuboid& drawer, const Cylinder& handle, double pull_distance) {
    const Mat3 r = drawer.orientation.to_matrix();
    const std::array<double, 3> he{drawer.half_extents.x, drawer.half_extents.y,
                                   drawer.half_extents.z};
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (he[i] < he[k]) k = i;
    const double depth = 2.0 * he[k];
    if (!(pull_distance > 0.0) || pull_distance > depth + 1e-12)
        throw PullTooLong("synth_drawer_pull: pull distance must be in (0, " +
                          std::to_string(depth) + "]");

    const Point3 handle_mid = handle.axis_point + handle.axis_dir.vec() * (0.5 * handle.height);
    const double off = (handle_mid - drawer.center).dot(r.col(k));
    if (std::abs(off) < 0.01)
        throw AmbiguousNormal("synth_drawer_pull: handle within 1 cm of the center plane");
    const Vec3 normal = r.col(k) * (off > 0.0 ? 1.0 : -1.0);
    return LineSegment{handle_mid, handle_mid + normal * pull_distance};
}

double min_clearance(const Curve& curve, std::span<const GeometricPrimitive> obstacles,
                     int samples) {
    if (obstacles.empty()) return kInf;
    samples = std::max(samples, 2);
    const double total = arc_length(curve);
    double best = kInf;
    for (int i = 0; i < samples; ++i) {
        const double s = total * i / (samples - 1);
        const Point3 p = eval_curve(curve, total > 0.0 ? param_at_length(curve, s) : 0.0);
        for (const GeometricPrimitive& obs : obstacles)
            best = std::min(best, distance_to_primitive(p, obs));
    }
    return best;
}

ConstraintReport check_constraints(const TrajectorySpec& spec, const ConstraintSet& constraints) {
    ConstraintReport report;
    report.min_clearance = min_clearance(spec.curve, constraints.obstacles, kCheckSamples);
    if (report.min_clearance < constraints.clearance_margin)
        report.violations.push_back(
            {"clearance", report.min_clearance, constraints.clearance_margin});

    if (const auto* ramp = std::get_if<TiltRamp>(&spec.orientation)) {
        if (std::abs(ramp->end) > constraints.robot.max_tilt + 1e-12)
            report.violations.push_back({"tilt", std::abs(ramp->end), constraints.robot.max_tilt});
    }

    // Reach and aperture over the sampled waypoints (tilt already reported).
    std::vector<Waypoint> wps;
    try {
        wps = sample_impl(spec, constraints, /*enforce_tilt=*/false);
    } catch (const Error&) {
        report.violations.push_back({"waypoints", 0.0, 0.0});
        report.reach_ok = false;
        return report;
    }
    const Point3 base{constraints.base_pose.position.x, constraints.base_pose.position.y, 0.0};
    double worst_reach = 0.0;
    for (const Waypoint& wp : wps)
        worst_reach = std::max(worst_reach, (wp.pose.position - base).norm());
    if (worst_reach > constraints.robot.arm_reach_radius) {
        report.reach_ok = false;
        report.violations.push_back({"reach", worst_reach, constraints.robot.arm_reach_radius});
    }
    for (const Waypoint& wp : wps) {
        if (wp.gripper.state == GripperState::width &&
            wp.gripper.width > constraints.robot.gripper_aperture_max + 1e-12) {
            report.violations.push_back(
                {"aperture", wp.gripper.width, constraints.robot.gripper_aperture_max});
            break;
        }
    }
    return report;
}

// --- serialization ----------------------------------------------------------

namespace {

json gripper_to_json(const GripperCommand& g) {
    switch (g.state) {
        case GripperState::open: return json("open");
        case GripperState::closed: return json("closed");
        case GripperState::width: return json(g.width);
    }
    return json("open");
}

GripperCommand gripper_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "open") return GripperCommand::opened();
        if (s == "closed") return GripperCommand::closed();
        throw SchemaError("gripper: expected \"open\", \"closed\", or a width");
    }
    if (j.is_number()) return GripperCommand::with_width(j.get<double>());
    throw SchemaError("gripper: expected \"open\", \"closed\", or a width");
}

}  // namespace

json curve_to_json(const Curve& c) {
    return std::visit(
        [](const auto& g) -> json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                return json{{"type", "line"}, {"start", to_json(g.start)}, {"end", to_json(g.end)}};
            } else if constexpr (std::is_same_v<T, Arc>) {
                return json{{"type", "arc"},
                            {"axis_point", to_json(g.axis_point)},
                            {"axis_dir", to_json(g.axis_dir)},
                            {"start_point", to_json(g.start_point)},
                            {"sweep", g.sweep}};
            } else if constexpr (std::is_same_v<T, CubicBezier>) {
                return json{{"type", "bezier"},
                            {"p0", to_json(g.p0)},
                            {"p1", to_json(g.p1)},
                            {"p2", to_json(g.p2)},
                            {"p3", to_json(g.p3)}};
            } else {
                json segs = json::array();
                for (const Curve& s : g.segments) segs.push_back(curve_to_json(s));
                return json{{"type", "composite"}, {"segments", segs}};
            }
        },
        c.value);
}

Curve curve_from_json(const json& j) {
    const std::string type = require_field(j, "type", "curve").get<std::string>();
    if (type == "line")
        return Curve{LineSegment{vec3_from_json(require_field(j, "start", "line"), "line.start"),
                                 vec3_from_json(require_field(j, "end", "line"), "line.end")}};
    if (type == "arc")
        return Curve{make_arc(
            vec3_from_json(require_field(j, "axis_point", "arc"), "arc.axis_point"),
            unitvec_from_json(require_field(j, "axis_dir", "arc"), "arc.axis_dir"),
            vec3_from_json(require_field(j, "start_point", "arc"), "arc.start_point"),
            require_number(j, "sweep", "arc"))};
    if (type == "bezier")
        return Curve{CubicBezier{vec3_from_json(require_field(j, "p0", "bezier"), "bezier.p0"),
                                 vec3_from_json(require_field(j, "p1", "bezier"), "bezier.p1"),
                                 vec3_from_json(require_field(j, "p2", "bezier"), "bezier.p2"),
                                 vec3_from_json(require_field(j, "p3", "bezier"), "bezier.p3")}};
    if (type == "composite") {
        const json& segs = require_field(j, "segments", "composite");
        if (!segs.is_array()) throw SchemaError("composite.segments: expected array");
        std::vector<Curve> out;
        out.reserve(segs.size());
        for (const auto& s : segs) out.push_back(curve_from_json(s));
        return Curve{make_composite(std::move(out))};
    }
    throw SchemaError("curve: unknown type '" + type + "'");
}

namespace {

json orientation_to_json(const OrientationPolicy& p) {
    return std::visit(
        [](const auto& g) -> json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, FixedOrientation>) {
                return json{{"policy", "fixed"}, {"orientation", to_json(g.orientation)}};
            } else if constexpr (std::is_same_v<T, TangentAligned>) {
                return json{{"policy", "tangent"}, {"up_hint", to_json(g.up_hint)}};
            } else if constexpr (std::is_same_v<T, RadialFacing>) {
                return json{{"policy", "radial"}};
            } else {
                return json{{"policy", "tilt_ramp"},
                            {"axis", to_json(g.axis)},
                            {"start", g.start},
                            {"end", g.end},
                            {"ramp_start", g.ramp_start}};
            }
        },
        p);
}

OrientationPolicy orientation_from_json(const json& j) {
    const std::string policy = require_field(j, "policy", "orientation").get<std::string>();
    if (policy == "fixed")
        return FixedOrientation{quat_from_json(require_field(j, "orientation", "fixed"),
                                               "orientation.fixed")};
    if (policy == "tangent")
        return TangentAligned{unitvec_from_json(require_field(j, "up_hint", "tangent"),
                                                "orientation.up_hint")};
    if (policy == "radial") return RadialFacing{};
    if (policy == "tilt_ramp")
        return TiltRamp{unitvec_from_json(require_field(j, "axis", "tilt_ramp"), "tilt_ramp.axis"),
                        require_number(j, "start", "tilt_ramp"),
                        require_number(j, "end", "tilt_ramp"),
                        require_number(j, "ramp_start", "tilt_ramp")};
    throw SchemaError("orientation: unknown policy '" + policy + "'");
}

}  // namespace

json spec_to_json(const TrajectorySpec& spec) {
    json program = json::array();
    for (const auto& [idx, cmd] : spec.gripper_program)
        program.push_back(json{{"index", idx}, {"gripper", gripper_to_json(cmd)}});
    return json{{"curve", curve_to_json(spec.curve)},
                {"orientation", orientation_to_json(spec.orientation)},
                {"waypoint_count", spec.waypoint_count},
                {"gripper_program", program}};
}

TrajectorySpec spec_from_json(const json& j) {
    TrajectorySpec spec;
    spec.curve = curve_from_json(require_field(j, "curve", "spec"));
    spec.orientation = orientation_from_json(require_field(j, "orientation", "spec"));
    spec.waypoint_count = static_cast<int>(require_number(j, "waypoint_count", "spec"));
    if (spec.waypoint_count < 2) throw SchemaError("spec.waypoint_count: must be >= 2");
    const json& program = require_field(j, "gripper_program", "spec");
    if (!program.is_array()) throw SchemaError("spec.gripper_program: expected array");
    for (const auto& e : program) {
        const int idx = static_cast<int>(require_number(e, "index", "gripper_program"));
        if (idx < 0 || idx >= spec.waypoint_count)
            throw SchemaError("spec.gripper_program: index out of range");
        spec.gripper_program.emplace_back(idx,
                                          gripper_from_json(require_field(e, "gripper",
                                                                          "gripper_program")));
    }
    return spec;
}

json waypoints_to_json(const std::vector<Waypoint>& wps) {
    json out = json::array();
    for (std::size_t i = 0; i < wps.size(); ++i)
        out.push_back(json{{"index", i},
                           {"pose", to_json(wps[i].pose)},
                           {"gripper", gripper_to_json(wps[i].gripper)},
                           {"dwell", wps[i].dwell}});
    return out;
}

std::string waypoints_to_csv(const std::vector<Waypoint>& wps) {
    std::ostringstream out;
    out << "index,x,y,z,qw,qx,qy,qz,gripper,dwell\n";
    for (std::size_t i = 0; i < wps.size(); ++i) {
        const Waypoint& w = wps[i];
        out << i << ',' << format_double(w.pose.position.x) << ','
            << format_double(w.pose.position.y) << ',' << format_double(w.pose.position.z) << ','
            << format_double(w.pose.orientation.w) << ',' << format_double(w.pose.orientation.x)
            << ',' << format_double(w.pose.orientation.y) << ','
            << format_double(w.pose.orientation.z) << ',';
        switch (w.gripper.state) {
            case GripperState::open: out << "open"; break;
            case GripperState::closed: out << "closed"; break;
            case GripperState::width: out << format_double(w.gripper.width); break;
        }
        out << ',' << format_double(w.dwell) << '\n';
    }
    return out.str();
}

}  // namespace geomcoder::traj
