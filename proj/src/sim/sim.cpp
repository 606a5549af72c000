#include "geomcoder/sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "geomcoder/geom/ops.hpp"

namespace geomcoder::sim {

namespace {

RigidTransform pose_transform(const Pose& p) { return {p.orientation, p.position - Point3{}}; }

RigidTransform delta_transform(const Pose& from, const Pose& to) {
    return pose_transform(to).compose(pose_transform(from).inverse());
}

// Signed angle from a to b about axis n (all perpendicular to n).
double signed_angle(const Vec3& a, const Vec3& b, const Vec3& n) {
    return std::atan2(n.dot(a.cross(b)), a.dot(b));
}

struct GraspCandidate {
    std::string id;
    Point3 point;
    double dimension;
};

std::vector<GraspCandidate> grasp_candidates(const SceneWorld& world) {
    std::vector<GraspCandidate> out;
    for (const Door& d : world.doors)
        out.push_back({d.id, d.handle_grasp_at(d.angle), 2.0 * d.handle.radius});
    for (const Drawer& d : world.drawers)
        out.push_back({d.id, d.handle_grasp_at(d.extension), 2.0 * d.handle.radius});
    for (const FreeObject& f : world.free_objects)
        out.push_back({f.id, primitive_center(f.primitive), grasp_dimension(f.primitive)});
    return out;
}

}  // namespace

bool door_passable(const Door& door, const RobotProfile& profile) {
    try {
        return door.angle >= traj::required_sweep(door.panel_width(), profile.passage_width) - 1e-9;
    } catch (const Error&) {
        return false;  // passage wider than the panel can ever clear
    }
}

bool nav_cell_free(const SceneWorld& world, int row, int col, const RobotProfile& profile) {
    const int label = world.map.at(row, col);
    if (label == 0) return true;
    for (const Door& d : world.doors)
        if (d.map_label == label) return door_passable(d, profile);
    return false;
}

std::optional<std::pair<int, int>> nearest_free_cell(const SceneWorld& world, const Point3& p,
                                                     const RobotProfile& profile) {
    const auto& map = world.map;
    auto [row, col] = map.cell_of(p.x, p.y);
    row = std::clamp(row, 0, map.height - 1);
    col = std::clamp(col, 0, map.width - 1);
    std::vector<char> seen(static_cast<std::size_t>(map.width) * map.height, 0);
    std::deque<std::pair<int, int>> queue{{row, col}};
    seen[static_cast<std::size_t>(row) * map.width + col] = 1;
    const int dr[4] = {-1, 0, 0, 1};
    const int dc[4] = {0, -1, 1, 0};
    while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        if (nav_cell_free(world, r, c, profile)) return std::pair{r, c};
        for (int k = 0; k < 4; ++k) {
            const int nr = r + dr[k], nc = c + dc[k];
            if (!map.in_bounds(nr, nc)) continue;
            char& mark = seen[static_cast<std::size_t>(nr) * map.width + nc];
            if (mark) continue;
            mark = 1;
            queue.push_back({nr, nc});
        }
    }
    return std::nullopt;
}

NavigateResult navigate(const SceneWorld& world, RobotState& robot,
                        std::pair<int, int> goal_cell, const RobotProfile& profile) {
    const auto& map = world.map;
    if (!map.in_bounds(goal_cell.first, goal_cell.second))
        throw Unreachable("navigate: goal cell outside the map");
    auto [row, col] = map.cell_of(robot.base_x, robot.base_y);
    row = std::clamp(row, 0, map.height - 1);
    col = std::clamp(col, 0, map.width - 1);
    const std::pair<int, int> start{row, col};

    if (!nav_cell_free(world, goal_cell.first, goal_cell.second, profile) && start != goal_cell)
        throw Unreachable("navigate: goal cell is blocked");

    const std::size_t cells = static_cast<std::size_t>(map.width) * map.height;
    std::vector<int> parent(cells, -2);  // -2 unvisited, -1 start
    auto index = [&](std::pair<int, int> c) {
        return static_cast<std::size_t>(c.first) * map.width + c.second;
    };
    std::deque<std::pair<int, int>> queue{start};
    parent[index(start)] = -1;
    const int dr[4] = {-1, 0, 0, 1};
    const int dc[4] = {0, -1, 1, 0};
    bool found = start == goal_cell;
    while (!queue.empty() && !found) {
        const auto cell = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            const std::pair<int, int> next{cell.first + dr[k], cell.second + dc[k]};
            if (!map.in_bounds(next.first, next.second)) continue;
            if (parent[index(next)] != -2) continue;
            if (!nav_cell_free(world, next.first, next.second, profile)) continue;
            parent[index(next)] = static_cast<int>(index(cell));
            if (next == goal_cell) {
                found = true;
                break;
            }
            queue.push_back(next);
        }
    }
    if (!found) throw Unreachable("navigate: no path to goal");

    std::vector<std::pair<int, int>> path;
    for (std::pair<int, int> c = goal_cell;;) {
        path.push_back(c);
        const int p = parent[index(c)];
        if (p < 0) break;
        c = {p / map.width, p % map.width};
    }
    std::reverse(path.begin(), path.end());

    const Point3 old_base = robot.base_lifted();
    const Point3 target = map.cell_center(goal_cell.first, goal_cell.second);
    robot.base_x = target.x;
    robot.base_y = target.y;
    if (path.size() >= 2) {
        const auto& a = path[path.size() - 2];
        const auto& b = path.back();
        robot.heading = std::atan2(static_cast<double>(b.first - a.first),
                                   static_cast<double>(b.second - a.second));
    }
    // The arm (and anything it holds) rides along with the base.
    const Vec3 shift = robot.base_lifted() - old_base;
    robot.ee_pose.position += shift;
    return {path};
}

void update_door(Door& door, const Point3& ee, bool& slip) {
    const double expected_r = door.handle_orbit();
    const Vec3 axis = door.hinge.direction.vec();
    const Vec3 rel = ee - door.hinge.point;
    const Vec3 radial = rel - axis * axis.dot(rel);
    slip = std::abs(radial.norm() - expected_r) > kGraspTolerance;
    if (slip) return;

    const Point3 closed = door.handle_grasp_at(0.0);
    const Vec3 rel0 = closed - door.hinge.point;
    const Vec3 radial0 = rel0 - axis * axis.dot(rel0);
    const double angle = signed_angle(radial0, radial, axis);
    door.angle = std::clamp(angle, door.hinge.swing_range[0], door.hinge.swing_range[1]);
}

void update_drawer(Drawer& drawer, const Point3& ee, bool& slip) {
    const Point3 closed_grasp = drawer.handle_grasp_at(0.0);
    const Vec3 rel = ee - closed_grasp;
    const double t = rel.dot(drawer.axis.vec());
    const double lateral = (rel - drawer.axis.vec() * t).norm();
    slip = lateral > kGraspTolerance;
    if (slip) return;
    drawer.extension = std::clamp(t, 0.0, drawer.max_extension);
}

std::vector<GeometricPrimitive> obstacles_for(const SceneWorld& world,
                                              const std::string& target_id,
                                              const std::optional<std::string>& held) {
    std::vector<GeometricPrimitive> out = world.static_obstacles;
    for (const Door& d : world.doors) {
        if (d.id == target_id) continue;
        out.push_back(d.panel_at(d.angle));
        out.push_back(d.handle_at(d.angle));
    }
    for (const Drawer& d : world.drawers) {
        if (d.id == target_id) continue;
        out.push_back(d.body_at(d.extension));
        out.push_back(d.handle_at(d.extension));
    }
    for (const FreeObject& f : world.free_objects) {
        if (f.id == target_id || (held && f.id == *held)) continue;
        out.push_back(f.primitive);
    }
    return out;
}

StepOutcome step_to_waypoint(SceneWorld& world, RobotState& robot, const traj::Waypoint& wp,
                             const RobotProfile& profile,
                             const std::vector<std::string>& exclude_ids, int time_index) {
    StepOutcome out;
    const double reach = (wp.pose.position - robot.base_lifted()).norm();
    if (reach > profile.arm_reach_radius) {
        out.events.push_back({time_index, "reach-violation",
                              "waypoint beyond arm reach", reach});
        return out;  // the arm refuses the motion
    }

    const Pose old_pose = robot.ee_pose;
    robot.ee_pose = wp.pose;
    const RigidTransform delta = delta_transform(old_pose, wp.pose);

    if (robot.held) {
        if (FreeObject* obj = world.find_object(*robot.held)) {
            obj->primitive = transform_primitive(obj->primitive, delta);
        } else if (Door* door = world.find_door(*robot.held)) {
            bool slip = false;
            update_door(*door, robot.ee_pose.position, slip);
            if (slip) {
                out.events.push_back({time_index, "slip", "grip left the hinge circle: " + door->id,
                                      0.0});
                robot.held.reset();
            }
        } else if (Drawer* drawer = world.find_drawer(*robot.held)) {
            bool slip = false;
            update_drawer(*drawer, robot.ee_pose.position, slip);
            if (slip) {
                out.events.push_back({time_index, "slip",
                                      "grip left the slide axis: " + drawer->id, 0.0});
                robot.held.reset();
            }
        }
    }

    // Gripper transitions after the motion: close grasps, open releases.
    const bool was_closed = robot.gripper.state == traj::GripperState::closed;
    const bool now_closed = wp.gripper.state == traj::GripperState::closed;
    if (now_closed && !was_closed && !robot.held) {
        const GraspCandidate* best = nullptr;
        double best_d = kGraspTolerance;
        const std::vector<GraspCandidate> candidates = grasp_candidates(world);
        for (const GraspCandidate& c : candidates) {
            const double d = (c.point - robot.ee_pose.position).norm();
            if (d <= best_d && c.dimension <= profile.gripper_aperture_max) {
                best_d = d;
                best = &c;
            }
        }
        if (best) {
            robot.held = best->id;
            out.events.push_back({time_index, "grasp", best->id, best_d});
        } else {
            out.events.push_back({time_index, "grasp-miss", "no graspable part in range",
                                  kGraspTolerance});
        }
    } else if (!now_closed && was_closed && robot.held) {
        out.events.push_back({time_index, "release", *robot.held, 0.0});
        robot.held.reset();
    }
    robot.gripper = wp.gripper;

    // Collision telemetry: base and end-effector spheres against the scene.
    const Sphere base_sphere{Point3{robot.base_x, robot.base_y, profile.base_footprint_radius},
                             profile.base_footprint_radius};
    const Sphere ee_sphere{robot.ee_pose.position, kEeSphereRadius};
    auto excluded = [&](const std::string& id) {
        if (robot.held && id == *robot.held) return true;
        return std::find(exclude_ids.begin(), exclude_ids.end(), id) != exclude_ids.end();
    };
    auto check = [&](const GeometricPrimitive& prim, const std::string& what) {
        const double c = std::min(primitive_clearance(GeometricPrimitive{base_sphere}, prim),
                                  primitive_clearance(GeometricPrimitive{ee_sphere}, prim));
        if (c < 0.0) out.events.push_back({time_index, "collision", what, c});
    };
    for (std::size_t i = 0; i < world.static_obstacles.size(); ++i)
        check(world.static_obstacles[i], "static-" + std::to_string(i));
    for (const Door& d : world.doors)
        if (!excluded(d.id)) {
            check(d.panel_at(d.angle), d.id);
            check(d.handle_at(d.angle), d.id);
        }
    for (const Drawer& d : world.drawers)
        if (!excluded(d.id)) {
            check(d.body_at(d.extension), d.id);
            check(d.handle_at(d.extension), d.id);
        }
    for (const FreeObject& f : world.free_objects)
        if (!excluded(f.id)) check(f.primitive, f.id);
    return out;
}

double wipe_sweep(SceneWorld& world, const std::string& stain_id,
                  std::span<const Point3> ee_path, double wipe_radius) {
    Stain* stain = world.find_stain(stain_id);
    if (!stain) throw Unreachable("wipe_sweep: no stain '" + stain_id + "'");

    const Mat3 r = stain->patch.orientation.to_matrix();
    const std::array<double, 3> he{stain->patch.half_extents.x, stain->patch.half_extents.y,
                                   stain->patch.half_extents.z};
    int k_n = 0;
    for (int k = 1; k < 3; ++k)
        if (he[k] < he[k_n]) k_n = k;
    const int k_u = (k_n + 1) % 3, k_v = (k_n + 2) % 3;
    const Vec3 u = r.col(k_u), v = r.col(k_v);
    const Vec3 n = r.col(k_n).z >= 0.0 ? r.col(k_n) : -r.col(k_n);
    const Point3 top = stain->patch.center + n * he[k_n];

    constexpr double kGrid = 0.01;
    if (stain->covered.empty()) {
        stain->grid_cols = std::max(1, static_cast<int>(std::ceil(2.0 * he[k_u] / kGrid)));
        stain->grid_rows = std::max(1, static_cast<int>(std::ceil(2.0 * he[k_v] / kGrid)));
        stain->covered.assign(static_cast<std::size_t>(stain->grid_rows) * stain->grid_cols, 0);
    }
    const double du = 2.0 * he[k_u] / stain->grid_cols;
    const double dv = 2.0 * he[k_v] / stain->grid_rows;
    const double r2 = wipe_radius * wipe_radius;
    for (int i = 0; i < stain->grid_rows; ++i) {
        for (int jcol = 0; jcol < stain->grid_cols; ++jcol) {
            std::uint8_t& cell = stain->covered[static_cast<std::size_t>(i) * stain->grid_cols +
                                                jcol];
            if (cell) continue;
            const Point3 center = top + u * (-he[k_u] + (jcol + 0.5) * du) +
                                  v * (-he[k_v] + (i + 0.5) * dv);
            for (const Point3& p : ee_path) {
                if ((p - center).squared_norm() <= r2) {
                    cell = 1;
                    break;
                }
            }
        }
    }
    std::size_t covered = 0;
    for (std::uint8_t c : stain->covered) covered += c;
    stain->coverage = static_cast<double>(covered) / static_cast<double>(stain->covered.size());
    return stain->coverage;
}

namespace {

Point3 place_landing(const SceneWorld& world, const plan::Subtask& st) {
    if (!st.params.contains("destination")) throw SchemaError("place: missing param 'destination'");
    const json& dest = st.params.at("destination");
    Point3 support;
    if (dest.is_string()) {
        const std::string id = dest.get<std::string>();
        if (const FreeObject* f = world.find_object(id)) {
            support = traj::opening_of(f->primitive).center;
        } else if (const Drawer* d = world.find_drawer(id)) {
            support = traj::opening_of(GeometricPrimitive{d->body_at(d->extension)}).center;
        } else if (const Door* door = world.find_door(id)) {
            support = traj::opening_of(GeometricPrimitive{door->panel_at(door->angle)}).center;
        } else {
            throw SchemaError("place: destination '" + id + "' not in scene");
        }
    } else {
        support = vec3_from_json(dest, "place.destination");
    }
    return support;
}

struct SubtaskRun {
    SubtaskResult result;
    int waypoints_executed = 0;
};

}  // namespace

ExecutionResult execute_plan(SceneWorld& world, RobotState& robot, const plan::Plan& plan,
                             const std::map<int, traj::TrajectorySpec>& trajectories,
                             const RobotProfile& profile) {
    ExecutionResult out;
    out.trace.world_snapshots.push_back(world_to_json(world));
    int time_index = 0;

    for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
        const plan::Subtask& st = plan.subtasks[i];
        SubtaskResult res;
        res.subtask_index = static_cast<int>(i);

        auto fail = [&](const std::string& reason) {
            res.success = false;
            res.failure_reason = reason;
        };

        if (st.verb == plan::Verb::navigate) {
            std::pair<int, int> goal;
            bool goal_ok = true;
            if (st.params.contains("cell")) {
                goal = {st.params.at("cell")[0].get<int>(), st.params.at("cell")[1].get<int>()};
            } else {
                Point3 ref{};
                if (const FreeObject* f = world.find_object(st.target_ids.front()))
                    ref = primitive_center(f->primitive);
                else if (const Door* d = world.find_door(st.target_ids.front()))
                    ref = d->handle_grasp_at(d->angle);
                else if (const Drawer* d = world.find_drawer(st.target_ids.front()))
                    ref = d->handle_grasp_at(d->extension);
                else if (const Stain* s = world.find_stain(st.target_ids.front()))
                    ref = primitive_center(GeometricPrimitive{s->patch});
                else {
                    fail("navigate target not found");
                    goal_ok = false;
                }
                if (goal_ok) {
                    const auto cell = nearest_free_cell(world, ref, profile);
                    if (!cell) {
                        fail("no free cell near target");
                        goal_ok = false;
                    } else {
                        goal = *cell;
                    }
                }
            }
            if (goal_ok) {
                try {
                    const Point3 old_ee = robot.ee_pose.position;
                    const NavigateResult nav = navigate(world, robot, goal, profile);
                    // carried objects ride along with the base
                    if (robot.held)
                        if (FreeObject* held = world.find_object(*robot.held))
                            held->primitive = transform_primitive(
                                held->primitive,
                                RigidTransform::translate(robot.ee_pose.position - old_ee));
                    for (std::size_t k = 0; k < nav.path.size(); ++k)
                        out.trace.steps.push_back(
                            {time_index++, static_cast<int>(i), static_cast<int>(k), robot});
                    const auto cell = world.map.cell_of(robot.base_x, robot.base_y);
                    res.success = cell == goal;
                    if (!res.success) res.failure_reason = "base not in goal cell";
                } catch (const Error& e) {
                    fail(e.what());
                }
            }
        } else {
            const auto traj_it = trajectories.find(static_cast<int>(i));
            if (traj_it == trajectories.end()) {
                fail("no trajectory synthesized for subtask");
            } else {
                const traj::TrajectorySpec& spec = traj_it->second;
                traj::ConstraintSet sampling;
                sampling.robot = profile;
                sampling.base_pose = Pose{robot.base_lifted(), Quat::identity()};
                std::vector<traj::Waypoint> wps;
                try {
                    wps = traj::sample_waypoints(spec, sampling);
                } catch (const Error& e) {
                    fail(e.what());
                    wps.clear();
                }

                if (res.failure_reason.empty()) {
                    const std::string& target = st.target_ids.front();
                    std::vector<std::string> exclude{target};
                    if (robot.held) exclude.push_back(*robot.held);
                    if (st.verb == plan::Verb::pour && st.params.contains("into"))
                        exclude.push_back(st.params.at("into").get<std::string>());

                    // Pour bookkeeping: the vessel mouth as a material point.
                    Vec3 mouth_local{};
                    bool track_mouth = false;
                    if (st.verb == plan::Verb::pour) {
                        if (const FreeObject* vessel = world.find_object(target)) {
                            const Point3 mouth = traj::opening_of(vessel->primitive).center;
                            mouth_local = robot.ee_pose.orientation.conjugate().rotate(
                                mouth - robot.ee_pose.position);
                            track_mouth = true;
                        }
                    }

                    std::vector<Point3> dense_path;
                    bool reach_failed = false;
                    for (std::size_t w = 0; w < wps.size() && !reach_failed; ++w) {
                        if (st.verb == plan::Verb::wipe && w > 0) {
                            // densify for coverage accounting
                            const Point3 a = wps[w - 1].pose.position;
                            const Point3 b = wps[w].pose.position;
                            const int steps =
                                std::max(1, static_cast<int>(std::ceil((b - a).norm() / 0.01)));
                            for (int q = 1; q <= steps; ++q)
                                dense_path.push_back(a + (b - a) * (static_cast<double>(q) / steps));
                        } else if (st.verb == plan::Verb::wipe) {
                            dense_path.push_back(wps[w].pose.position);
                        }
                        const StepOutcome step =
                            step_to_waypoint(world, robot, wps[w], profile, exclude, time_index);
                        for (const Event& e : step.events) {
                            res.events.push_back(e);
                            if (e.kind == "reach-violation") reach_failed = true;
                        }
                        out.trace.steps.push_back(
                            {time_index++, static_cast<int>(i), static_cast<int>(w), robot});
                    }

                    if (reach_failed) {
                        fail("reach-violation");
                    } else {
                        switch (st.verb) {
                            case plan::Verb::open: {
                                if (const Door* d = world.find_door(target)) {
                                    try {
                                        const double required = traj::required_sweep(
                                            d->panel_width(), profile.passage_width);
                                        res.success = d->angle >= required - 1e-9;
                                        if (!res.success)
                                            res.failure_reason =
                                                "door angle " + std::to_string(d->angle) +
                                                " below required sweep " + std::to_string(required);
                                    } catch (const Error& e) {
                                        fail(e.what());
                                    }
                                } else if (const Drawer* dr = world.find_drawer(target)) {
                                    const double requested =
                                        st.params.contains("pull_distance")
                                            ? st.params.at("pull_distance").get<double>()
                                            : arc_length(spec.curve);
                                    res.success = dr->extension >= requested - 1e-6;
                                    if (!res.success)
                                        res.failure_reason =
                                            "drawer extension " + std::to_string(dr->extension) +
                                            " below requested " + std::to_string(requested);
                                } else {
                                    fail("open target is neither a door nor a drawer");
                                }
                                break;
                            }
                            case plan::Verb::close: {
                                if (const Door* d = world.find_door(target)) {
                                    res.success = d->angle <= 0.05;
                                    if (!res.success) res.failure_reason = "door still open";
                                } else if (const Drawer* dr = world.find_drawer(target)) {
                                    res.success = dr->extension <= 0.01;
                                    if (!res.success) res.failure_reason = "drawer still extended";
                                } else {
                                    fail("close target is neither a door nor a drawer");
                                }
                                break;
                            }
                            case plan::Verb::pick: {
                                res.success = robot.held == target;
                                if (!res.success) res.failure_reason = "target not grasped";
                                break;
                            }
                            case plan::Verb::place: {
                                const FreeObject* obj = world.find_object(target);
                                if (!obj) {
                                    fail("place target not found");
                                    break;
                                }
                                const Point3 support = place_landing(world, st);
                                const Point3 expected =
                                    support +
                                    Vec3{0, 0, 0.5 * traj::vertical_extent(obj->primitive)};
                                const double miss =
                                    (primitive_center(obj->primitive) - expected).norm();
                                double clearance = std::numeric_limits<double>::infinity();
                                for (const GeometricPrimitive& obs :
                                     obstacles_for(world, target, robot.held))
                                    clearance = std::min(
                                        clearance, primitive_clearance(obj->primitive, obs));
                                const bool released = !robot.held || *robot.held != target;
                                res.success = miss <= 0.03 && clearance >= -1e-6 && released;
                                if (!res.success)
                                    res.failure_reason =
                                        "placement miss " + std::to_string(miss) + ", clearance " +
                                        std::to_string(clearance);
                                break;
                            }
                            case plan::Verb::pour: {
                                const auto* ramp = std::get_if<traj::TiltRamp>(&spec.orientation);
                                if (!ramp) {
                                    fail("pour trajectory has no tilt policy");
                                    break;
                                }
                                const double tilt = robot.ee_pose.orientation.angle();
                                if (tilt < std::abs(ramp->end) - 1e-6) {
                                    fail("tilt " + std::to_string(tilt) + " below " +
                                         std::to_string(std::abs(ramp->end)));
                                    break;
                                }
                                if (robot.held != target) {
                                    fail("vessel dropped before pouring");
                                    break;
                                }
                                if (!track_mouth || !st.params.contains("into")) {
                                    fail("pour target unavailable");
                                    break;
                                }
                                const std::string into = st.params.at("into").get<std::string>();
                                const FreeObject* container = world.find_object(into);
                                if (!container) {
                                    fail("pour container not found");
                                    break;
                                }
                                const traj::Opening target_opening =
                                    traj::opening_of(container->primitive);
                                const Point3 mouth =
                                    robot.ee_pose.position +
                                    robot.ee_pose.orientation.rotate(mouth_local);
                                const double off = std::hypot(mouth.x - target_opening.center.x,
                                                              mouth.y - target_opening.center.y);
                                res.success = off <= target_opening.radius + 1e-6;
                                if (!res.success)
                                    res.failure_reason = "vessel mouth " + std::to_string(off) +
                                                         " outside opening radius " +
                                                         std::to_string(target_opening.radius);
                                break;
                            }
                            case plan::Verb::wipe: {
                                if (!robot.held) {
                                    fail("not holding a wiping tool");
                                    break;
                                }
                                const double radius = st.params.contains("wipe_radius")
                                                          ? st.params.at("wipe_radius").get<double>()
                                                          : 0.05;
                                const double coverage =
                                    wipe_sweep(world, target, dense_path, radius);
                                res.success = coverage >= 0.9;
                                if (!res.success)
                                    res.failure_reason = "coverage " + std::to_string(coverage);
                                break;
                            }
                            default:
                                fail("unsupported verb in executor");
                        }
                    }
                }
            }
        }

        out.results.push_back(res);
        out.trace.world_snapshots.push_back(world_to_json(world));
        if (!res.success) break;
    }

    out.long_term_success = out.results.size() == plan.subtasks.size() &&
                            std::all_of(out.results.begin(), out.results.end(),
                                        [](const SubtaskResult& r) { return r.success; });
    out.trace.long_term_success = out.long_term_success;
    return out;
}

RobotState initial_robot_state(const SceneWorld& world) {
    RobotState r;
    r.base_x = world.robot_start_x;
    r.base_y = world.robot_start_y;
    r.heading = world.robot_start_heading;
    r.ee_pose = Pose{Point3{world.robot_start_x, world.robot_start_y, 0.6}, Quat::identity()};
    return r;
}

PipelineResult run_pipeline(SceneWorld& world, const plan::Plan& plan,
                            const RobotProfile& profile, plan::SkillCache& cache,
                            plan::SynthesisProvider& provider, const PipelineOptions& options) {
    PipelineResult out;
    RobotState robot = initial_robot_state(world);

    plan::ValidationContext ctx;
    ctx.objects = world.param_objects();
    ctx.map = world.map;
    ctx.door_labels = world.door_labels();
    {
        auto [row, col] = world.map.cell_of(robot.base_x, robot.base_y);
        ctx.start_cell = {std::clamp(row, 0, world.map.height - 1),
                          std::clamp(col, 0, world.map.width - 1)};
    }
    out.issues = plan::validate_plan(plan, ctx);
    if (!out.issues.empty()) return out;

    // Synthesis pass against a predicted world: each subtask's expected effect
    // is applied before synthesizing the next one.
    SceneWorld predicted = world;
    RobotState predicted_robot = robot;
    for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
        const plan::Subtask& st = plan.subtasks[i];
        if (st.verb == plan::Verb::navigate) {
            std::pair<int, int> goal{};
            if (st.params.contains("cell")) {
                goal = {st.params.at("cell")[0].get<int>(), st.params.at("cell")[1].get<int>()};
            } else {
                Point3 ref{};
                if (const FreeObject* f = predicted.find_object(st.target_ids.front()))
                    ref = primitive_center(f->primitive);
                else if (const Door* d = predicted.find_door(st.target_ids.front()))
                    ref = d->handle_grasp_at(d->angle);
                else if (const Drawer* d = predicted.find_drawer(st.target_ids.front()))
                    ref = d->handle_grasp_at(d->extension);
                else if (const Stain* s = predicted.find_stain(st.target_ids.front()))
                    ref = primitive_center(GeometricPrimitive{s->patch});
                const auto cell = nearest_free_cell(predicted, ref, profile);
                if (cell) goal = *cell;
            }
            try {
                const Point3 old_ee = predicted_robot.ee_pose.position;
                navigate(predicted, predicted_robot, goal, profile);
                if (predicted_robot.held)
                    if (FreeObject* held = predicted.find_object(*predicted_robot.held))
                        held->primitive = transform_primitive(
                            held->primitive, RigidTransform::translate(
                                                 predicted_robot.ee_pose.position - old_ee));
            } catch (const Error&) {
                // leave the predicted base; execution will report the failure
            }
            continue;
        }

        traj::ConstraintSet constraints;
        constraints.clearance_margin = options.clearance_margin;
        constraints.obstacles = obstacles_for(predicted, st.target_ids.front(),
                                              predicted_robot.held);
        constraints.robot = profile;
        constraints.base_pose = Pose{predicted_robot.base_lifted(), Quat::identity()};

        const plan::SynthesisResult synth = plan::synthesize_subtask(
            st, predicted.param_objects(), constraints, profile, cache, provider);
        out.trajectories[static_cast<int>(i)] = synth.spec;
        out.provenance[static_cast<int>(i)] = synth.provenance;

        // Apply the expected effect so later subtasks see the posed scene. Held
        // objects are dragged by the net end-effector motion, mirroring the
        // executor's rigid-attachment rule.
        const Point3 curve_end = eval_curve(synth.spec.curve, 1.0);
        if (predicted_robot.held && st.verb != plan::Verb::place)
            if (FreeObject* held = predicted.find_object(*predicted_robot.held))
                held->primitive = transform_primitive(
                    held->primitive,
                    RigidTransform::translate(curve_end - predicted_robot.ee_pose.position));
        switch (st.verb) {
            case plan::Verb::open: {
                if (Door* d = predicted.find_door(st.target_ids.front())) {
                    double sweep = kPi / 2;
                    if (const auto* arc = std::get_if<traj::Arc>(&synth.spec.curve.value))
                        sweep = std::abs(arc->sweep);
                    d->angle = std::clamp(sweep, d->hinge.swing_range[0], d->hinge.swing_range[1]);
                } else if (Drawer* dr = predicted.find_drawer(st.target_ids.front())) {
                    dr->extension =
                        std::clamp(arc_length(synth.spec.curve), 0.0, dr->max_extension);
                }
                break;
            }
            case plan::Verb::close: {
                if (Door* d = predicted.find_door(st.target_ids.front())) d->angle = 0.0;
                else if (Drawer* dr = predicted.find_drawer(st.target_ids.front()))
                    dr->extension = 0.0;
                break;
            }
            case plan::Verb::pick: {
                predicted_robot.held = st.target_ids.front();
                break;
            }
            case plan::Verb::place: {
                if (FreeObject* obj = predicted.find_object(st.target_ids.front())) {
                    const Point3 support = place_landing(predicted, st);
                    const Point3 target =
                        support + Vec3{0, 0, 0.5 * traj::vertical_extent(obj->primitive)};
                    const Vec3 shift = target - primitive_center(obj->primitive);
                    obj->primitive =
                        transform_primitive(obj->primitive, RigidTransform::translate(shift));
                }
                predicted_robot.held.reset();
                break;
            }
            default:
                break;
        }
        predicted_robot.ee_pose.position = curve_end;
    }

    out.execution = execute_plan(world, robot, plan, out.trajectories, profile);
    return out;
}

}  // namespace geomcoder::sim
