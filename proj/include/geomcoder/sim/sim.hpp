// Deterministic kinematic execution: grid navigation, waypoint stepping with
// grasp/slip/collision rules, articulation updates, wipe coverage, and full
// plan execution with abort-on-first-failure semantics.
#pragma once

#include <map>

#include "geomcoder/plan/synthesis.hpp"
#include "geomcoder/sim/world.hpp"

namespace geomcoder::sim {

// Grasp succeeds within this distance of a graspable part's grasp point;
// door/drawer tracking slips beyond it.
inline constexpr double kGraspTolerance = 0.02;
inline constexpr double kEeSphereRadius = 0.05;

struct NavigateResult {
    std::vector<std::pair<int, int>> path;  // start cell .. goal cell
};

// Shortest 4-connected path over free cells (closed-door cells blocked,
// open-door cells free); deterministic row-major tie-break. The base teleports
// along cell centers. Throws Unreachable when no path exists.
NavigateResult navigate(const SceneWorld& world, RobotState& robot,
                        std::pair<int, int> goal_cell, const RobotProfile& profile);

// A door is passable once its opening clears the robot's passage width.
bool door_passable(const Door& door, const RobotProfile& profile);

// Cells the base may occupy given current door states.
bool nav_cell_free(const SceneWorld& world, int row, int col, const RobotProfile& profile);

std::optional<std::pair<int, int>> nearest_free_cell(const SceneWorld& world, const Point3& p,
                                                     const RobotProfile& profile);

struct StepOutcome {
    std::vector<Event> events;
};

// Move the end effector to the waypoint, apply the gripper command, drag the
// held object rigidly, update grasped articulation, emit collision events.
// `exclude_ids` are object ids not treated as obstacles (the interaction
// target and the held object).
StepOutcome step_to_waypoint(SceneWorld& world, RobotState& robot, const traj::Waypoint& wp,
                             const RobotProfile& profile,
                             const std::vector<std::string>& exclude_ids, int time_index);

// Door angle from the end effector's position around the hinge; slips when the
// grip leaves the physically feasible circle by more than kGraspTolerance.
void update_door(Door& door, const Point3& ee, bool& slip);

// Drawer extension from the axial projection of the end effector; slips on
// lateral deviation beyond kGraspTolerance.
void update_drawer(Drawer& drawer, const Point3& ee, bool& slip);

// Fraction of the stain's 1 cm grid within wipe_radius of any path point;
// monotone non-decreasing across calls.
double wipe_sweep(SceneWorld& world, const std::string& stain_id,
                  std::span<const Point3> ee_path, double wipe_radius);

struct ExecutionResult {
    std::vector<SubtaskResult> results;
    ExecutionTrace trace;
    bool long_term_success = false;
};

// Runs subtasks in order; the first failure aborts the remainder. Trajectories
// are per-subtask specs for every manipulation verb (navigate runs on the grid).
ExecutionResult execute_plan(SceneWorld& world, RobotState& robot, const plan::Plan& plan,
                             const std::map<int, traj::TrajectorySpec>& trajectories,
                             const RobotProfile& profile);

// --- whole-pipeline orchestration (validate -> synthesize -> execute) -------

struct PipelineOptions {
    double clearance_margin = 0.015;
};

struct PipelineResult {
    std::vector<plan::PlanIssue> issues;  // non-empty => nothing executed
    std::map<int, traj::TrajectorySpec> trajectories;
    std::map<int, plan::Provenance> provenance;
    ExecutionResult execution;
};

// Validates the plan, synthesizes all manipulation trajectories against a
// predicted world (each subtask's expected effect applied in order), then
// executes on the real world.
PipelineResult run_pipeline(SceneWorld& world, const plan::Plan& plan,
                            const RobotProfile& profile, plan::SkillCache& cache,
                            plan::SynthesisProvider& provider,
                            const PipelineOptions& options = {});

// Obstacles a subtask's trajectory must avoid: everything except the target,
// the held object, and stains.
std::vector<GeometricPrimitive> obstacles_for(const SceneWorld& world,
                                              const std::string& target_id,
                                              const std::optional<std::string>& held);

RobotState initial_robot_state(const SceneWorld& world);

}  // namespace geomcoder::sim
