// Plan schema (verb-object subtasks) and rule-based plan validation against
// the scene objects and the bird's-eye map.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geomcoder/core/json.hpp"
#include "geomcoder/geom/primitives.hpp"
#include "geomcoder/scene/scene.hpp"

namespace geomcoder::plan {

enum class Verb { navigate, open, close, pick, place, pour, wipe };

const char* verb_name(Verb v);
std::optional<Verb> verb_from_name(const std::string& name);

struct Subtask {
    Verb verb = Verb::navigate;
    std::vector<std::string> target_ids;
    json params = json::object();  // verb-specific keys
};

struct Plan {
    scene::Instruction instruction;
    std::vector<Subtask> subtasks;
};

struct PlanIssue {
    std::string code;  // "unresolved-object" | "missing-param" | "missing-prerequisite" | ...
    int subtask_index = -1;
    std::string message;
};

// Associates scene objects with their map labels and door/drawer roles so the
// prerequisite rules can reason over the grid.
struct ValidationContext {
    std::vector<ParamObject> objects;
    scene::BirdsEyeMap map;
    std::map<std::string, int> door_labels;  // door object id -> map label
    std::pair<int, int> start_cell{0, 0};
};

// Rule checks: target resolution, per-verb parameter schemas, door-open
// prerequisites for navigation across door cells, pick-before-place/pour.
// Issues are data; an empty list means the plan is valid.
std::vector<PlanIssue> validate_plan(const Plan& plan, const ValidationContext& ctx);

json plan_to_json(const Plan& plan);
Plan plan_from_json(const json& j);
Plan load_plan(const std::string& text);

}  // namespace geomcoder::plan
