#include "geomcoder/plan/plan.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "geomcoder/geom/ops.hpp"

namespace geomcoder::plan {

const char* verb_name(Verb v) {
    switch (v) {
        case Verb::navigate: return "navigate";
        case Verb::open: return "open";
        case Verb::close: return "close";
        case Verb::pick: return "pick";
        case Verb::place: return "place";
        case Verb::pour: return "pour";
        case Verb::wipe: return "wipe";
    }
    return "?";
}

std::optional<Verb> verb_from_name(const std::string& name) {
    for (Verb v : {Verb::navigate, Verb::open, Verb::close, Verb::pick, Verb::place, Verb::pour,
                   Verb::wipe})
        if (name == verb_name(v)) return v;
    return std::nullopt;
}

namespace {

const ParamObject* find_object(const std::vector<ParamObject>& objects, const std::string& id) {
    for (const ParamObject& o : objects)
        if (o.object_id == id) return &o;
    return nullptr;
}

bool cell_free(const scene::BirdsEyeMap& map, int row, int col,
               const std::set<int>& open_door_labels) {
    const int label = map.at(row, col);
    return label == 0 || open_door_labels.count(label) > 0;
}

// Deterministic BFS reachability on free cells; neighbor order is row-major.
bool reachable(const scene::BirdsEyeMap& map, std::pair<int, int> from, std::pair<int, int> to,
               const std::set<int>& open_door_labels) {
    if (!map.in_bounds(from.first, from.second) || !map.in_bounds(to.first, to.second))
        return false;
    if (!cell_free(map, to.first, to.second, open_door_labels)) return false;
    std::vector<char> seen(static_cast<std::size_t>(map.width) * map.height, 0);
    std::deque<std::pair<int, int>> queue{from};
    seen[static_cast<std::size_t>(from.first) * map.width + from.second] = 1;
    const int dr[4] = {-1, 0, 0, 1};
    const int dc[4] = {0, -1, 1, 0};
    while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        if (r == to.first && c == to.second) return true;
        for (int k = 0; k < 4; ++k) {
            const int nr = r + dr[k], nc = c + dc[k];
            if (!map.in_bounds(nr, nc)) continue;
            char& mark = seen[static_cast<std::size_t>(nr) * map.width + nc];
            if (mark || !cell_free(map, nr, nc, open_door_labels)) continue;
            mark = 1;
            queue.push_back({nr, nc});
        }
    }
    return false;
}

// Nearest free cell to a world point (BFS ring outward, deterministic).
std::optional<std::pair<int, int>> nearest_free_cell(const scene::BirdsEyeMap& map,
                                                     const Point3& p,
                                                     const std::set<int>& open_door_labels) {
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
        if (cell_free(map, r, c, open_door_labels)) return std::pair{r, c};
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

Point3 object_reference_point(const ParamObject& obj) {
    if (obj.functional_part)
        if (const GeometricPrimitive* p = obj.find_part(*obj.functional_part))
            return primitive_center(*p);
    return obj.parts.empty() ? Point3{} : primitive_center(obj.parts.front().second);
}

}  // namespace

std::vector<PlanIssue> validate_plan(const Plan& plan, const ValidationContext& ctx) {
    std::vector<PlanIssue> issues;
    auto issue = [&](const std::string& code, int idx, const std::string& msg) {
        issues.push_back({code, idx, msg});
    };

    if (plan.subtasks.empty()) {
        issue("empty-plan", -1, "plan has no subtasks");
        return issues;
    }
    if (plan.instruction.text.empty()) issue("empty-instruction", -1, "instruction text is empty");

    std::set<int> open_doors;  // map labels of doors opened so far
    std::optional<std::string> held;
    std::pair<int, int> current = ctx.start_cell;

    for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
        const Subtask& st = plan.subtasks[i];
        const int idx = static_cast<int>(i);

        const bool nav_to_cell = st.verb == Verb::navigate && st.params.contains("cell");
        if (st.target_ids.empty() && !nav_to_cell) {
            issue("missing-target", idx, std::string(verb_name(st.verb)) + " has no target");
            continue;
        }
        bool targets_ok = true;
        for (const std::string& id : st.target_ids) {
            if (!find_object(ctx.objects, id)) {
                issue("unresolved-object", idx, "no scene object with id '" + id + "'");
                targets_ok = false;
            }
        }
        if (!targets_ok) continue;

        switch (st.verb) {
            case Verb::navigate: {
                std::pair<int, int> goal;
                if (nav_to_cell) {
                    const json& cell = st.params.at("cell");
                    if (!cell.is_array() || cell.size() != 2) {
                        issue("missing-param", idx, "navigate cell must be [row, col]");
                        continue;
                    }
                    goal = {cell[0].get<int>(), cell[1].get<int>()};
                    if (!ctx.map.in_bounds(goal.first, goal.second)) {
                        issue("out-of-bounds", idx, "navigate cell outside the map");
                        continue;
                    }
                } else {
                    const ParamObject* obj = find_object(ctx.objects, st.target_ids.front());
                    std::set<int> all_open;
                    for (const auto& [id, label] : ctx.door_labels) all_open.insert(label);
                    const auto cell =
                        nearest_free_cell(ctx.map, object_reference_point(*obj), all_open);
                    if (!cell) {
                        issue("unreachable-goal", idx, "no free cell near '" +
                                                           st.target_ids.front() + "'");
                        continue;
                    }
                    goal = *cell;
                }
                if (reachable(ctx.map, current, goal, open_doors)) {
                    current = goal;
                    break;
                }
                // Blocked: find the closed door whose opening unblocks the route.
                bool explained = false;
                for (const auto& [door_id, label] : ctx.door_labels) {
                    if (open_doors.count(label)) continue;
                    std::set<int> with_door = open_doors;
                    with_door.insert(label);
                    if (reachable(ctx.map, current, goal, with_door)) {
                        issue("missing-prerequisite", idx, "open(" + door_id + ")");
                        explained = true;
                        break;
                    }
                }
                if (!explained) {
                    std::set<int> all_open;
                    for (const auto& [id, label] : ctx.door_labels) all_open.insert(label);
                    issue(reachable(ctx.map, current, goal, all_open) ? "missing-prerequisite"
                                                                      : "unreachable-goal",
                          idx, "goal not reachable");
                } else {
                    current = goal;  // assume the fix; report downstream issues too
                }
                break;
            }
            case Verb::open:
            case Verb::close: {
                const std::string& id = st.target_ids.front();
                const auto it = ctx.door_labels.find(id);
                if (it != ctx.door_labels.end()) {
                    if (st.verb == Verb::open) open_doors.insert(it->second);
                    else open_doors.erase(it->second);
                }
                break;
            }
            case Verb::pick: {
                held = st.target_ids.front();
                break;
            }
            case Verb::place: {
                if (!st.params.contains("destination")) {
                    issue("missing-param", idx, "place needs a destination");
                } else if (st.params.at("destination").is_string()) {
                    const std::string dest = st.params.at("destination").get<std::string>();
                    if (!find_object(ctx.objects, dest))
                        issue("unresolved-object", idx, "destination '" + dest + "' not in scene");
                }
                if (held != st.target_ids.front())
                    issue("missing-prerequisite", idx, "pick(" + st.target_ids.front() + ")");
                held.reset();
                break;
            }
            case Verb::pour: {
                if (!st.params.contains("into")) {
                    issue("missing-param", idx, "pour needs an 'into' target");
                } else {
                    const std::string into = st.params.at("into").get<std::string>();
                    if (!find_object(ctx.objects, into))
                        issue("unresolved-object", idx, "pour target '" + into + "' not in scene");
                }
                if (held != st.target_ids.front())
                    issue("missing-prerequisite", idx, "pick(" + st.target_ids.front() + ")");
                break;
            }
            case Verb::wipe: {
                if (!held) issue("missing-prerequisite", idx, "pick a wiping tool first");
                break;
            }
        }
    }
    return issues;
}

json plan_to_json(const Plan& plan) {
    json subtasks = json::array();
    for (const Subtask& st : plan.subtasks)
        subtasks.push_back(json{{"verb", verb_name(st.verb)},
                                {"targets", st.target_ids},
                                {"params", st.params}});
    return json{{"instruction", plan.instruction.text}, {"subtasks", subtasks}};
}

Plan plan_from_json(const json& j) {
    Plan plan;
    plan.instruction.text = require_field(j, "instruction", "plan").get<std::string>();
    if (plan.instruction.text.empty()) throw SchemaError("plan.instruction: must be non-empty");
    const json& subtasks = require_field(j, "subtasks", "plan");
    if (!subtasks.is_array() || subtasks.empty())
        throw SchemaError("plan.subtasks: expected non-empty array");
    for (const auto& s : subtasks) {
        Subtask st;
        const std::string verb = require_field(s, "verb", "subtask").get<std::string>();
        const auto v = verb_from_name(verb);
        if (!v) throw SchemaError("subtask.verb: unknown verb '" + verb + "'");
        st.verb = *v;
        const json& targets = require_field(s, "targets", "subtask");
        if (!targets.is_array()) throw SchemaError("subtask.targets: expected array");
        for (const auto& t : targets) st.target_ids.push_back(t.get<std::string>());
        if (s.contains("params")) {
            if (!s.at("params").is_object()) throw SchemaError("subtask.params: expected object");
            st.params = s.at("params");
        }
        plan.subtasks.push_back(std::move(st));
    }
    return plan;
}

Plan load_plan(const std::string& text) { return plan_from_json(parse_json(text, "plan")); }

}  // namespace geomcoder::plan
