// Synthesis routing: skill-cache lookup, template instantiation, sandbox
// validation, cache store. The built-in template synthesizer is the
// deterministic stand-in for a code-generating model; the external-process
// adapter defines where generated code would run (JSON on stdin/stdout).
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geomcoder/plan/plan.hpp"
#include "geomcoder/plan/skills.hpp"
#include "geomcoder/traj/trajectory.hpp"

namespace geomcoder::plan {

struct SynthesisOutcome {
    traj::TrajectorySpec spec;
    std::string template_id;
    json resolved_params = json::object();  // parameters the recipe actually used
};

class SynthesisProvider {
public:
    virtual ~SynthesisProvider() = default;
    // Throws MissingPrimitive / SynthesisFailed on failure. Must be
    // side-effect-free with respect to the cache.
    virtual SynthesisOutcome synthesize(const Subtask& subtask,
                                        std::span<const ParamObject> objects,
                                        const traj::ConstraintSet& constraints,
                                        const RobotProfile& robot) = 0;
};

// Deterministic recipes per verb: door/lid arcs, drawer pulls, pick/place
// lines with Bezier avoidance, pour transits, serpentine wipes.
class TemplateSynthesizer : public SynthesisProvider {
public:
    SynthesisOutcome synthesize(const Subtask& subtask, std::span<const ParamObject> objects,
                                const traj::ConstraintSet& constraints,
                                const RobotProfile& robot) override;

    // Re-runs a recipe by id with explicit parameters (cache-hit path).
    SynthesisOutcome instantiate(const std::string& template_id, const json& params,
                                 const Subtask& subtask, std::span<const ParamObject> objects,
                                 const traj::ConstraintSet& constraints,
                                 const RobotProfile& robot);
};

// Adapter for an external synthesis process: request JSON on stdin, response
// JSON {"status": "ok", "spec": ..., "template_id": ..., "params": ...} on
// stdout. Ships as the protocol boundary only.
class ExternalProcessProvider : public SynthesisProvider {
public:
    explicit ExternalProcessProvider(std::string command) : command_(std::move(command)) {}

    SynthesisOutcome synthesize(const Subtask& subtask, std::span<const ParamObject> objects,
                                const traj::ConstraintSet& constraints,
                                const RobotProfile& robot) override;

    static json encode_request(const Subtask& subtask, std::span<const ParamObject> objects,
                               const traj::ConstraintSet& constraints, const RobotProfile& robot);
    static SynthesisOutcome decode_response(const json& j);

private:
    std::string command_;
};

struct ValidationDecision {
    bool accepted = true;
    std::vector<std::string> reasons;  // names of failed checks
};

// Wraps check_constraints; pure. Rejects on any violation.
ValidationDecision validate_generated(const traj::TrajectorySpec& spec,
                                      const traj::ConstraintSet& constraints);

enum class Provenance { cached, generated };

struct SynthesisResult {
    traj::TrajectorySpec spec;
    Provenance provenance = Provenance::generated;
    std::string template_id;
};

// Cache lookup -> (instantiate | provider with one retry) -> validation ->
// cache store. Every returned spec has passed validate_generated.
SynthesisResult synthesize_subtask(const Subtask& subtask, std::span<const ParamObject> objects,
                                   const traj::ConstraintSet& constraints,
                                   const RobotProfile& robot, SkillCache& cache,
                                   SynthesisProvider& provider);

json constraints_to_json(const traj::ConstraintSet& constraints);
traj::ConstraintSet constraints_from_json(const json& j);

}  // namespace geomcoder::plan
