// Domain error hierarchy. Every error carries a stable machine-readable code
// that the CLI maps to exit statuses (domain failures -> 1, parse/usage -> 2).
#pragma once

#include <stdexcept>
#include <string>

namespace geomcoder {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define GEOMCODER_ERROR(Name, code_str)                                    \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& msg) : Error(code_str, msg) {}    \
    }

// fitting
GEOMCODER_ERROR(DegenerateInput, "degenerate-input");
GEOMCODER_ERROR(InsufficientConsensus, "insufficient-consensus");
GEOMCODER_ERROR(AmbiguousHinge, "ambiguous-hinge");

// scene
GEOMCODER_ERROR(EmptyFrame, "empty-frame");
GEOMCODER_ERROR(DimensionMismatch, "dimension-mismatch");
GEOMCODER_ERROR(EmptyBand, "empty-band");
GEOMCODER_ERROR(LabelNotFound, "label-not-found");

// trajectory
GEOMCODER_ERROR(PolicyViolation, "policy-violation");
GEOMCODER_ERROR(DegenerateRadius, "degenerate-radius");
GEOMCODER_ERROR(SweepOutOfRange, "sweep-out-of-range");
GEOMCODER_ERROR(Infeasible, "infeasible");
GEOMCODER_ERROR(NoFeasibleCurve, "no-feasible-curve");
GEOMCODER_ERROR(EndpointInCollision, "endpoint-in-collision");
GEOMCODER_ERROR(UnreachableHover, "unreachable-hover");
GEOMCODER_ERROR(PullTooLong, "pull-too-long");
GEOMCODER_ERROR(AmbiguousNormal, "ambiguous-normal");
GEOMCODER_ERROR(InvalidCurve, "invalid-curve");

// planner
GEOMCODER_ERROR(SynthesisFailed, "synthesis-failed");
GEOMCODER_ERROR(MissingPrimitive, "missing-primitive");
GEOMCODER_ERROR(ParseError, "parse-error");
GEOMCODER_ERROR(SchemaError, "schema-error");

// sim
GEOMCODER_ERROR(Unreachable, "unreachable");

#undef GEOMCODER_ERROR

}  // namespace geomcoder
