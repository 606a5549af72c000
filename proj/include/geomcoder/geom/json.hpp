// Tagged-union JSON for primitives: {"kind": "sphere"|"cylinder"|"cuboid"|
// "plane"|"hinge"|"envelope", ...fields}. Lengths in meters, angles in radians.
#pragma once

#include "geomcoder/core/json.hpp"
#include "geomcoder/geom/primitives.hpp"

namespace geomcoder {

json primitive_to_json(const GeometricPrimitive& prim);
GeometricPrimitive primitive_from_json(const json& j);

json param_object_to_json(const ParamObject& obj);
ParamObject param_object_from_json(const json& j);

json robot_profile_to_json(const RobotProfile& p);
RobotProfile robot_profile_from_json(const json& j);

}  // namespace geomcoder
