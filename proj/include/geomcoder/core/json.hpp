// Canonical JSON: sorted keys (nlohmann's default object ordering) and fixed
// floating-point formatting at 9 significant digits, so identical values always
// serialize to identical bytes. Every artifact file format goes through
// canonical_dump; parsing uses nlohmann directly.
#pragma once

#include <json.hpp>

#include <string>

#include "geomcoder/core/error.hpp"
#include "geomcoder/core/math.hpp"

namespace geomcoder {

using json = nlohmann::json;

std::string format_double(double v);

// Deterministic serialization: 2-space indent, sorted keys, %.9g floats.
std::string canonical_dump(const json& j);

json parse_json(const std::string& text, const std::string& what);
json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

// math type serialization: points/vectors as [x,y,z], quaternions as [w,x,y,z]
json to_json(const Vec3& v);
json to_json(const Quat& q);
json to_json(const UnitVec3& u);
json to_json(const RigidTransform& t);
json to_json(const Pose& p);

Vec3 vec3_from_json(const json& j, const std::string& what);
Quat quat_from_json(const json& j, const std::string& what);
UnitVec3 unitvec_from_json(const json& j, const std::string& what);
RigidTransform transform_from_json(const json& j, const std::string& what);
Pose pose_from_json(const json& j, const std::string& what);

// Field access that reports the offending key on failure.
const json& require_field(const json& j, const std::string& key, const std::string& what);
double require_number(const json& j, const std::string& key, const std::string& what);

}  // namespace geomcoder
