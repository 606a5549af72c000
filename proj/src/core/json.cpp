#include "geomcoder/core/json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace geomcoder {

std::string format_double(double v) {
    if (v == 0.0) return "0";  // normalizes -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

void dump_rec(const json& j, std::string& out, int depth) {
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            size_t i = 0;
            for (auto it = j.cbegin(); it != j.cend(); ++it, ++i) {
                out.append(static_cast<size_t>(depth + 1) * 2, ' ');
                out += json(it.key()).dump();
                out += ": ";
                dump_rec(it.value(), out, depth + 1);
                if (i + 1 < j.size()) out += ',';
                out += '\n';
            }
            out.append(static_cast<size_t>(depth) * 2, ' ');
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Flat arrays of scalars stay on one line; nested structures wrap.
            bool scalars = true;
            for (const auto& e : j)
                if (e.is_structured()) scalars = false;
            if (scalars) {
                out += '[';
                for (size_t i = 0; i < j.size(); ++i) {
                    dump_rec(j[i], out, depth);
                    if (i + 1 < j.size()) out += ", ";
                }
                out += ']';
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < j.size(); ++i) {
                out.append(static_cast<size_t>(depth + 1) * 2, ' ');
                dump_rec(j[i], out, depth + 1);
                if (i + 1 < j.size()) out += ',';
                out += '\n';
            }
            out.append(static_cast<size_t>(depth) * 2, ' ');
            out += ']';
            return;
        }
        case json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

json vec_array(const json& j, size_t n, const std::string& what) {
    if (!j.is_array() || j.size() != n)
        throw SchemaError(what + ": expected array of " + std::to_string(n) + " numbers");
    for (const auto& e : j)
        if (!e.is_number()) throw SchemaError(what + ": expected numeric components");
    return j;
}

}  // namespace

std::string canonical_dump(const json& j) {
    std::string out;
    dump_rec(j, out, 0);
    out += '\n';
    return out;
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << canonical_dump(j);
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json to_json(const Quat& q) { return json::array({q.w, q.x, q.y, q.z}); }
json to_json(const UnitVec3& u) { return to_json(u.vec()); }
json to_json(const RigidTransform& t) {
    return json{{"rotation", to_json(t.rotation)}, {"translation", to_json(t.translation)}};
}
json to_json(const Pose& p) {
    return json{{"orientation", to_json(p.orientation)}, {"position", to_json(p.position)}};
}

Vec3 vec3_from_json(const json& j, const std::string& what) {
    const json a = vec_array(j, 3, what);
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Quat quat_from_json(const json& j, const std::string& what) {
    const json a = vec_array(j, 4, what);
    Quat q{a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>()};
    if (std::abs(q.norm() - 1.0) > 1e-6) throw SchemaError(what + ": quaternion not normalized");
    return q.normalized();
}

UnitVec3 unitvec_from_json(const json& j, const std::string& what) {
    const Vec3 v = vec3_from_json(j, what);
    if (std::abs(v.norm() - 1.0) > 1e-6) throw SchemaError(what + ": direction not unit length");
    return UnitVec3::from(v);
}

RigidTransform transform_from_json(const json& j, const std::string& what) {
    return {quat_from_json(require_field(j, "rotation", what), what + ".rotation"),
            vec3_from_json(require_field(j, "translation", what), what + ".translation")};
}

Pose pose_from_json(const json& j, const std::string& what) {
    return {vec3_from_json(require_field(j, "position", what), what + ".position"),
            quat_from_json(require_field(j, "orientation", what), what + ".orientation")};
}

const json& require_field(const json& j, const std::string& key, const std::string& what) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(what + ": missing field '" + key + "'");
    return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& what) {
    const json& f = require_field(j, key, what);
    if (!f.is_number()) throw SchemaError(what + ": field '" + key + "' must be a number");
    return f.get<double>();
}

}  // namespace geomcoder
