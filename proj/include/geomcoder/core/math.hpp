// Core math types: vectors, quaternions, rigid transforms.
// World frame is right-handed, z-up, meters; angles in radians.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace geomcoder {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    constexpr double squared_norm() const { return dot(*this); }
    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0.0, 0.0, 0.0};
    }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

using Point3 = Vec3;

// Direction with unit norm enforced at construction.
struct UnitVec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;

    constexpr UnitVec3() = default;

    // Normalizes; input must be nonzero (callers validate, see checked factories in ops).
    static UnitVec3 from(const Vec3& v) {
        const Vec3 n = v.normalized();
        UnitVec3 u;
        u.x = n.x;
        u.y = n.y;
        u.z = n.z;
        return u;
    }
    constexpr Vec3 vec() const { return {x, y, z}; }
    constexpr operator Vec3() const { return vec(); }
    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

// 3x3 matrix, column-major semantics (col(i) = basis vector i).
struct Mat3 {
    // m[r][c]
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 r;
        r.m[0][0] = c0.x; r.m[0][1] = c1.x; r.m[0][2] = c2.x;
        r.m[1][0] = c0.y; r.m[1][1] = c1.y; r.m[1][2] = c2.y;
        r.m[2][0] = c0.z; r.m[2][1] = c1.z; r.m[2][2] = c2.z;
        return r;
    }
    Vec3 col(int i) const { return {m[0][i], m[1][i], m[2][i]}; }
    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

// Unit quaternion (w, x, y, z).
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quat identity() { return {}; }

    static Quat from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 a = axis.normalized();
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return {std::cos(h), a.x * s, a.y * s, a.z * s};
    }

    // Shepperd's method.
    static Quat from_matrix(const Mat3& r) {
        const double t = r.m[0][0] + r.m[1][1] + r.m[2][2];
        Quat q;
        if (t > 0.0) {
            const double s = std::sqrt(t + 1.0) * 2.0;
            q = {0.25 * s, (r.m[2][1] - r.m[1][2]) / s, (r.m[0][2] - r.m[2][0]) / s,
                 (r.m[1][0] - r.m[0][1]) / s};
        } else if (r.m[0][0] > r.m[1][1] && r.m[0][0] > r.m[2][2]) {
            const double s = std::sqrt(1.0 + r.m[0][0] - r.m[1][1] - r.m[2][2]) * 2.0;
            q = {(r.m[2][1] - r.m[1][2]) / s, 0.25 * s, (r.m[0][1] + r.m[1][0]) / s,
                 (r.m[0][2] + r.m[2][0]) / s};
        } else if (r.m[1][1] > r.m[2][2]) {
            const double s = std::sqrt(1.0 + r.m[1][1] - r.m[0][0] - r.m[2][2]) * 2.0;
            q = {(r.m[0][2] - r.m[2][0]) / s, (r.m[0][1] + r.m[1][0]) / s, 0.25 * s,
                 (r.m[1][2] + r.m[2][1]) / s};
        } else {
            const double s = std::sqrt(1.0 + r.m[2][2] - r.m[0][0] - r.m[1][1]) * 2.0;
            q = {(r.m[1][0] - r.m[0][1]) / s, (r.m[0][2] + r.m[2][0]) / s,
                 (r.m[1][2] + r.m[2][1]) / s, 0.25 * s};
        }
        return q.normalized();
    }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quat normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    Quat conjugate() const { return {w, -x, -y, -z}; }

    // Hamilton product; (a*b).rotate(v) == a.rotate(b.rotate(v)).
    Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Vec3 rotate(const Vec3& v) const {
        // v' = v + 2 q_v x (q_v x v + w v)
        const Vec3 qv{x, y, z};
        const Vec3 t = qv.cross(v) * 2.0;
        return v + t * w + qv.cross(t);
    }

    Mat3 to_matrix() const {
        Mat3 r;
        const double xx = x * x, yy = y * y, zz = z * z;
        const double xy = x * y, xz = x * z, yz = y * z;
        const double wx = w * x, wy = w * y, wz = w * z;
        r.m[0][0] = 1 - 2 * (yy + zz); r.m[0][1] = 2 * (xy - wz);     r.m[0][2] = 2 * (xz + wy);
        r.m[1][0] = 2 * (xy + wz);     r.m[1][1] = 1 - 2 * (xx + zz); r.m[1][2] = 2 * (yz - wx);
        r.m[2][0] = 2 * (xz - wy);     r.m[2][1] = 2 * (yz + wx);     r.m[2][2] = 1 - 2 * (xx + yy);
        return r;
    }

    // Angle of rotation in [0, pi].
    double angle() const {
        const double c = std::clamp(std::abs(w), 0.0, 1.0);
        return 2.0 * std::acos(c);
    }
};

struct RigidTransform {
    Quat rotation;
    Vec3 translation;

    static RigidTransform identity() { return {}; }
    static RigidTransform translate(const Vec3& t) { return {Quat::identity(), t}; }
    static RigidTransform rotate(const Quat& q) { return {q, Vec3{}}; }

    Point3 apply(const Point3& p) const { return rotation.rotate(p) + translation; }
    Vec3 apply_dir(const Vec3& v) const { return rotation.rotate(v); }

    RigidTransform compose(const RigidTransform& inner) const {
        // (*this) applied after inner: T(p) = R_outer (R_inner p + t_inner) + t_outer
        return {(rotation * inner.rotation).normalized(), rotation.rotate(inner.translation) + translation};
    }
    RigidTransform inverse() const {
        const Quat qi = rotation.conjugate();
        return {qi, qi.rotate(-translation)};
    }
};

struct Pose {
    Point3 position;
    Quat orientation;
};

inline double clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

// Kernels rely on the tight (x, y, z) layout of Vec3 arrays.
static_assert(sizeof(Vec3) == 3 * sizeof(double), "Vec3 must be three packed doubles");

}  // namespace geomcoder
