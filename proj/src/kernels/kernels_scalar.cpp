// Scalar reference kernels. These define the semantics the SIMD variants are
// equivalence-tested against.
#include <algorithm>
#include <cmath>

#include "geomcoder/kernels/kernels.hpp"

namespace geomcoder::kernels::scalar {

Vec3 sum_points(std::span<const Vec3> pts) {
    Vec3 s{};
    for (const Vec3& p : pts) s += p;
    return s;
}

void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]) {
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    for (const Vec3& p : pts) {
        const double dx = p.x - mean.x, dy = p.y - mean.y, dz = p.z - mean.z;
        xx += dx * dx;
        xy += dx * dy;
        xz += dx * dz;
        yy += dy * dy;
        yz += dy * dz;
        zz += dz * dz;
    }
    out[0] = xx; out[1] = xy; out[2] = xz; out[3] = yy; out[4] = yz; out[5] = zz;
}

std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& center, double radius,
                                 double tol) {
    std::size_t n = 0;
    for (const Vec3& p : pts) {
        const double d = (p - center).norm() - radius;
        if (std::abs(d) <= tol) ++n;
    }
    return n;
}

std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& unit_normal, double offset,
                                double tol) {
    std::size_t n = 0;
    for (const Vec3& p : pts)
        if (std::abs(unit_normal.dot(p) - offset) <= tol) ++n;
    return n;
}

std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& axis_point,
                                   const Vec3& unit_axis, double radius, double tol) {
    std::size_t n = 0;
    for (const Vec3& p : pts) {
        const Vec3 rel = p - axis_point;
        const double t = rel.dot(unit_axis);
        const double radial2 = rel.squared_norm() - t * t;
        const double d = std::sqrt(std::max(radial2, 0.0)) - radius;
        if (std::abs(d) <= tol) ++n;
    }
    return n;
}

double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& center, double radius) {
    double s = 0;
    for (const Vec3& p : pts) {
        const double d = (p - center).norm() - radius;
        s += d * d;
    }
    return s;
}

double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& unit_normal, double offset) {
    double s = 0;
    for (const Vec3& p : pts) {
        const double d = unit_normal.dot(p) - offset;
        s += d * d;
    }
    return s;
}

double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& axis_point,
                                 const Vec3& unit_axis, double radius) {
    double s = 0;
    for (const Vec3& p : pts) {
        const Vec3 rel = p - axis_point;
        const double t = rel.dot(unit_axis);
        const double radial2 = rel.squared_norm() - t * t;
        const double d = std::sqrt(std::max(radial2, 0.0)) - radius;
        s += d * d;
    }
    return s;
}

void projection_range(std::span<const Vec3> pts, const Vec3& origin, const Vec3& dir, double& lo,
                      double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const Vec3& p : pts) {
        const double t = (p - origin).dot(dir);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
}

void transform_points(std::span<const Vec3> in, const Mat3& rotation, const Vec3& translation,
                      std::span<Vec3> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = rotation * in[i] + translation;
}

}  // namespace geomcoder::kernels::scalar
