// Data-parallel point-set kernels behind the fitting and residual paths.
//
// Every kernel has a scalar reference implementation (namespace scalar) and,
// on x86-64, an AVX2+FMA variant (namespace avx2). The unqualified functions
// dispatch to the best backend detected at startup; GEOMCODER_KERNELS=scalar|
// avx2|auto overrides detection, and force_backend() pins it from tests.
// Scalar and SIMD variants are equivalence-tested; results agree to floating-
// point reassociation tolerance.
#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "geomcoder/core/math.hpp"

namespace geomcoder::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name(Backend b);
// Test hook: pin the backend (nullopt restores env/auto selection).
void force_backend(std::optional<Backend> b);
bool avx2_available();

namespace scalar {
Vec3 sum_points(std::span<const Vec3> pts);
// Sums of centered second moments: order xx, xy, xz, yy, yz, zz.
void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]);
std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& center, double radius,
                                 double tol);
std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& unit_normal, double offset,
                                double tol);
std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& axis_point,
                                   const Vec3& unit_axis, double radius, double tol);
double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& center, double radius);
double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& unit_normal, double offset);
double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& axis_point,
                                 const Vec3& unit_axis, double radius);
// [lo, hi] of (p - origin) . dir over the cloud.
void projection_range(std::span<const Vec3> pts, const Vec3& origin, const Vec3& dir, double& lo,
                      double& hi);
void transform_points(std::span<const Vec3> in, const Mat3& rotation, const Vec3& translation,
                      std::span<Vec3> out);
}  // namespace scalar

namespace avx2 {
// Compiled only on x86-64 (guarded in the TU); call only if avx2_available().
Vec3 sum_points(std::span<const Vec3> pts);
void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]);
std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& center, double radius,
                                 double tol);
std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& unit_normal, double offset,
                                double tol);
std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& axis_point,
                                   const Vec3& unit_axis, double radius, double tol);
double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& center, double radius);
double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& unit_normal, double offset);
double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& axis_point,
                                 const Vec3& unit_axis, double radius);
void projection_range(std::span<const Vec3> pts, const Vec3& origin, const Vec3& dir, double& lo,
                      double& hi);
void transform_points(std::span<const Vec3> in, const Mat3& rotation, const Vec3& translation,
                      std::span<Vec3> out);
}  // namespace avx2

// Dispatched entry points.
Vec3 sum_points(std::span<const Vec3> pts);
void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]);
std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& center, double radius,
                                 double tol);
std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& unit_normal, double offset,
                                double tol);
std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& axis_point,
                                   const Vec3& unit_axis, double radius, double tol);
double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& center, double radius);
double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& unit_normal, double offset);
double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& axis_point,
                                 const Vec3& unit_axis, double radius);
void projection_range(std::span<const Vec3> pts, const Vec3& origin, const Vec3& dir, double& lo,
                      double& hi);
void transform_points(std::span<const Vec3> in, const Mat3& rotation, const Vec3& translation,
                      std::span<Vec3> out);

}  // namespace geomcoder::kernels
