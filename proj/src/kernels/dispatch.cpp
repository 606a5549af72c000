#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

#include "geomcoder/kernels/cpu_features.hpp"
#include "geomcoder/kernels/kernels.hpp"

namespace geomcoder::kernels {

namespace {

Backend select_from_env() {
    const CpuFeatures f = detect_cpu_features();
    const bool simd_ok = f.avx2 && f.fma;
    if (const char* env = std::getenv("GEOMCODER_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && simd_ok) return Backend::avx2;
        // "auto" or anything unusable falls through to detection
    }
    return simd_ok ? Backend::avx2 : Backend::scalar;
}

std::optional<Backend>& forced() {
    static std::optional<Backend> f;
    return f;
}

}  // namespace

bool avx2_available() {
    static const bool ok = [] {
        const CpuFeatures f = detect_cpu_features();
        return f.avx2 && f.fma;
    }();
    return ok;
}

Backend active_backend() {
    if (forced()) return *forced();
    static const Backend b = select_from_env();
    return b;
}

void force_backend(std::optional<Backend> b) {
    if (b && *b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
    forced() = b;
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

#define GEOMCODER_DISPATCH(call) \
    return active_backend() == Backend::avx2 ? avx2::call : scalar::call

Vec3 sum_points(std::span<const Vec3> pts) { GEOMCODER_DISPATCH(sum_points(pts)); }

void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]) {
    if (active_backend() == Backend::avx2)
        avx2::covariance_upper(pts, mean, out);
    else
        scalar::covariance_upper(pts, mean, out);
}

std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& center, double radius,
                                 double tol) {
    GEOMCODER_DISPATCH(count_sphere_inliers(pts, center, radius, tol));
}

std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& unit_normal, double offset,
                                double tol) {
    GEOMCODER_DISPATCH(count_plane_inliers(pts, unit_normal, offset, tol));
}

std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& axis_point,
                                   const Vec3& unit_axis, double radius, double tol) {
    GEOMCODER_DISPATCH(count_cylinder_inliers(pts, axis_point, unit_axis, radius, tol));
}

double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& center, double radius) {
    GEOMCODER_DISPATCH(sum_sq_sphere_residuals(pts, center, radius));
}

double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& unit_normal, double offset) {
    GEOMCODER_DISPATCH(sum_sq_plane_residuals(pts, unit_normal, offset));
}

double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& axis_point,
                                 const Vec3& unit_axis, double radius) {
    GEOMCODER_DISPATCH(sum_sq_cylinder_residuals(pts, axis_point, unit_axis, radius));
}

void projection_range(std::span<const Vec3> pts, const Vec3& origin, const Vec3& dir, double& lo,
                      double& hi) {
    if (active_backend() == Backend::avx2)
        avx2::projection_range(pts, origin, dir, lo, hi);
    else
        scalar::projection_range(pts, origin, dir, lo, hi);
}

void transform_points(std::span<const Vec3> in, const Mat3& rotation, const Vec3& translation,
                      std::span<Vec3> out) {
    if (active_backend() == Backend::avx2)
        avx2::transform_points(in, rotation, translation, out);
    else
        scalar::transform_points(in, rotation, translation, out);
}

#undef GEOMCODER_DISPATCH

}  // namespace geomcoder::kernels
