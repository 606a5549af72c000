// AVX2+FMA kernel variants. This TU is compiled with -mavx2 -mfma on x86-64;
// callers must gate on avx2_available() (the dispatcher does). On other
// architectures the symbols forward to the scalar reference so the library
// still links; they are never selected there.
#include "geomcoder/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace geomcoder::kernels::avx2 {
namespace {

// Deinterleave 4 packed Vec3 (12 doubles) into X/Y/Z lanes.
inline void load4(const double* p, __m256d& x, __m256d& y, __m256d& z) {
    const __m256d a = _mm256_loadu_pd(p);      // x0 y0 z0 x1
    const __m256d b = _mm256_loadu_pd(p + 4);  // y1 z1 x2 y2
    const __m256d c = _mm256_loadu_pd(p + 8);  // z2 x3 y3 z3
    const __m256d t0 = _mm256_permute2f128_pd(a, b, 0x30);  // x0 y0 | x2 y2
    const __m256d t1 = _mm256_permute2f128_pd(a, c, 0x21);  // z0 x1 | z2 x3
    const __m256d t2 = _mm256_permute2f128_pd(b, c, 0x30);  // y1 z1 | y3 z3
    x = _mm256_shuffle_pd(t0, t1, 0xA);
    y = _mm256_shuffle_pd(t0, t2, 0x5);
    z = _mm256_shuffle_pd(t1, t2, 0xA);
}

// Interleave X/Y/Z lanes back to 4 packed Vec3.
inline void store4(double* p, __m256d x, __m256d y, __m256d z) {
    const __m256d t0 = _mm256_shuffle_pd(x, y, 0x0);  // x0 y0 | x2 y2
    const __m256d t1 = _mm256_shuffle_pd(z, x, 0xA);  // z0 x1 | z2 x3
    const __m256d t2 = _mm256_shuffle_pd(y, z, 0xF);  // y1 z1 | y3 z3
    _mm256_storeu_pd(p, _mm256_permute2f128_pd(t0, t1, 0x20));
    _mm256_storeu_pd(p + 4, _mm256_permute2f128_pd(t2, t0, 0x30));
    _mm256_storeu_pd(p + 8, _mm256_permute2f128_pd(t1, t2, 0x31));
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    const __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

const __m256d kZero = _mm256_setzero_pd();

}  // namespace

Vec3 sum_points(std::span<const Vec3> pts) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    __m256d sx = kZero, sy = kZero, sz = kZero;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        sx = _mm256_add_pd(sx, x);
        sy = _mm256_add_pd(sy, y);
        sz = _mm256_add_pd(sz, z);
    }
    Vec3 s{hsum(sx), hsum(sy), hsum(sz)};
    return s + scalar::sum_points(pts.subspan(n4));
}

void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d mx = _mm256_set1_pd(mean.x), my = _mm256_set1_pd(mean.y),
                  mz = _mm256_set1_pd(mean.z);
    __m256d xx = kZero, xy = kZero, xz = kZero, yy = kZero, yz = kZero, zz = kZero;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        const __m256d dx = _mm256_sub_pd(x, mx);
        const __m256d dy = _mm256_sub_pd(y, my);
        const __m256d dz = _mm256_sub_pd(z, mz);
        xx = _mm256_fmadd_pd(dx, dx, xx);
        xy = _mm256_fmadd_pd(dx, dy, xy);
        xz = _mm256_fmadd_pd(dx, dz, xz);
        yy = _mm256_fmadd_pd(dy, dy, yy);
        yz = _mm256_fmadd_pd(dy, dz, yz);
        zz = _mm256_fmadd_pd(dz, dz, zz);
    }
    double tail[6];
    scalar::covariance_upper(pts.subspan(n4), mean, tail);
    out[0] = hsum(xx) + tail[0];
    out[1] = hsum(xy) + tail[1];
    out[2] = hsum(xz) + tail[2];
    out[3] = hsum(yy) + tail[3];
    out[4] = hsum(yz) + tail[4];
    out[5] = hsum(zz) + tail[5];
}

std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& center, double radius,
                                 double tol) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d cx = _mm256_set1_pd(center.x), cy = _mm256_set1_pd(center.y),
                  cz = _mm256_set1_pd(center.z);
    const __m256d r = _mm256_set1_pd(radius), t = _mm256_set1_pd(tol);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        const __m256d dx = _mm256_sub_pd(x, cx);
        const __m256d dy = _mm256_sub_pd(y, cy);
        const __m256d dz = _mm256_sub_pd(z, cz);
        __m256d d2 = _mm256_mul_pd(dx, dx);
        d2 = _mm256_fmadd_pd(dy, dy, d2);
        d2 = _mm256_fmadd_pd(dz, dz, d2);
        const __m256d resid = _mm256_sub_pd(_mm256_sqrt_pd(d2), r);
        const __m256d ok = _mm256_cmp_pd(abs_pd(resid), t, _CMP_LE_OQ);
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(ok)));
    }
    return count + scalar::count_sphere_inliers(pts.subspan(n4), center, radius, tol);
}

std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& unit_normal, double offset,
                                double tol) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d nx = _mm256_set1_pd(unit_normal.x), ny = _mm256_set1_pd(unit_normal.y),
                  nz = _mm256_set1_pd(unit_normal.z);
    const __m256d off = _mm256_set1_pd(offset), t = _mm256_set1_pd(tol);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        __m256d d = _mm256_mul_pd(x, nx);
        d = _mm256_fmadd_pd(y, ny, d);
        d = _mm256_fmadd_pd(z, nz, d);
        d = _mm256_sub_pd(d, off);
        const __m256d ok = _mm256_cmp_pd(abs_pd(d), t, _CMP_LE_OQ);
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(ok)));
    }
    return count + scalar::count_plane_inliers(pts.subspan(n4), unit_normal, offset, tol);
}

namespace {

// radial residual (distance to axis minus radius) for 4 points
inline __m256d cylinder_resid(__m256d x, __m256d y, __m256d z, const Vec3& a, const Vec3& d,
                              double radius) {
    const __m256d rx = _mm256_sub_pd(x, _mm256_set1_pd(a.x));
    const __m256d ry = _mm256_sub_pd(y, _mm256_set1_pd(a.y));
    const __m256d rz = _mm256_sub_pd(z, _mm256_set1_pd(a.z));
    __m256d t = _mm256_mul_pd(rx, _mm256_set1_pd(d.x));
    t = _mm256_fmadd_pd(ry, _mm256_set1_pd(d.y), t);
    t = _mm256_fmadd_pd(rz, _mm256_set1_pd(d.z), t);
    __m256d n2 = _mm256_mul_pd(rx, rx);
    n2 = _mm256_fmadd_pd(ry, ry, n2);
    n2 = _mm256_fmadd_pd(rz, rz, n2);
    const __m256d rad2 = _mm256_max_pd(_mm256_fnmadd_pd(t, t, n2), kZero);
    return _mm256_sub_pd(_mm256_sqrt_pd(rad2), _mm256_set1_pd(radius));
}

}  // namespace

std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& axis_point,
                                   const Vec3& unit_axis, double radius, double tol) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d t = _mm256_set1_pd(tol);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        const __m256d resid = cylinder_resid(x, y, z, axis_point, unit_axis, radius);
        const __m256d ok = _mm256_cmp_pd(abs_pd(resid), t, _CMP_LE_OQ);
        count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(ok)));
    }
    return count + scalar::count_cylinder_inliers(pts.subspan(n4), axis_point, unit_axis, radius, tol);
}

double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& center, double radius) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d cx = _mm256_set1_pd(center.x), cy = _mm256_set1_pd(center.y),
                  cz = _mm256_set1_pd(center.z);
    const __m256d r = _mm256_set1_pd(radius);
    __m256d acc = kZero;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        const __m256d dx = _mm256_sub_pd(x, cx);
        const __m256d dy = _mm256_sub_pd(y, cy);
        const __m256d dz = _mm256_sub_pd(z, cz);
        __m256d d2 = _mm256_mul_pd(dx, dx);
        d2 = _mm256_fmadd_pd(dy, dy, d2);
        d2 = _mm256_fmadd_pd(dz, dz, d2);
        const __m256d resid = _mm256_sub_pd(_mm256_sqrt_pd(d2), r);
        acc = _mm256_fmadd_pd(resid, resid, acc);
    }
    return hsum(acc) + scalar::sum_sq_sphere_residuals(pts.subspan(n4), center, radius);
}

double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& unit_normal, double offset) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d nx = _mm256_set1_pd(unit_normal.x), ny = _mm256_set1_pd(unit_normal.y),
                  nz = _mm256_set1_pd(unit_normal.z);
    const __m256d off = _mm256_set1_pd(offset);
    __m256d acc = kZero;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        __m256d d = _mm256_mul_pd(x, nx);
        d = _mm256_fmadd_pd(y, ny, d);
        d = _mm256_fmadd_pd(z, nz, d);
        d = _mm256_sub_pd(d, off);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    return hsum(acc) + scalar::sum_sq_plane_residuals(pts.subspan(n4), unit_normal, offset);
}

double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& axis_point,
                                 const Vec3& unit_axis, double radius) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    __m256d acc = kZero;
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        const __m256d resid = cylinder_resid(x, y, z, axis_point, unit_axis, radius);
        acc = _mm256_fmadd_pd(resid, resid, acc);
    }
    return hsum(acc) +
           scalar::sum_sq_cylinder_residuals(pts.subspan(n4), axis_point, unit_axis, radius);
}

void projection_range(std::span<const Vec3> pts, const Vec3& origin, const Vec3& dir, double& lo,
                      double& hi) {
    const std::size_t n4 = pts.size() / 4 * 4;
    const double* base = &pts.data()->x;
    const __m256d dx = _mm256_set1_pd(dir.x), dy = _mm256_set1_pd(dir.y),
                  dz = _mm256_set1_pd(dir.z);
    const __m256d ox = _mm256_set1_pd(origin.x), oy = _mm256_set1_pd(origin.y),
                  oz = _mm256_set1_pd(origin.z);
    __m256d vlo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d vhi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(base + 3 * i, x, y, z);
        __m256d t = _mm256_mul_pd(_mm256_sub_pd(x, ox), dx);
        t = _mm256_fmadd_pd(_mm256_sub_pd(y, oy), dy, t);
        t = _mm256_fmadd_pd(_mm256_sub_pd(z, oz), dz, t);
        vlo = _mm256_min_pd(vlo, t);
        vhi = _mm256_max_pd(vhi, t);
    }
    alignas(32) double a[4], b[4];
    _mm256_store_pd(a, vlo);
    _mm256_store_pd(b, vhi);
    lo = std::min({a[0], a[1], a[2], a[3]});
    hi = std::max({b[0], b[1], b[2], b[3]});
    double tlo, thi;
    scalar::projection_range(pts.subspan(n4), origin, dir, tlo, thi);
    lo = std::min(lo, tlo);
    hi = std::max(hi, thi);
}

void transform_points(std::span<const Vec3> in, const Mat3& rotation, const Vec3& translation,
                      std::span<Vec3> out) {
    const std::size_t n4 = in.size() / 4 * 4;
    const double* src = &in.data()->x;
    double* dst = &out.data()->x;
    const __m256d m00 = _mm256_set1_pd(rotation.m[0][0]), m01 = _mm256_set1_pd(rotation.m[0][1]),
                  m02 = _mm256_set1_pd(rotation.m[0][2]);
    const __m256d m10 = _mm256_set1_pd(rotation.m[1][0]), m11 = _mm256_set1_pd(rotation.m[1][1]),
                  m12 = _mm256_set1_pd(rotation.m[1][2]);
    const __m256d m20 = _mm256_set1_pd(rotation.m[2][0]), m21 = _mm256_set1_pd(rotation.m[2][1]),
                  m22 = _mm256_set1_pd(rotation.m[2][2]);
    const __m256d tx = _mm256_set1_pd(translation.x), ty = _mm256_set1_pd(translation.y),
                  tz = _mm256_set1_pd(translation.z);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d x, y, z;
        load4(src + 3 * i, x, y, z);
        __m256d nx = _mm256_fmadd_pd(m00, x, tx);
        nx = _mm256_fmadd_pd(m01, y, nx);
        nx = _mm256_fmadd_pd(m02, z, nx);
        __m256d ny = _mm256_fmadd_pd(m10, x, ty);
        ny = _mm256_fmadd_pd(m11, y, ny);
        ny = _mm256_fmadd_pd(m12, z, ny);
        __m256d nz = _mm256_fmadd_pd(m20, x, tz);
        nz = _mm256_fmadd_pd(m21, y, nz);
        nz = _mm256_fmadd_pd(m22, z, nz);
        store4(dst + 3 * i, nx, ny, nz);
    }
    scalar::transform_points(in.subspan(n4), rotation, translation, out.subspan(n4));
}

}  // namespace geomcoder::kernels::avx2

#else  // non-x86: forward to scalar so the library links; never dispatched.

namespace geomcoder::kernels::avx2 {

Vec3 sum_points(std::span<const Vec3> pts) { return scalar::sum_points(pts); }
void covariance_upper(std::span<const Vec3> pts, const Vec3& mean, double out[6]) {
    scalar::covariance_upper(pts, mean, out);
}
std::size_t count_sphere_inliers(std::span<const Vec3> pts, const Vec3& c, double r, double t) {
    return scalar::count_sphere_inliers(pts, c, r, t);
}
std::size_t count_plane_inliers(std::span<const Vec3> pts, const Vec3& n, double o, double t) {
    return scalar::count_plane_inliers(pts, n, o, t);
}
std::size_t count_cylinder_inliers(std::span<const Vec3> pts, const Vec3& a, const Vec3& d,
                                   double r, double t) {
    return scalar::count_cylinder_inliers(pts, a, d, r, t);
}
double sum_sq_sphere_residuals(std::span<const Vec3> pts, const Vec3& c, double r) {
    return scalar::sum_sq_sphere_residuals(pts, c, r);
}
double sum_sq_plane_residuals(std::span<const Vec3> pts, const Vec3& n, double o) {
    return scalar::sum_sq_plane_residuals(pts, n, o);
}
double sum_sq_cylinder_residuals(std::span<const Vec3> pts, const Vec3& a, const Vec3& d,
                                 double r) {
    return scalar::sum_sq_cylinder_residuals(pts, a, d, r);
}
void projection_range(std::span<const Vec3> pts, const Vec3& o, const Vec3& d, double& lo,
                      double& hi) {
    scalar::projection_range(pts, o, d, lo, hi);
}
void transform_points(std::span<const Vec3> in, const Mat3& r, const Vec3& t, std::span<Vec3> out) {
    scalar::transform_points(in, r, t, out);
}

}  // namespace geomcoder::kernels::avx2

#endif
