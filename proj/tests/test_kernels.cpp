#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geomcoder/kernels/kernels.hpp"
#include "support/clouds.hpp"

using namespace geomcoder;
namespace k = geomcoder::kernels;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Vec3> pts(n);
    for (Vec3& p : pts) p = {u(rng), u(rng), u(rng)};
    return pts;
}

bool close(double a, double b, double tol = 1e-11) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
    if (!k::avx2_available()) {
        MESSAGE("avx2 not available on this host; scalar-only");
        return;
    }
    // sizes straddle the 4-lane width to cover tails
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 111u, 1000u}) {
        const std::vector<Vec3> pts = random_points(n, 1000 + n);
        const Vec3 center{0.2, -0.1, 0.3};
        const Vec3 normal = Vec3{0.3, 0.5, 0.9}.normalized();
        const Vec3 axis = Vec3{0.1, 0.9, 0.2}.normalized();

        const Vec3 s1 = k::scalar::sum_points(pts);
        const Vec3 s2 = k::avx2::sum_points(pts);
        CHECK(close(s1.x, s2.x));
        CHECK(close(s1.y, s2.y));
        CHECK(close(s1.z, s2.z));

        double c1[6], c2[6];
        k::scalar::covariance_upper(pts, center, c1);
        k::avx2::covariance_upper(pts, center, c2);
        for (int i = 0; i < 6; ++i) CHECK(close(c1[i], c2[i]));

        CHECK(k::scalar::count_sphere_inliers(pts, center, 1.0, 0.5) ==
              k::avx2::count_sphere_inliers(pts, center, 1.0, 0.5));
        CHECK(k::scalar::count_plane_inliers(pts, normal, 0.1, 0.4) ==
              k::avx2::count_plane_inliers(pts, normal, 0.1, 0.4));
        CHECK(k::scalar::count_cylinder_inliers(pts, center, axis, 0.8, 0.3) ==
              k::avx2::count_cylinder_inliers(pts, center, axis, 0.8, 0.3));

        CHECK(close(k::scalar::sum_sq_sphere_residuals(pts, center, 0.7),
                    k::avx2::sum_sq_sphere_residuals(pts, center, 0.7)));
        CHECK(close(k::scalar::sum_sq_plane_residuals(pts, normal, 0.1),
                    k::avx2::sum_sq_plane_residuals(pts, normal, 0.1)));
        CHECK(close(k::scalar::sum_sq_cylinder_residuals(pts, center, axis, 0.5),
                    k::avx2::sum_sq_cylinder_residuals(pts, center, axis, 0.5)));

        if (n > 0) {
            double lo1, hi1, lo2, hi2;
            k::scalar::projection_range(pts, center, axis, lo1, hi1);
            k::avx2::projection_range(pts, center, axis, lo2, hi2);
            CHECK(close(lo1, lo2));
            CHECK(close(hi1, hi2));
        }

        std::mt19937_64 rng(n + 5);
        const Mat3 rot = testsupport::random_quat(rng).to_matrix();
        const Vec3 t{0.4, -0.3, 0.7};
        std::vector<Vec3> out1(n), out2(n);
        k::scalar::transform_points(pts, rot, t, out1);
        k::avx2::transform_points(pts, rot, t, out2);
        for (std::size_t i = 0; i < n; ++i) CHECK((out1[i] - out2[i]).norm() < 1e-12);
    }
}

TEST_CASE("dispatch honors forced backend") {
    const std::vector<Vec3> pts = random_points(64, 9);
    k::force_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    const Vec3 a = k::sum_points(pts);
    const Vec3 expect = k::scalar::sum_points(pts);
    CHECK(a.x == expect.x);
    CHECK(a.y == expect.y);
    CHECK(a.z == expect.z);

    if (k::avx2_available()) {
        k::force_backend(k::Backend::avx2);
        CHECK(k::active_backend() == k::Backend::avx2);
        const Vec3 b = k::sum_points(pts);
        CHECK(close(a.x, b.x));
    }
    k::force_backend(std::nullopt);
}

TEST_CASE("scalar kernels match a naive loop") {
    const std::vector<Vec3> pts = random_points(257, 21);
    const Vec3 c{0.1, 0.2, -0.4};
    std::size_t count = 0;
    double ss = 0.0;
    for (const Vec3& p : pts) {
        const double d = (p - c).norm() - 0.9;
        if (std::abs(d) <= 0.25) ++count;
        ss += d * d;
    }
    CHECK(k::scalar::count_sphere_inliers(pts, c, 0.9, 0.25) == count);
    CHECK(close(k::scalar::sum_sq_sphere_residuals(pts, c, 0.9), ss, 1e-12));
}
