#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geomcoder/core/error.hpp"
#include "geomcoder/fit/fitting.hpp"
#include "support/clouds.hpp"
#include "support/oracles.hpp"

using namespace geomcoder;
using fit::PointCloud;

namespace {

double angle_between_lines(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0));
}

constexpr double kDeg = kPi / 180.0;

}  // namespace

TEST_CASE("fit_plane exact planes") {
    PointCloud flat;
    flat.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    const auto r = fit::fit_plane(flat);
    const auto& plane = std::get<Plane>(r.primitive);
    CHECK(std::abs(plane.normal.z) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(plane.normal.z > 0.0);  // +z on tie
    CHECK(plane.offset == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.rmse < 1e-12);

    PointCloud lifted = flat;
    for (auto& p : lifted.points) p.z = 1.5;
    const auto r2 = fit::fit_plane(lifted);
    CHECK(std::abs(std::get<Plane>(r2.primitive).offset) == doctest::Approx(1.5));
    CHECK(r2.rmse < 1e-12);
}

TEST_CASE("fit_plane noisy plane matches the eigen oracle") {
    const PointCloud cloud = testsupport::plane_cloud(500, 0.002, 42);
    const auto r = fit::fit_plane(cloud);
    const auto& plane = std::get<Plane>(r.primitive);
    CHECK(r.rmse > 0.0015);
    CHECK(r.rmse < 0.0025);
    CHECK(angle_between_lines(plane.normal.vec(), {0, 0, 1}) < 1.0 * kDeg);

    const testsupport::Eig3 eig = testsupport::covariance_eig_oracle(cloud.points);
    CHECK(angle_between_lines(plane.normal.vec(), eig.vectors[0]) < 1e-6);
    CHECK(r.rmse == doctest::Approx(std::sqrt(eig.values[0])).epsilon(1e-6));
}

TEST_CASE("fit_plane rejects collinear points") {
    PointCloud line;
    for (int i = 0; i < 10; ++i) line.points.push_back({0.1 * i, 0.2 * i, 0.3 * i});
    CHECK_THROWS_AS(fit::fit_plane(line), DegenerateInput);
}

TEST_CASE("fit_sphere exact recovery") {
    const PointCloud cloud = testsupport::sphere_cloud({1, 2, 3}, 0.5, 200, 0.0, 1);
    const auto r = fit::fit_sphere(cloud);
    const auto& s = std::get<Sphere>(r.primitive);
    CHECK((s.center - Point3{1, 2, 3}).norm() < 1e-9);
    CHECK(s.radius == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.rmse < 1e-9);

    PointCloud five;
    five.points = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}};
    const auto r5 = fit::fit_sphere(five);
    const auto& s5 = std::get<Sphere>(r5.primitive);
    CHECK(s5.center.norm() < 1e-12);
    CHECK(s5.radius == doctest::Approx(1.0));
}

TEST_CASE("fit_sphere noisy agrees with the hand-rolled solve") {
    const PointCloud cloud = testsupport::sphere_cloud({0.2, -0.1, 0.5}, 0.04, 500, 0.002, 7);
    const auto r = fit::fit_sphere(cloud);
    const auto& s = std::get<Sphere>(r.primitive);
    CHECK(std::abs(s.radius - 0.04) <= 0.001);
    CHECK((s.center - Point3{0.2, -0.1, 0.5}).norm() <= 0.001);

    const testsupport::SphereOracle oracle = testsupport::sphere_fit_oracle(cloud.points);
    CHECK((s.center - oracle.center).norm() < 1e-9);
    CHECK(std::abs(s.radius - oracle.radius) < 1e-9);
}

TEST_CASE("fit_sphere rejects coplanar points") {
    const PointCloud flat = testsupport::plane_cloud(50, 0.0, 3);
    CHECK_THROWS_AS(fit::fit_sphere(flat), DegenerateInput);
}

TEST_CASE("fit_cylinder door handle scale") {
    const PointCloud cloud =
        testsupport::cylinder_cloud({0, 0, 0}, {0, 0, 1}, 0.03, 0.12, 24, 9, 0.0, 0);
    const auto r = fit::fit_cylinder(cloud);
    const auto& c = std::get<Cylinder>(r.primitive);
    CHECK(std::abs(c.radius - 0.03) < 1e-7);
    CHECK(std::abs(c.height - 0.12) < 1e-7);
    CHECK(angle_between_lines(c.axis_dir.vec(), {0, 0, 1}) < 0.1 * kDeg);
    // base-center convention: the cylinder spans [0, height] along the axis
    CHECK(std::abs(c.axis_point.z) < 1e-7);

    // oracle: dominant principal direction + mean radial distance
    const testsupport::Eig3 eig = testsupport::covariance_eig_oracle(cloud.points);
    CHECK(angle_between_lines(c.axis_dir.vec(), eig.vectors[2]) < 0.1 * kDeg);
}

TEST_CASE("fit_cylinder is equivariant under rotation") {
    const PointCloud cloud =
        testsupport::cylinder_cloud({0, 0, 0}, {0, 0, 1}, 0.03, 0.12, 24, 9, 0.0, 0);
    PointCloud rotated;
    const Quat q = Quat::from_axis_angle({1, 0, 0}, kPi / 2);
    for (const Point3& p : cloud.points) rotated.points.push_back(q.rotate(p));
    const auto r = fit::fit_cylinder(rotated);
    const auto& c = std::get<Cylinder>(r.primitive);
    CHECK(std::abs(c.axis_dir.vec().dot({0, 1, 0})) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(c.radius - 0.03) < 1e-7);
    CHECK(std::abs(c.height - 0.12) < 1e-7);
}

TEST_CASE("fit_cylinder radius under noise") {
    const PointCloud cloud =
        testsupport::cylinder_cloud({0.1, 0.2, 0.3}, {0, 0, 1}, 0.03, 0.12, 25, 20, 0.001, 5);
    const auto r = fit::fit_cylinder(cloud);
    CHECK(std::abs(std::get<Cylinder>(r.primitive).radius - 0.03) <= 0.0005);
}

TEST_CASE("fit_cylinder rejects flat clouds") {
    PointCloud disk;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int i = 0; i < 60; ++i) disk.points.push_back({u(rng), u(rng), 0.0});
    CHECK_THROWS_AS(fit::fit_cylinder(disk), DegenerateInput);
}

TEST_CASE("fit_cuboid recovers boxes") {
    const auto corners =
        testsupport::cuboid_corner_cloud({0.4, -0.2, 0.7}, {0.5, 0.3, 0.2}, Quat::identity());
    const auto r = fit::fit_cuboid(corners);
    const auto& box = std::get<Cuboid>(r.primitive);
    std::array<double, 3> he{box.half_extents.x, box.half_extents.y, box.half_extents.z};
    std::sort(he.begin(), he.end());
    CHECK(he[0] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(he[1] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(he[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK((box.center - Point3{0.4, -0.2, 0.7}).norm() < 1e-9);
    CHECK(r.rmse < 1e-9);
}

TEST_CASE("fit_cuboid rotated corners match via signed distance") {
    const Quat q = Quat::from_axis_angle({0, 0, 1}, kPi / 6);
    const auto cloud = testsupport::cuboid_corner_cloud({0, 0, 0}, {0.5, 0.3, 0.2}, q);
    const auto r = fit::fit_cuboid(cloud);
    const auto& box = std::get<Cuboid>(r.primitive);
    std::array<double, 3> he{box.half_extents.x, box.half_extents.y, box.half_extents.z};
    std::sort(he.begin(), he.end());
    CHECK(he[0] == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(he[1] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(he[2] == doctest::Approx(0.5).epsilon(1e-6));
    // every corner sits on the fitted surface
    for (const Point3& p : cloud.points)
        CHECK(std::abs(distance_to_primitive(p, r.primitive)) < 1e-9);
}

TEST_CASE("fit_cuboid face samples stay within 5% volume") {
    const auto cloud =
        testsupport::cuboid_face_cloud({0, 0, 0}, {0.5, 0.5, 0.5}, Quat::identity(), 20);
    const auto r = fit::fit_cuboid(cloud);
    const auto& box = std::get<Cuboid>(r.primitive);
    const double volume = 8.0 * box.half_extents.x * box.half_extents.y * box.half_extents.z;
    CHECK(volume <= 1.05);
    CHECK(volume >= 0.95);
}

TEST_CASE("fit_envelope basics") {
    PointCloud tetra;
    tetra.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.25, 0.25, 0.25}};
    const auto r = fit::fit_envelope(tetra);
    CHECK(std::get<ConvexEnvelope>(r.primitive).vertices.size() == 4);
    CHECK(r.rmse == 0.0);
    CHECK(r.inlier_fraction == 1.0);
}

TEST_CASE("robust_fit recovers a sphere under 30% outliers") {
    PointCloud cloud = testsupport::sphere_cloud({0.1, 0.0, 0.4}, 0.04, 350, 0.002, 100);
    const auto truth = testsupport::add_box_outliers(cloud, 150, {0.1, 0.0, 0.4}, 0.12, 101);
    fit::RansacConfig cfg;
    cfg.inlier_threshold = 0.006;  // 3 sigma
    cfg.seed = 1;
    const auto r = fit::robust_fit(cloud, fit::PrimitiveKind::sphere, cfg);
    const auto& s = std::get<Sphere>(r.fit.primitive);
    CHECK(std::abs(s.radius - 0.04) <= 0.0008);  // 2%

    std::size_t recalled = 0, true_inliers = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            ++true_inliers;
            if (r.inlier_mask[i]) ++recalled;
        }
    }
    CHECK(static_cast<double>(recalled) / true_inliers >= 0.95);
}

TEST_CASE("robust_fit with zero outliers equals the plain fit") {
    const PointCloud cloud = testsupport::sphere_cloud({0.3, 0.2, 0.1}, 0.05, 300, 0.0, 11);
    fit::RansacConfig cfg;
    cfg.seed = 2;
    const auto robust = fit::robust_fit(cloud, fit::PrimitiveKind::sphere, cfg);
    const auto plain = fit::fit_sphere(cloud);
    const auto& a = std::get<Sphere>(robust.fit.primitive);
    const auto& b = std::get<Sphere>(plain.primitive);
    CHECK((a.center - b.center).norm() < 1e-6);
    CHECK(std::abs(a.radius - b.radius) < 1e-6);
    CHECK(robust.fit.inlier_fraction == 1.0);
}

TEST_CASE("robust_fit raises InsufficientConsensus at 90% outliers") {
    PointCloud cloud = testsupport::sphere_cloud({0, 0, 0}, 0.04, 50, 0.002, 5);
    testsupport::add_box_outliers(cloud, 450, {0, 0, 0}, 0.3, 6);
    fit::RansacConfig cfg;
    cfg.min_inlier_fraction = 0.5;
    cfg.seed = 3;
    CHECK_THROWS_AS(fit::robust_fit(cloud, fit::PrimitiveKind::sphere, cfg),
                    InsufficientConsensus);
}

TEST_CASE("robust_fit is deterministic for a fixed seed") {
    PointCloud cloud = testsupport::sphere_cloud({0.1, 0.1, 0.1}, 0.04, 300, 0.002, 50);
    testsupport::add_box_outliers(cloud, 120, {0.1, 0.1, 0.1}, 0.12, 51);
    fit::RansacConfig cfg;
    cfg.inlier_threshold = 0.006;
    cfg.seed = 1234;
    const auto a = fit::robust_fit(cloud, fit::PrimitiveKind::sphere, cfg);
    const auto b = fit::robust_fit(cloud, fit::PrimitiveKind::sphere, cfg);
    const auto& sa = std::get<Sphere>(a.fit.primitive);
    const auto& sb = std::get<Sphere>(b.fit.primitive);
    CHECK(sa.center.x == sb.center.x);
    CHECK(sa.center.y == sb.center.y);
    CHECK(sa.center.z == sb.center.z);
    CHECK(sa.radius == sb.radius);
    CHECK(a.inlier_mask == b.inlier_mask);
}

TEST_CASE("derive_hinge picks the edge farthest from the handle") {
    // panel spanning x in [0, 0.8], thin in y, tall in z
    const Cuboid panel{{0.4, 0.0, 1.0}, {0.4, 0.02, 1.0}, Quat::identity()};
    const UnitVec3 up = UnitVec3::from({0, 0, 1});
    auto handle_at = [](double x) {
        return Cylinder{{x, 0.05, 0.95}, UnitVec3::from({0, 0, 1}), 0.015, 0.1};
    };

    const HingeAxis far_edge = fit::derive_hinge(panel, handle_at(0.72), up);
    CHECK(far_edge.point.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(far_edge.direction.z) == doctest::Approx(1.0).epsilon(1e-9));

    const HingeAxis near_edge = fit::derive_hinge(panel, handle_at(0.08), up);
    CHECK(near_edge.point.x == doctest::Approx(0.8).epsilon(1e-9));

    CHECK_THROWS_AS(fit::derive_hinge(panel, handle_at(0.40), up), AmbiguousHinge);
}

TEST_CASE("fit_residual values") {
    const PointCloud on_surface = testsupport::sphere_cloud({0, 0, 0}, 0.5, 100, 0.0, 8);
    CHECK(fit::fit_residual(on_surface, Sphere{{0, 0, 0}, 0.5}) < 1e-9);

    PointCloud single;
    single.points = {{0, 0, 0.7}};
    CHECK(fit::fit_residual(single, Sphere{{0, 0, 0}, 0.5}) == doctest::Approx(0.2));

    const PointCloud noisy = testsupport::sphere_cloud({0, 0, 0}, 0.04, 500, 0.002, 9);
    const double rmse = fit::fit_residual(noisy, Sphere{{0, 0, 0}, 0.04});
    CHECK(rmse > 0.0015);
    CHECK(rmse < 0.0025);
}

TEST_CASE("fits are equivariant under rigid transforms") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        const RigidTransform t = testsupport::random_transform(rng, 1.0);

        const PointCloud sphere = testsupport::sphere_cloud({0.2, 0.1, 0.3}, 0.06, 150, 0.0,
                                                            200 + trial);
        PointCloud moved;
        for (const Point3& p : sphere.points) moved.points.push_back(t.apply(p));
        const auto fit_a = fit::fit_sphere(sphere);
        const auto fit_b = fit::fit_sphere(moved);
        const auto& sa = std::get<Sphere>(fit_a.primitive);
        const auto& sb = std::get<Sphere>(fit_b.primitive);
        CHECK((t.apply(sa.center) - sb.center).norm() < 1e-6);
        CHECK(std::abs(sa.radius - sb.radius) < 1e-6);

        // cuboid equivariance via signed distances at probe points
        const auto box = testsupport::cuboid_corner_cloud({0.1, 0.0, -0.2}, {0.4, 0.25, 0.15},
                                                          testsupport::random_quat(rng));
        PointCloud box_moved;
        for (const Point3& p : box.points) box_moved.points.push_back(t.apply(p));
        const auto fa = fit::fit_cuboid(box);
        const auto fb = fit::fit_cuboid(box_moved);
        for (int i = 0; i < 20; ++i) {
            const Point3 probe{u(rng), u(rng), u(rng)};
            const double da = distance_to_primitive(probe, fa.primitive);
            const double db = distance_to_primitive(t.apply(probe), fb.primitive);
            CHECK(std::abs(da - db) < 1e-6);
        }
    }
}

TEST_CASE("sphere radius error grows with noise") {
    const std::array<double, 4> sigmas{0.0, 0.001, 0.002, 0.004};
    std::array<double, 4> mean_err{};
    const int seeds = 30;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        double total = 0.0;
        for (int s = 0; s < seeds; ++s) {
            const PointCloud cloud =
                testsupport::sphere_cloud({0, 0, 0}, 0.04, 500, sigmas[si], 1000 + s);
            total += std::abs(std::get<Sphere>(fit::fit_sphere(cloud).primitive).radius - 0.04);
        }
        mean_err[si] = total / seeds;
    }
    CHECK(mean_err[0] <= mean_err[1]);
    CHECK(mean_err[1] <= mean_err[2]);
    CHECK(mean_err[2] <= mean_err[3]);
}
