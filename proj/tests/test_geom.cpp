#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geomcoder/core/error.hpp"
#include "geomcoder/geom/json.hpp"
#include "geomcoder/geom/ops.hpp"
#include "support/clouds.hpp"

using namespace geomcoder;

namespace {
const UnitVec3 kZAxis = UnitVec3::from({0, 0, 1});
}

TEST_CASE("rotate_about_axis quarter turn and identity") {
    const Point3 p{1, 0, 0};
    const Point3 q = rotate_about_axis(p, {0, 0, 0}, kZAxis, kPi / 2);
    CHECK(q.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.z == doctest::Approx(0.0).epsilon(1e-12));

    const Point3 same = rotate_about_axis(p, {0, 0, 0}, kZAxis, 0.0);
    CHECK(same.x == 1.0);
    CHECK(same.y == 0.0);

    const Point3 eighth = rotate_about_axis(p, {0, 0, 0}, kZAxis, kPi / 4);
    CHECK(eighth.x == doctest::Approx(0.70711).epsilon(1e-4));
    CHECK(eighth.y == doctest::Approx(0.70711).epsilon(1e-4));
}

TEST_CASE("rotate_about_axis preserves axis distance and inverts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> ang(-2.0 * kPi, 2.0 * kPi);
    for (int i = 0; i < 200; ++i) {
        const Point3 p{u(rng), u(rng), u(rng)};
        const Point3 a{u(rng), u(rng), u(rng)};
        const UnitVec3 d = UnitVec3::from(testsupport::random_unit(rng));
        const double theta = ang(rng);
        const Point3 q = rotate_about_axis(p, a, d, theta);
        const double before = (p - a).cross(d.vec()).norm();
        const double after = (q - a).cross(d.vec()).norm();
        CHECK(std::abs(before - after) < 1e-12);
        const Point3 back = rotate_about_axis(q, a, d, -theta);
        CHECK((back - p).norm() < 1e-12);
    }
}

TEST_CASE("distance_to_primitive exact values") {
    CHECK(distance_to_primitive({0, 0, 2}, Sphere{{0, 0, 0}, 1.0}) == doctest::Approx(1.0));
    CHECK(distance_to_primitive({0, 0, 0},
                                Cuboid{{0, 0, 0}, {0.5, 0.5, 0.5}, Quat::identity()}) ==
          doctest::Approx(-0.5));
    CHECK(distance_to_primitive(
              {0.05, 0, 0.06},
              Cylinder{{0, 0, 0}, kZAxis, 0.03, 0.12}) == doctest::Approx(0.02));
    CHECK(distance_to_primitive({0, 0, 0.1}, Plane{kZAxis, 0.0}) == doctest::Approx(0.1));
}

TEST_CASE("transform_primitive moves poses and keeps shape parameters") {
    const GeometricPrimitive s = Sphere{{0, 0, 0}, 0.5};
    const auto moved = std::get<Sphere>(
        transform_primitive(s, RigidTransform::translate({1, 2, 3})));
    CHECK(moved.center.x == doctest::Approx(1.0));
    CHECK(moved.center.y == doctest::Approx(2.0));
    CHECK(moved.center.z == doctest::Approx(3.0));
    CHECK(moved.radius == 0.5);

    const Cuboid box{{0.1, 0.2, 0.3}, {0.2, 0.3, 0.4}, Quat::from_axis_angle({0, 0, 1}, 0.3)};
    const auto same = std::get<Cuboid>(transform_primitive(box, RigidTransform::identity()));
    CHECK((same.center - box.center).norm() < 1e-12);
    CHECK((same.half_extents - box.half_extents).norm() < 1e-12);

    const Cylinder cyl{{0, 0, 0}, kZAxis, 0.03, 0.12};
    const auto rotated = std::get<Cylinder>(transform_primitive(
        cyl, RigidTransform::rotate(Quat::from_axis_angle({1, 0, 0}, kPi / 2))));
    CHECK(std::abs(rotated.axis_dir.vec().dot({0, 1, 0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rotated.radius == 0.03);
    CHECK(rotated.height == 0.12);
}

TEST_CASE("transform round trip recovers the primitive") {
    std::mt19937_64 rng(11);
    const Cuboid box{{0.3, -0.2, 0.5}, {0.2, 0.1, 0.4}, testsupport::random_quat(rng)};
    const RigidTransform t = testsupport::random_transform(rng);
    const auto back = std::get<Cuboid>(
        transform_primitive(transform_primitive(box, t), t.inverse()));
    CHECK((back.center - box.center).norm() < 1e-9);
    CHECK((back.half_extents - box.half_extents).norm() < 1e-9);
    CHECK(std::abs(std::abs(back.orientation.w * box.orientation.w +
                            back.orientation.x * box.orientation.x +
                            back.orientation.y * box.orientation.y +
                            back.orientation.z * box.orientation.z) -
                   1.0) < 1e-9);
}

TEST_CASE("signed distance is rigid invariant") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const std::vector<GeometricPrimitive> prims{
        Sphere{{0.2, 0.1, -0.3}, 0.4},
        Cylinder{{0, 0.2, 0}, UnitVec3::from({0.3, 0.1, 0.9}), 0.2, 0.5},
        Cuboid{{0.1, 0, 0.2}, {0.3, 0.2, 0.1}, testsupport::random_quat(rng)},
        Plane{UnitVec3::from({0.1, 0.2, 0.9}), 0.3}};
    for (const auto& prim : prims) {
        for (int i = 0; i < 50; ++i) {
            const Point3 p{u(rng), u(rng), u(rng)};
            const RigidTransform t = testsupport::random_transform(rng);
            const double before = distance_to_primitive(p, prim);
            const double after = distance_to_primitive(t.apply(p), transform_primitive(prim, t));
            CHECK(std::abs(before - after) < 1e-9);
        }
    }
}

TEST_CASE("primitive_clearance analytic cases") {
    CHECK(primitive_clearance(Sphere{{0, 0, 0}, 1.0}, Sphere{{3, 0, 0}, 1.0}) ==
          doctest::Approx(1.0));
    CHECK(primitive_clearance(Sphere{{1, 2, 3}, 0.3}, Sphere{{1, 2, 3}, 0.3}) ==
          doctest::Approx(-0.6));
    CHECK(primitive_clearance(Sphere{{0, 0, 0.1}, 0.04}, Plane{kZAxis, 0.0}) ==
          doctest::Approx(0.06));
}

TEST_CASE("primitive_clearance is symmetric") {
    const GeometricPrimitive a = Cuboid{{0, 0, 0}, {0.2, 0.2, 0.2}, Quat::identity()};
    const GeometricPrimitive b =
        Cylinder{{0.6, 0, -0.1}, kZAxis, 0.1, 0.3};
    const double ab = primitive_clearance(a, b);
    const double ba = primitive_clearance(b, a);
    CHECK(ab == ba);  // symmetric by construction
    CHECK(ab == doctest::Approx(0.3).epsilon(0.05));  // 0.6 - 0.2 - 0.1 along x
}

TEST_CASE("convex envelope keeps only hull vertices") {
    std::vector<Point3> tetra{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::vector<Point3> with_centroid = tetra;
    with_centroid.push_back({0.25, 0.25, 0.25});
    const ConvexEnvelope env = make_envelope(with_centroid);
    CHECK(env.vertices.size() == 4);

    auto cube = testsupport::cuboid_corner_cloud({0, 0, 0}, {0.5, 0.5, 0.5}, Quat::identity());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    for (int i = 0; i < 100; ++i) cube.points.push_back({u(rng), u(rng), u(rng)});
    const ConvexEnvelope cube_env = make_envelope(cube.points);
    CHECK(cube_env.vertices.size() == 8);
}

TEST_CASE("convex envelope contains every input point") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> r01(0.0, 1.0);
    std::vector<Point3> pts;
    for (int i = 0; i < 1000; ++i) {
        Vec3 dir{n(rng), n(rng), n(rng)};
        dir = dir.normalized() * std::cbrt(r01(rng));
        pts.push_back(Point3{0.5, -0.2, 0.1} + dir * 0.4);
    }
    const GeometricPrimitive env = make_envelope(pts);
    for (const Point3& p : pts) CHECK(distance_to_primitive(p, env) <= 1e-9);
}

TEST_CASE("degenerate envelopes are rejected") {
    CHECK_THROWS_AS(make_envelope(std::vector<Point3>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}}),
                    DegenerateInput);
    CHECK_THROWS_AS(
        make_envelope(std::vector<Point3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}}),
        DegenerateInput);
}

TEST_CASE("primitive JSON is canonical and stable") {
    std::mt19937_64 rng(23);
    const std::vector<GeometricPrimitive> prims{
        Sphere{{1, 2, 3}, 0.5},
        Cylinder{{0.1, -0.2, 0.3}, UnitVec3::from({0.2, 0.3, 0.9}), 0.03, 0.12},
        Cuboid{{0, 0.1, 0.2}, {0.5, 0.3, 0.2}, testsupport::random_quat(rng)},
        Plane{UnitVec3::from({0, 0.6, 0.8}), 1.5},
        HingeAxis{{3, 1.5, 0}, kZAxis, {0.0, kPi / 2}},
        make_envelope(std::vector<Point3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}})};
    for (const auto& prim : prims) {
        const std::string once = canonical_dump(primitive_to_json(prim));
        const GeometricPrimitive reloaded = primitive_from_json(parse_json(once, "test"));
        const std::string twice = canonical_dump(primitive_to_json(reloaded));
        CHECK(once == twice);
    }
}
