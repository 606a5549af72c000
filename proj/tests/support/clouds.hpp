// Synthetic point-cloud generators for tests: exact surface samples, Gaussian
// noise, uniform outliers, random rigid/similarity transforms. All draws are
// seeded; no global RNG.
#pragma once

#include <random>
#include <vector>

#include "geomcoder/fit/fitting.hpp"
#include "geomcoder/geom/ops.hpp"

namespace testsupport {

using geomcoder::Point3;
using geomcoder::Quat;
using geomcoder::RigidTransform;
using geomcoder::UnitVec3;
using geomcoder::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v{n(rng), n(rng), n(rng)};
    while (v.norm() < 1e-6) v = Vec3{n(rng), n(rng), n(rng)};
    return v.normalized();
}

inline Quat random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Quat q{n(rng), n(rng), n(rng), n(rng)};
    return q.normalized();
}

inline RigidTransform random_transform(std::mt19937_64& rng, double translation_scale = 2.0) {
    std::uniform_real_distribution<double> u(-translation_scale, translation_scale);
    return {random_quat(rng), Vec3{u(rng), u(rng), u(rng)}};
}

inline Vec3 gaussian_offset(std::mt19937_64& rng, double sigma) {
    std::normal_distribution<double> n(0.0, sigma);
    return {n(rng), n(rng), n(rng)};
}

inline geomcoder::fit::PointCloud sphere_cloud(const Point3& center, double radius, int n,
                                               double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    geomcoder::fit::PointCloud cloud;
    cloud.points.reserve(n);
    for (int i = 0; i < n; ++i) {
        const Vec3 dir = random_unit(rng);
        cloud.points.push_back(center + dir * radius + gaussian_offset(rng, sigma));
    }
    return cloud;
}

// Lateral-surface samples on a regular grid (exact when sigma == 0).
inline geomcoder::fit::PointCloud cylinder_cloud(const Point3& base, const Vec3& axis,
                                                 double radius, double height, int n_angular,
                                                 int n_axial, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Vec3 d = axis.normalized();
    const Vec3 ref = std::abs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 u = d.cross(ref).normalized();
    const Vec3 v = d.cross(u);
    geomcoder::fit::PointCloud cloud;
    for (int iz = 0; iz < n_axial; ++iz) {
        const double t = height * iz / (n_axial - 1);
        for (int ia = 0; ia < n_angular; ++ia) {
            const double th = 2.0 * geomcoder::kPi * ia / n_angular;
            Point3 p = base + d * t + (u * std::cos(th) + v * std::sin(th)) * radius;
            if (sigma > 0.0) p += gaussian_offset(rng, sigma);
            cloud.points.push_back(p);
        }
    }
    return cloud;
}

inline geomcoder::fit::PointCloud plane_cloud(int n, double sigma, std::uint64_t seed,
                                              double z = 0.0, double extent = 0.5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-extent, extent);
    std::normal_distribution<double> nz(0.0, sigma);
    geomcoder::fit::PointCloud cloud;
    cloud.points.reserve(n);
    for (int i = 0; i < n; ++i) cloud.points.push_back({u(rng), u(rng), z + nz(rng)});
    return cloud;
}

inline geomcoder::fit::PointCloud cuboid_corner_cloud(const Point3& center,
                                                      const Vec3& half_extents, const Quat& q) {
    geomcoder::fit::PointCloud cloud;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                cloud.points.push_back(
                    center + q.rotate(Vec3{sx * half_extents.x, sy * half_extents.y,
                                           sz * half_extents.z}));
    return cloud;
}

inline geomcoder::fit::PointCloud cuboid_face_cloud(const Point3& center, const Vec3& half_extents,
                                                    const Quat& q, int per_edge) {
    geomcoder::fit::PointCloud cloud;
    const geomcoder::GeometricPrimitive box =
        geomcoder::Cuboid{center, half_extents, q};
    const double spacing =
        2.0 * std::max({half_extents.x, half_extents.y, half_extents.z}) / per_edge;
    cloud.points = geomcoder::sample_surface(box, spacing);
    return cloud;
}

// Replaces the back `count` points with uniform draws inside a box around the
// cloud; returns ground-truth inlier flags (1 for kept surface points).
inline std::vector<std::uint8_t> add_box_outliers(geomcoder::fit::PointCloud& cloud, int count,
                                                  const Point3& box_center, double box_half,
                                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-box_half, box_half);
    std::vector<std::uint8_t> truth(cloud.size(), 1);
    for (int i = 0; i < count; ++i) {
        cloud.points.push_back(box_center + Vec3{u(rng), u(rng), u(rng)});
        truth.push_back(0);
    }
    return truth;
}

}  // namespace testsupport
