// Primitive parameter estimation from labeled point clouds: least-squares
// fits per shape family, RANSAC robustification, hinge-axis derivation for
// articulated panels, and convex envelopes for deformables.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomcoder/geom/ops.hpp"
#include "geomcoder/geom/primitives.hpp"

namespace geomcoder::fit {

struct PointCloud {
    std::vector<Point3> points;
    std::optional<std::vector<std::array<std::uint8_t, 3>>> colors;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct FitResult {
    GeometricPrimitive primitive;
    double rmse = 0.0;             // meters, >= 0
    double inlier_fraction = 1.0;  // [0, 1]
};

struct RansacConfig {
    int max_iterations = 512;
    double inlier_threshold = 0.005;  // meters
    double min_inlier_fraction = 0.3;
    std::uint64_t seed = 0;
};

enum class PrimitiveKind { sphere, cylinder, cuboid, plane, envelope };

std::optional<PrimitiveKind> primitive_kind_from_name(const std::string& name);
const char* primitive_kind_name(PrimitiveKind kind);
std::size_t minimal_sample_size(PrimitiveKind kind);

// Total-least-squares plane (centroid + smallest principal direction). Normal
// points toward the side with fewer points; ties break toward +z.
FitResult fit_plane(const PointCloud& cloud);

// Algebraic least-squares sphere (linearized |p-c|^2 = r^2 system).
FitResult fit_sphere(const PointCloud& cloud);

// Axis from the dominant principal direction, one Gauss-Newton pass on the
// radial residuals, radius = mean radial distance, height = axial extent.
FitResult fit_cylinder(const PointCloud& cloud);

// PCA-oriented bounding box (not minimum volume; within ~5% on box-like clouds).
FitResult fit_cuboid(const PointCloud& cloud);

// Convex hull of the cloud; rmse 0 by construction.
FitResult fit_envelope(const PointCloud& cloud);

FitResult fit_kind(PrimitiveKind kind, const PointCloud& cloud);

struct RobustFitResult {
    FitResult fit;
    std::vector<std::uint8_t> inlier_mask;  // 1 = inlier of the final model
};

// RANSAC: minimal-sample hypotheses, inlier consensus at cfg.inlier_threshold,
// final refit on the best inlier set. Deterministic for a given cfg.seed.
RobustFitResult robust_fit(const PointCloud& cloud, PrimitiveKind kind, const RansacConfig& cfg);

// Hinge = the vertical edge of the panel face farthest from the handle.
HingeAxis derive_hinge(const Cuboid& panel, const Cylinder& handle, const UnitVec3& vertical);

// Root-mean-square unsigned surface distance.
double fit_residual(const PointCloud& cloud, const GeometricPrimitive& prim);

}  // namespace geomcoder::fit
