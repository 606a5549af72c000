// Labeled metric point clouds and bird's-eye semantic maps from file-based
// perception inputs (depth rasters + semantic masks + intrinsics).
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "geomcoder/core/math.hpp"
#include "geomcoder/fit/fitting.hpp"

namespace geomcoder::scene {

struct DepthFrame {
    int width = 0;
    int height = 0;
    std::vector<float> depth;  // row-major, meters, 0 = invalid
    double fx = 0, fy = 0, cx = 0, cy = 0;
    RigidTransform camera_pose;  // camera -> world

    float at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
};

struct SemanticMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> label;  // row-major, 0 = background

    std::uint16_t at(int u, int v) const { return label[static_cast<std::size_t>(v) * width + u]; }
};

struct LabeledPointCloud {
    std::vector<Point3> points;  // world frame
    std::vector<int> labels;     // parallel to points

    std::size_t size() const { return points.size(); }
};

struct BirdsEyeMap {
    double origin_x = 0.0;  // world coordinates of cell (0,0)'s min corner
    double origin_y = 0.0;
    double cell_size = 0.1;
    int width = 0;   // columns (x)
    int height = 0;  // rows (y)
    std::vector<int> cell_label;  // row-major, 0 = free/unknown

    int at(int row, int col) const { return cell_label[static_cast<std::size_t>(row) * width + col]; }
    int& at(int row, int col) { return cell_label[static_cast<std::size_t>(row) * width + col]; }
    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    // World (x, y) -> (row, col); row indexes y, col indexes x.
    std::pair<int, int> cell_of(double x, double y) const {
        return {static_cast<int>(std::floor((y - origin_y) / cell_size)),
                static_cast<int>(std::floor((x - origin_x) / cell_size))};
    }
    Point3 cell_center(int row, int col, double z = 0.0) const {
        return {origin_x + (col + 0.5) * cell_size, origin_y + (row + 0.5) * cell_size, z};
    }
};

struct Instruction {
    std::string text;  // carried opaquely; decomposition happens upstream
};

struct SimilarityResult {
    double scale = 1.0;
    RigidTransform transform;
};

// Pinhole unprojection of every valid-depth pixel into the world frame.
fit::PointCloud unproject_depth(const DepthFrame& frame);

// Labeled cloud: each valid-depth pixel carries its mask label (0 kept).
LabeledPointCloud project_mask(const SemanticMask& mask, const DepthFrame& frame);

// Umeyama closed-form similarity: minimizes sum |dst - (s R src + t)|^2, s > 0.
SimilarityResult align_similarity(std::span<const Point3> src, std::span<const Point3> dst);

// Points with z in [z_lo, z_hi] binned by (x, y); majority label per cell,
// ties to the smallest label id; extents fit the binned points tightly.
BirdsEyeMap build_birdseye(const LabeledPointCloud& cloud, double cell_size, double z_lo = 0.02,
                           double z_hi = 1.8);

fit::PointCloud crop_by_label(const LabeledPointCloud& cloud, int label);

}  // namespace geomcoder::scene
