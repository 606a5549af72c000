#include "geomcoder/scene/scene.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

#include "geomcoder/core/error.hpp"

namespace geomcoder::scene {

fit::PointCloud unproject_depth(const DepthFrame& frame) {
    if (frame.width <= 0 || frame.height <= 0 || frame.fx <= 0 || frame.fy <= 0)
        throw DimensionMismatch("unproject_depth: invalid frame header");
    fit::PointCloud cloud;
    cloud.points.reserve(frame.depth.size());
    for (int v = 0; v < frame.height; ++v) {
        for (int u = 0; u < frame.width; ++u) {
            const double d = frame.at(u, v);
            if (!(d > 0.0)) continue;
            const Point3 cam{(u - frame.cx) * d / frame.fx, (v - frame.cy) * d / frame.fy, d};
            cloud.points.push_back(frame.camera_pose.apply(cam));
        }
    }
    if (cloud.empty()) throw EmptyFrame("unproject_depth: no valid depth pixels");
    return cloud;
}

LabeledPointCloud project_mask(const SemanticMask& mask, const DepthFrame& frame) {
    if (mask.width != frame.width || mask.height != frame.height)
        throw DimensionMismatch("project_mask: mask " + std::to_string(mask.width) + "x" +
                                std::to_string(mask.height) + " vs frame " +
                                std::to_string(frame.width) + "x" + std::to_string(frame.height));
    LabeledPointCloud out;
    for (int v = 0; v < frame.height; ++v) {
        for (int u = 0; u < frame.width; ++u) {
            const double d = frame.at(u, v);
            if (!(d > 0.0)) continue;
            const Point3 cam{(u - frame.cx) * d / frame.fx, (v - frame.cy) * d / frame.fy, d};
            out.points.push_back(frame.camera_pose.apply(cam));
            out.labels.push_back(mask.at(u, v));
        }
    }
    if (out.points.empty()) throw EmptyFrame("project_mask: no valid depth pixels");
    return out;
}

SimilarityResult align_similarity(std::span<const Point3> src, std::span<const Point3> dst) {
    if (src.size() != dst.size())
        throw DimensionMismatch("align_similarity: correspondence lists differ in length");
    const std::size_t n = src.size();
    if (n < 3) throw DegenerateInput("align_similarity: needs >= 3 correspondences");

    Vec3 mu_s{}, mu_d{};
    for (std::size_t i = 0; i < n; ++i) {
        mu_s += src[i];
        mu_d += dst[i];
    }
    mu_s = mu_s / static_cast<double>(n);
    mu_d = mu_d / static_cast<double>(n);

    double var_s = 0.0;
    Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 a = src[i] - mu_s;
        const Vec3 b = dst[i] - mu_d;
        var_s += a.squared_norm();
        Eigen::Vector3d ea(a.x, a.y, a.z), eb(b.x, b.y, b.z);
        sigma += eb * ea.transpose();
    }
    var_s /= static_cast<double>(n);
    sigma /= static_cast<double>(n);

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    // Rank >= 2 required for a unique rotation (collinear sets are rank 1).
    if (sv(1) <= 1e-12 * std::max(1.0, sv(0)))
        throw DegenerateInput("align_similarity: correspondences are collinear");

    Eigen::Matrix3d s_fix = Eigen::Matrix3d::Identity();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s_fix(2, 2) = -1.0;
    const Eigen::Matrix3d rot = svd.matrixU() * s_fix * svd.matrixV().transpose();

    const double scale = (sv(0) + sv(1) + s_fix(2, 2) * sv(2)) / var_s;
    if (!(scale > 0.0)) throw DegenerateInput("align_similarity: non-positive scale");

    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = rot(i, j);
    const Quat q = Quat::from_matrix(r);
    const Vec3 t = mu_d - q.rotate(mu_s) * scale;
    return {scale, RigidTransform{q, t}};
}

BirdsEyeMap build_birdseye(const LabeledPointCloud& cloud, double cell_size, double z_lo,
                           double z_hi) {
    if (!(cell_size > 0.0)) throw DegenerateInput("build_birdseye: cell_size must be > 0");
    if (!(z_lo < z_hi)) throw DegenerateInput("build_birdseye: z band must satisfy lo < hi");

    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool any = false;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        if (p.z < z_lo || p.z > z_hi) continue;
        if (!any) {
            min_x = max_x = p.x;
            min_y = max_y = p.y;
            any = true;
        } else {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
    }
    if (!any) throw EmptyBand("build_birdseye: no points in z band");

    BirdsEyeMap map;
    map.cell_size = cell_size;
    map.origin_x = min_x;
    map.origin_y = min_y;
    map.width = static_cast<int>(std::floor((max_x - min_x) / cell_size)) + 1;
    map.height = static_cast<int>(std::floor((max_y - min_y) / cell_size)) + 1;
    map.cell_label.assign(static_cast<std::size_t>(map.width) * map.height, 0);

    // Per-cell label histogram; majority wins, ties to the smallest label id.
    std::map<std::pair<int, int>, std::map<int, int>> votes;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        if (p.z < z_lo || p.z > z_hi) continue;
        auto [row, col] = map.cell_of(p.x, p.y);
        row = std::clamp(row, 0, map.height - 1);
        col = std::clamp(col, 0, map.width - 1);
        votes[{row, col}][cloud.labels[i]]++;
    }
    for (const auto& [cell, hist] : votes) {
        int best_label = 0, best_count = -1;
        for (const auto& [label, count] : hist) {
            if (count > best_count) {  // map iteration is ascending, so ties keep the smaller id
                best_count = count;
                best_label = label;
            }
        }
        map.at(cell.first, cell.second) = best_label;
    }
    return map;
}

fit::PointCloud crop_by_label(const LabeledPointCloud& cloud, int label) {
    fit::PointCloud out;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (cloud.labels[i] == label) out.points.push_back(cloud.points[i]);
    if (out.empty())
        throw LabelNotFound("crop_by_label: no points with label " + std::to_string(label));
    return out;
}

}  // namespace geomcoder::scene
