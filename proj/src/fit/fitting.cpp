#include "geomcoder/fit/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "geomcoder/core/error.hpp"
#include "geomcoder/kernels/kernels.hpp"

namespace geomcoder::fit {

namespace {

// rms extent below this is treated as rank-deficient (exact degeneracy up to fp)
constexpr double kRankTol = 1e-9;

Vec3 centroid_of(std::span<const Point3> pts) {
    return kernels::sum_points(pts) / static_cast<double>(pts.size());
}

// Centered covariance (divided by n), eigen-decomposed; eigenvalues ascending.
struct PcaResult {
    Vec3 mean;
    std::array<double, 3> eigenvalues;   // ascending, variances (m^2)
    std::array<Vec3, 3> eigenvectors;    // unit, same order
};

PcaResult pca(std::span<const Point3> pts) {
    PcaResult r;
    r.mean = centroid_of(pts);
    double cov[6];
    kernels::covariance_upper(pts, r.mean, cov);
    const double inv_n = 1.0 / static_cast<double>(pts.size());
    Eigen::Matrix3d m;
    m << cov[0], cov[1], cov[2], cov[1], cov[3], cov[4], cov[2], cov[4], cov[5];
    m *= inv_n;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    for (int i = 0; i < 3; ++i) {
        r.eigenvalues[i] = std::max(es.eigenvalues()(i), 0.0);
        const auto v = es.eigenvectors().col(i);
        r.eigenvectors[i] = Vec3{v(0), v(1), v(2)};
    }
    return r;
}

// Deterministic sign: largest-magnitude component positive.
Vec3 canonical_sign(const Vec3& v) {
    const double ax = std::abs(v.x), ay = std::abs(v.y), az = std::abs(v.z);
    double lead = v.z;
    if (ax >= ay && ax >= az) lead = v.x;
    else if (ay >= az) lead = v.y;
    return lead < 0.0 ? -v : v;
}

// Prefer +z, then +y, then +x (plane-normal and cylinder-axis tie rule).
Vec3 prefer_up(const Vec3& v) {
    if (v.z > 1e-12) return v;
    if (v.z < -1e-12) return -v;
    if (v.y > 1e-12) return v;
    if (v.y < -1e-12) return -v;
    return v.x >= 0.0 ? v : -v;
}

double radial_distance(const Point3& p, const Point3& axis_point, const Vec3& unit_axis) {
    const Vec3 rel = p - axis_point;
    const double t = rel.dot(unit_axis);
    return std::sqrt(std::max(rel.squared_norm() - t * t, 0.0));
}

void require_points(const PointCloud& cloud, std::size_t n, const char* op) {
    if (cloud.size() < n)
        throw DegenerateInput(std::string(op) + ": needs at least " + std::to_string(n) + " points");
    for (const Point3& p : cloud.points)
        if (!p.finite()) throw DegenerateInput(std::string(op) + ": non-finite point");
}

}  // namespace

std::optional<PrimitiveKind> primitive_kind_from_name(const std::string& name) {
    if (name == "sphere") return PrimitiveKind::sphere;
    if (name == "cylinder") return PrimitiveKind::cylinder;
    if (name == "cuboid") return PrimitiveKind::cuboid;
    if (name == "plane") return PrimitiveKind::plane;
    if (name == "envelope") return PrimitiveKind::envelope;
    return std::nullopt;
}

const char* primitive_kind_name(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::sphere: return "sphere";
        case PrimitiveKind::cylinder: return "cylinder";
        case PrimitiveKind::cuboid: return "cuboid";
        case PrimitiveKind::plane: return "plane";
        case PrimitiveKind::envelope: return "envelope";
    }
    return "?";
}

std::size_t minimal_sample_size(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::plane: return 3;
        case PrimitiveKind::sphere: return 4;
        case PrimitiveKind::cylinder: return 6;
        case PrimitiveKind::cuboid: return 8;
        case PrimitiveKind::envelope: return 4;
    }
    return 3;
}

FitResult fit_plane(const PointCloud& cloud) {
    require_points(cloud, 3, "fit_plane");
    const PcaResult p = pca(cloud.points);
    if (std::sqrt(p.eigenvalues[1]) <= kRankTol)
        throw DegenerateInput("fit_plane: points are collinear");

    Vec3 n = p.eigenvectors[0];  // smallest principal direction
    double offset = n.dot(p.mean);

    // Normal toward the side with fewer points; tie toward +z.
    std::size_t pos = 0, neg = 0;
    for (const Point3& q : cloud.points) {
        const double d = n.dot(q) - offset;
        if (d > 0.0) ++pos;
        else if (d < 0.0) ++neg;
    }
    if (pos > neg || (pos == neg && prefer_up(n).dot(n) < 0.0)) {
        n = -n;
        offset = -offset;
    }

    const double ss = kernels::sum_sq_plane_residuals(cloud.points, n, offset);
    return {Plane{UnitVec3::from(n), offset}, std::sqrt(ss / static_cast<double>(cloud.size())),
            1.0};
}

FitResult fit_sphere(const PointCloud& cloud) {
    require_points(cloud, 4, "fit_sphere");
    // |p|^2 = 2 p.c + rho with rho = r^2 - |c|^2, solved in the normal equations.
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
    for (const Point3& p : cloud.points) {
        const Eigen::Vector4d row(2.0 * p.x, 2.0 * p.y, 2.0 * p.z, 1.0);
        m += row * row.transpose();
        rhs += row * p.squared_norm();
    }
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
    if (!lu.isInvertible()) throw DegenerateInput("fit_sphere: points are coplanar");
    const Eigen::Vector4d sol = lu.solve(rhs);
    const Vec3 center{sol(0), sol(1), sol(2)};
    const double r2 = sol(3) + center.squared_norm();
    if (!(r2 > 0.0)) throw DegenerateInput("fit_sphere: negative squared radius");
    const double radius = std::sqrt(r2);

    const double ss = kernels::sum_sq_sphere_residuals(cloud.points, center, radius);
    return {Sphere{center, radius}, std::sqrt(ss / static_cast<double>(cloud.size())), 1.0};
}

FitResult fit_cylinder(const PointCloud& cloud) {
    require_points(cloud, 6, "fit_cylinder");
    const PcaResult p = pca(cloud.points);
    Vec3 dir = p.eigenvectors[2];  // dominant direction
    Vec3 axis_point = p.mean;

    // Frame perpendicular to the initial axis for the refinement parameters.
    const Vec3 ref = std::abs(dir.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 e1 = dir.cross(ref).normalized();
    const Vec3 e2 = dir.cross(e1);

    const std::size_t n = cloud.size();
    double radius = 0.0;
    for (const Point3& q : cloud.points) radius += radial_distance(q, axis_point, dir);
    radius /= static_cast<double>(n);

    // One Gauss-Newton pass over (u, v, a, b, r): axis point mu + u e1 + v e2,
    // direction dir + a e1 + b e2 (renormalized), radial residuals.
    {
        auto residual = [&](const Eigen::Matrix<double, 5, 1>& beta, std::size_t i) {
            const Vec3 q0 = axis_point + e1 * beta(0) + e2 * beta(1);
            const Vec3 d = (dir + e1 * beta(2) + e2 * beta(3)).normalized();
            return radial_distance(cloud.points[i], q0, d) - (radius + beta(4));
        };
        Eigen::Matrix<double, 5, 5> jtj = Eigen::Matrix<double, 5, 5>::Zero();
        Eigen::Matrix<double, 5, 1> jtr = Eigen::Matrix<double, 5, 1>::Zero();
        const double h = 1e-7;
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Matrix<double, 5, 1> beta = Eigen::Matrix<double, 5, 1>::Zero();
            const double r0 = residual(beta, i);
            Eigen::Matrix<double, 5, 1> grad;
            for (int k = 0; k < 5; ++k) {
                beta(k) = h;
                const double rp = residual(beta, i);
                beta(k) = -h;
                const double rm = residual(beta, i);
                beta(k) = 0.0;
                grad(k) = (rp - rm) / (2.0 * h);
            }
            jtj += grad * grad.transpose();
            jtr += grad * r0;
        }
        const Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(jtj);
        if (lu.isInvertible()) {
            const Eigen::Matrix<double, 5, 1> delta = lu.solve(-jtr);
            if (delta.allFinite()) {
                axis_point = axis_point + e1 * delta(0) + e2 * delta(1);
                dir = (dir + e1 * delta(2) + e2 * delta(3)).normalized();
            }
        }
    }

    dir = prefer_up(dir);
    radius = 0.0;
    for (const Point3& q : cloud.points) radius += radial_distance(q, axis_point, dir);
    radius /= static_cast<double>(n);
    if (!(radius > 0.0)) throw DegenerateInput("fit_cylinder: zero radius");

    double lo, hi;
    kernels::projection_range(cloud.points, axis_point, dir, lo, hi);
    const double height = hi - lo;
    if (height < 2.0 * RansacConfig{}.inlier_threshold)
        throw DegenerateInput("fit_cylinder: axial extent too small (disk, not cylinder)");

    const Cylinder cyl{axis_point + dir * lo, UnitVec3::from(dir), radius, height};
    return {cyl, fit_residual(cloud, cyl), 1.0};
}

FitResult fit_cuboid(const PointCloud& cloud) {
    require_points(cloud, 8, "fit_cuboid");
    const PcaResult p = pca(cloud.points);
    if (std::sqrt(p.eigenvalues[0]) <= kRankTol)
        throw DegenerateInput("fit_cuboid: covariance rank < 3");

    // Descending eigenvalue order, right-handed frame with canonical signs.
    const Vec3 e1 = canonical_sign(p.eigenvectors[2]);
    const Vec3 e2 = canonical_sign(p.eigenvectors[1]);
    const Vec3 e3 = e1.cross(e2);

    const std::array<Vec3, 3> axes{e1, e2, e3};
    Vec3 he{}, mid{};
    Point3 center = p.mean;
    for (int k = 0; k < 3; ++k) {
        double lo, hi;
        kernels::projection_range(cloud.points, p.mean, axes[k], lo, hi);
        (&he.x)[k] = 0.5 * (hi - lo);
        (&mid.x)[k] = 0.5 * (hi + lo);
        center += axes[k] * (&mid.x)[k];
    }
    if (!(he.x > 0.0 && he.y > 0.0 && he.z > 0.0))
        throw DegenerateInput("fit_cuboid: flat cloud");

    const Cuboid box{center, he, Quat::from_matrix(Mat3::from_columns(e1, e2, e3))};
    return {box, fit_residual(cloud, box), 1.0};
}

FitResult fit_envelope(const PointCloud& cloud) {
    require_points(cloud, 4, "fit_envelope");
    // rmse is 0 by definition: the envelope contains every input point.
    return {make_envelope(cloud.points), 0.0, 1.0};
}

FitResult fit_kind(PrimitiveKind kind, const PointCloud& cloud) {
    switch (kind) {
        case PrimitiveKind::sphere: return fit_sphere(cloud);
        case PrimitiveKind::cylinder: return fit_cylinder(cloud);
        case PrimitiveKind::cuboid: return fit_cuboid(cloud);
        case PrimitiveKind::plane: return fit_plane(cloud);
        case PrimitiveKind::envelope: return fit_envelope(cloud);
    }
    throw DegenerateInput("fit_kind: unknown kind");
}

namespace {

std::size_t count_inliers(const PointCloud& cloud, const GeometricPrimitive& prim, double tol) {
    if (const auto* s = std::get_if<Sphere>(&prim))
        return kernels::count_sphere_inliers(cloud.points, s->center, s->radius, tol);
    if (const auto* pl = std::get_if<Plane>(&prim))
        return kernels::count_plane_inliers(cloud.points, pl->normal.vec(), pl->offset, tol);
    if (const auto* cy = std::get_if<Cylinder>(&prim))
        return kernels::count_cylinder_inliers(cloud.points, cy->axis_point, cy->axis_dir.vec(),
                                               cy->radius, tol);
    std::size_t c = 0;
    for (const Point3& p : cloud.points)
        if (std::abs(distance_to_primitive(p, prim)) <= tol) ++c;
    return c;
}

void fill_inlier_mask(const PointCloud& cloud, const GeometricPrimitive& prim, double tol,
                      std::vector<std::uint8_t>& mask) {
    mask.assign(cloud.size(), 0);
    const auto* cy = std::get_if<Cylinder>(&prim);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        // cylinder consensus is radial-only, matching the counting kernel
        const double d = cy ? radial_distance(cloud.points[i], cy->axis_point, cy->axis_dir.vec()) -
                                  cy->radius
                            : distance_to_primitive(cloud.points[i], prim);
        mask[i] = std::abs(d) <= tol ? 1 : 0;
    }
}

}  // namespace

RobustFitResult robust_fit(const PointCloud& cloud, PrimitiveKind kind, const RansacConfig& cfg) {
    const std::size_t k = minimal_sample_size(kind);
    require_points(cloud, k, "robust_fit");
    if (cfg.max_iterations < 1 || !(cfg.inlier_threshold > 0.0))
        throw DegenerateInput("robust_fit: invalid config");

    const std::size_t n = cloud.size();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::optional<GeometricPrimitive> best;
    std::size_t best_count = 0;

    PointCloud sample;
    sample.points.resize(k);
    std::vector<std::size_t> idx(k);
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            std::size_t candidate;
            bool dup;
            do {
                candidate = pick(rng);
                dup = false;
                for (std::size_t q = 0; q < j; ++q)
                    if (idx[q] == candidate) dup = true;
            } while (dup);
            idx[j] = candidate;
            sample.points[j] = cloud.points[candidate];
        }
        GeometricPrimitive hypothesis;
        try {
            hypothesis = fit_kind(kind, sample).primitive;
        } catch (const Error&) {
            continue;  // degenerate minimal sample
        }
        const std::size_t c = count_inliers(cloud, hypothesis, cfg.inlier_threshold);
        if (c > best_count) {
            best_count = c;
            best = hypothesis;
        }
    }

    const double fraction = static_cast<double>(best_count) / static_cast<double>(n);
    if (!best || fraction < cfg.min_inlier_fraction)
        throw InsufficientConsensus("robust_fit: best inlier fraction " +
                                    std::to_string(fraction) + " below " +
                                    std::to_string(cfg.min_inlier_fraction));

    RobustFitResult out;
    fill_inlier_mask(cloud, *best, cfg.inlier_threshold, out.inlier_mask);

    PointCloud inliers;
    inliers.points.reserve(best_count);
    for (std::size_t i = 0; i < n; ++i)
        if (out.inlier_mask[i]) inliers.points.push_back(cloud.points[i]);

    GeometricPrimitive final_prim = *best;
    try {
        final_prim = fit_kind(kind, inliers).primitive;
    } catch (const Error&) {
        // refit can degenerate on thin inlier sets; keep the hypothesis
    }
    out.fit.primitive = final_prim;
    out.fit.rmse = fit_residual(inliers, final_prim);
    out.fit.inlier_fraction = fraction;
    return out;
}

HingeAxis derive_hinge(const Cuboid& panel, const Cylinder& handle, const UnitVec3& vertical) {
    const Mat3 r = panel.orientation.to_matrix();
    const std::array<Vec3, 3> axes{r.col(0), r.col(1), r.col(2)};
    const std::array<double, 3> he{panel.half_extents.x, panel.half_extents.y,
                                   panel.half_extents.z};

    // Face normal is the smallest extent; the other two span the door face.
    int k_n = 0;
    for (int k = 1; k < 3; ++k)
        if (he[k] < he[k_n]) k_n = k;
    const int k_a = (k_n + 1) % 3, k_b = (k_n + 2) % 3;

    const Point3 handle_mid = handle.axis_point + handle.axis_dir.vec() * (0.5 * handle.height);
    const Vec3 local = handle_mid - panel.center;
    for (int k = 0; k < 3; ++k)
        if (std::abs(local.dot(axes[k])) > 1.5 * std::max(he[k], 0.05) + 0.25)
            throw DegenerateInput("derive_hinge: handle too far from panel");

    // In-face axis most aligned with `vertical` carries the hinge direction.
    const int k_v = std::abs(axes[k_a].dot(vertical.vec())) >= std::abs(axes[k_b].dot(vertical.vec()))
                        ? k_a
                        : k_b;
    const int k_h = k_v == k_a ? k_b : k_a;

    const double off = local.dot(axes[k_h]);
    const double d_pos = std::abs(off - he[k_h]);
    const double d_neg = std::abs(off + he[k_h]);
    if (std::abs(d_pos - d_neg) < 0.01)
        throw AmbiguousHinge("derive_hinge: handle equidistant from both vertical edges");
    const double edge_sign = d_pos > d_neg ? 1.0 : -1.0;

    // Re-orthogonalize the vertical against the panel's horizontal and normal.
    Vec3 dir = vertical.vec() - axes[k_h] * vertical.dot(axes[k_h]) -
               axes[k_n] * vertical.dot(axes[k_n]);
    if (dir.norm() < 1e-9) dir = axes[k_v];
    dir = dir.normalized();
    if (dir.dot(vertical.vec()) < 0.0) dir = -dir;

    return HingeAxis{panel.center + axes[k_h] * (edge_sign * he[k_h]), UnitVec3::from(dir),
                     {0.0, kPi / 2}};
}

double fit_residual(const PointCloud& cloud, const GeometricPrimitive& prim) {
    if (cloud.empty()) throw DegenerateInput("fit_residual: empty cloud");
    double ss = 0.0;
    if (const auto* s = std::get_if<Sphere>(&prim)) {
        ss = kernels::sum_sq_sphere_residuals(cloud.points, s->center, s->radius);
    } else if (const auto* pl = std::get_if<Plane>(&prim)) {
        ss = kernels::sum_sq_plane_residuals(cloud.points, pl->normal.vec(), pl->offset);
    } else {
        for (const Point3& p : cloud.points) {
            const double d = distance_to_primitive(p, prim);
            ss += d * d;
        }
    }
    return std::sqrt(ss / static_cast<double>(cloud.size()));
}

}  // namespace geomcoder::fit
