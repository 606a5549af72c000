// Independent oracles, deliberately implemented with different algorithms
// than the library paths they check.
#pragma once

#include <array>
#include <cmath>
#include <deque>
#include <queue>
#include <vector>

#include "geomcoder/core/math.hpp"
#include "geomcoder/traj/curve.hpp"

namespace testsupport {

// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 (the library fits use
// Eigen's solver). Returns eigenvalues ascending with matching unit vectors.
struct Eig3 {
    std::array<double, 3> values;
    std::array<geomcoder::Vec3, 3> vectors;
};

inline Eig3 jacobi_eig3(double xx, double xy, double xz, double yy, double yz, double zz) {
    double a[3][3] = {{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}};
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Eig3 out;
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });
    for (int k = 0; k < 3; ++k) {
        out.values[k] = a[order[k]][order[k]];
        out.vectors[k] = geomcoder::Vec3{v[0][order[k]], v[1][order[k]], v[2][order[k]]};
    }
    return out;
}

inline Eig3 covariance_eig_oracle(const std::vector<geomcoder::Point3>& pts) {
    geomcoder::Vec3 mean{};
    for (const auto& p : pts) mean += p;
    mean = mean / static_cast<double>(pts.size());
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    for (const auto& p : pts) {
        const geomcoder::Vec3 d = p - mean;
        xx += d.x * d.x;
        xy += d.x * d.y;
        xz += d.x * d.z;
        yy += d.y * d.y;
        yz += d.y * d.z;
        zz += d.z * d.z;
    }
    const double n = static_cast<double>(pts.size());
    return jacobi_eig3(xx / n, xy / n, xz / n, yy / n, yz / n, zz / n);
}

// Direct linear sphere solve by Gaussian elimination with partial pivoting
// (the library uses Eigen's FullPivLU on the normal equations).
struct SphereOracle {
    geomcoder::Point3 center;
    double radius;
};

inline SphereOracle sphere_fit_oracle(const std::vector<geomcoder::Point3>& pts) {
    double m[4][5] = {};
    for (const auto& p : pts) {
        const double row[4] = {2.0 * p.x, 2.0 * p.y, 2.0 * p.z, 1.0};
        const double b = p.x * p.x + p.y * p.y + p.z * p.z;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) m[i][j] += row[i] * row[j];
            m[i][4] += row[i] * b;
        }
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        for (int j = 0; j < 5; ++j) std::swap(m[col][j], m[pivot][j]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int j = 0; j < 5; ++j) m[r][j] -= f * m[col][j];
        }
    }
    const geomcoder::Point3 c{m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2]};
    const double rho = m[3][4] / m[3][3];
    return {c, std::sqrt(rho + c.squared_norm())};
}

// Uniform-parameter polyline length (the library uses adaptive subdivision).
inline double polyline_length_oracle(const geomcoder::traj::Curve& curve, int samples) {
    double total = 0.0;
    geomcoder::Point3 prev = eval_curve(curve, 0.0);
    for (int i = 1; i <= samples; ++i) {
        const geomcoder::Point3 p = eval_curve(curve, static_cast<double>(i) / samples);
        total += (p - prev).norm();
        prev = p;
    }
    return total;
}

// Dijkstra with a priority queue (the library navigator is plain BFS).
// Returns the number of cells on the shortest path, or -1 if unreachable.
inline int grid_shortest_path_oracle(const std::vector<std::uint8_t>& blocked, int rows, int cols,
                                     std::pair<int, int> start, std::pair<int, int> goal) {
    auto idx = [&](int r, int c) { return static_cast<std::size_t>(r) * cols + c; };
    if (blocked[idx(goal.first, goal.second)] && start != goal) return -1;
    std::vector<int> dist(blocked.size(), -1);
    using Node = std::pair<int, std::pair<int, int>>;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> pq;
    dist[idx(start.first, start.second)] = 0;
    pq.push({0, start});
    const int dr[4] = {1, -1, 0, 0};
    const int dc[4] = {0, 0, 1, -1};
    while (!pq.empty()) {
        const auto [d, cell] = pq.top();
        pq.pop();
        if (d != dist[idx(cell.first, cell.second)]) continue;
        if (cell == goal) return d + 1;  // cells on path = edges + 1
        for (int k = 0; k < 4; ++k) {
            const int nr = cell.first + dr[k], nc = cell.second + dc[k];
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            if (blocked[idx(nr, nc)]) continue;
            if (dist[idx(nr, nc)] == -1 || dist[idx(nr, nc)] > d + 1) {
                dist[idx(nr, nc)] = d + 1;
                pq.push({d + 1, {nr, nc}});
            }
        }
    }
    return -1;
}

// Widest clear passage of a door at `angle`: distance from the far jamb to the
// panel segment, measured directly from the 2D geometry.
inline double door_passage_oracle(double panel_width, double angle) {
    // hinge at origin, far jamb at (W, 0), panel from origin to W*(cos a, sin a)
    const double px = panel_width * std::cos(angle);
    const double py = panel_width * std::sin(angle);
    const double qx = panel_width, qy = 0.0;
    // distance from (qx, qy) to segment (0,0)-(px,py)
    const double len2 = px * px + py * py;
    const double t = std::clamp((qx * px + qy * py) / len2, 0.0, 1.0);
    const double dx = qx - t * px, dy = qy - t * py;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace testsupport
