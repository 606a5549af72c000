#include "geomcoder/render/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "geomcoder/geom/ops.hpp"

namespace geomcoder::render {

namespace {

constexpr double kScale = 200.0;  // px per meter
constexpr double kPad = 0.25;     // meters of margin around the content

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(double x, double y) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
    void add(const Point3& p) { add(p.x, p.y); }
    bool valid() const { return min_x <= max_x; }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

class Canvas {
public:
    explicit Canvas(const Bounds& b)
        : min_x_(b.min_x - kPad), max_y_(b.max_y + kPad),
          width_((b.max_x - b.min_x + 2 * kPad) * kScale),
          height_((b.max_y - b.min_y + 2 * kPad) * kScale) {}

    double px(double x) const { return (x - min_x_) * kScale; }
    double py(double y) const { return (max_y_ - y) * kScale; }  // y-up world, y-down SVG

    std::string header() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) +
               "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " +
               fmt(height_) + "\">\n";
    }

    void circle(std::string& out, const Point3& c, double r, const char* style) const {
        out += "  <circle cx=\"" + fmt(px(c.x)) + "\" cy=\"" + fmt(py(c.y)) + "\" r=\"" +
               fmt(r * kScale) + "\" " + style + "/>\n";
    }

    void polygon(std::string& out, std::span<const Point3> pts, const char* style) const {
        out += "  <polygon points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out += ' ';
            out += fmt(px(pts[i].x)) + "," + fmt(py(pts[i].y));
        }
        out += std::string("\" ") + style + "/>\n";
    }

    void polyline(std::string& out, std::span<const Point3> pts, const char* style) const {
        out += "  <polyline points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out += ' ';
            out += fmt(px(pts[i].x)) + "," + fmt(py(pts[i].y));
        }
        out += std::string("\" ") + style + "/>\n";
    }

private:
    double min_x_, max_y_, width_, height_;
};

constexpr const char* kObstacleStyle = "fill=\"#d9d2c4\" stroke=\"#8a8272\" stroke-width=\"1\"";
constexpr const char* kDoorStyle = "fill=\"#c9a46a\" stroke=\"#7c5a2e\" stroke-width=\"1\"";
constexpr const char* kObjectStyle = "fill=\"#7fae7f\" stroke=\"#3f6f3f\" stroke-width=\"1\"";
constexpr const char* kStainStyle = "fill=\"#b5651d\" fill-opacity=\"0.5\" stroke=\"none\"";
constexpr const char* kCurveStyle =
    "fill=\"none\" stroke=\"#2255cc\" stroke-width=\"2\" stroke-linecap=\"round\"";

std::vector<Point3> footprint(const GeometricPrimitive& prim) {
    // Top-down outline vertices; circles are handled separately.
    if (const auto* cb = std::get_if<Cuboid>(&prim)) {
        const Mat3 r = cb->orientation.to_matrix();
        std::vector<Point3> out;
        const double sx[4] = {1, 1, -1, -1};
        const double sy[4] = {1, -1, -1, 1};
        for (int k = 0; k < 4; ++k)
            out.push_back(cb->center + r.col(0) * (sx[k] * cb->half_extents.x) +
                          r.col(1) * (sy[k] * cb->half_extents.y));
        return out;
    }
    if (const auto* env = std::get_if<ConvexEnvelope>(&prim)) {
        // 2D hull of the projected vertices (monotone chain).
        std::vector<Point3> pts = env->vertices;
        std::sort(pts.begin(), pts.end(), [](const Point3& a, const Point3& b) {
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        auto cross2 = [](const Point3& o, const Point3& a, const Point3& b) {
            return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        };
        std::vector<Point3> hull;
        for (int pass = 0; pass < 2; ++pass) {
            const std::size_t base = hull.size();
            for (const Point3& p : pts) {
                while (hull.size() >= base + 2 &&
                       cross2(hull[hull.size() - 2], hull.back(), p) <= 0)
                    hull.pop_back();
                hull.push_back(p);
            }
            hull.pop_back();
            std::reverse(pts.begin(), pts.end());
        }
        return hull;
    }
    return {};
}

void draw_primitive(const Canvas& canvas, std::string& out, const GeometricPrimitive& prim,
                    const char* style) {
    if (const auto* s = std::get_if<Sphere>(&prim)) {
        canvas.circle(out, s->center, s->radius, style);
        return;
    }
    if (const auto* cy = std::get_if<Cylinder>(&prim)) {
        canvas.circle(out, primitive_center(prim), cy->radius, style);
        return;
    }
    const std::vector<Point3> poly = footprint(prim);
    if (!poly.empty()) canvas.polygon(out, poly, style);
}

void add_primitive_bounds(Bounds& b, const GeometricPrimitive& prim) {
    if (const auto* s = std::get_if<Sphere>(&prim)) {
        b.add(s->center.x - s->radius, s->center.y - s->radius);
        b.add(s->center.x + s->radius, s->center.y + s->radius);
        return;
    }
    if (const auto* cy = std::get_if<Cylinder>(&prim)) {
        const Point3 c = primitive_center(prim);
        b.add(c.x - cy->radius, c.y - cy->radius);
        b.add(c.x + cy->radius, c.y + cy->radius);
        return;
    }
    for (const Point3& p : footprint(prim)) b.add(p);
}

std::vector<Point3> curve_polyline(const traj::Curve& curve) {
    std::vector<Point3> pts;
    constexpr int kSamples = 128;
    for (int i = 0; i <= kSamples; ++i)
        pts.push_back(eval_curve(curve, static_cast<double>(i) / kSamples));
    return pts;
}

}  // namespace

std::string curve_svg(const traj::Curve& curve, std::span<const GeometricPrimitive> obstacles) {
    Bounds b;
    const std::vector<Point3> pts = curve_polyline(curve);
    for (const Point3& p : pts) b.add(p);
    for (const GeometricPrimitive& o : obstacles) add_primitive_bounds(b, o);
    if (!b.valid()) b.add(0, 0);

    const Canvas canvas(b);
    std::string out = canvas.header();
    for (const GeometricPrimitive& o : obstacles) draw_primitive(canvas, out, o, kObstacleStyle);
    canvas.polyline(out, pts, kCurveStyle);
    out += "</svg>\n";
    return out;
}

std::string scene_svg(const sim::SceneWorld& world, std::span<const traj::Curve> curves) {
    Bounds b;
    for (const GeometricPrimitive& o : world.static_obstacles) add_primitive_bounds(b, o);
    for (const sim::Door& d : world.doors)
        add_primitive_bounds(b, d.panel_at(d.angle));
    for (const sim::Drawer& d : world.drawers) add_primitive_bounds(b, d.body_at(d.extension));
    for (const sim::FreeObject& f : world.free_objects) add_primitive_bounds(b, f.primitive);
    b.add(world.robot_start_x, world.robot_start_y);
    if (!b.valid()) b.add(0, 0);

    const Canvas canvas(b);
    std::string out = canvas.header();
    for (const GeometricPrimitive& o : world.static_obstacles)
        draw_primitive(canvas, out, o, kObstacleStyle);
    for (const sim::Door& d : world.doors) {
        draw_primitive(canvas, out, d.panel_at(d.angle), kDoorStyle);
        draw_primitive(canvas, out, d.handle_at(d.angle), kDoorStyle);
    }
    for (const sim::Drawer& d : world.drawers) {
        draw_primitive(canvas, out, d.body_at(d.extension), kDoorStyle);
        draw_primitive(canvas, out, d.handle_at(d.extension), kDoorStyle);
    }
    for (const sim::Stain& s : world.stains) draw_primitive(canvas, out, s.patch, kStainStyle);
    for (const sim::FreeObject& f : world.free_objects)
        draw_primitive(canvas, out, f.primitive, kObjectStyle);
    canvas.circle(out, Point3{world.robot_start_x, world.robot_start_y, 0}, 0.05,
                  "fill=\"#cc3333\" stroke=\"none\"");
    for (const traj::Curve& c : curves) canvas.polyline(out, curve_polyline(c), kCurveStyle);
    out += "</svg>\n";
    return out;
}

std::string map_svg(const scene::BirdsEyeMap& map) {
    Bounds b;
    b.add(map.origin_x, map.origin_y);
    b.add(map.origin_x + map.width * map.cell_size, map.origin_y + map.height * map.cell_size);
    const Canvas canvas(b);
    std::string out = canvas.header();
    for (int row = 0; row < map.height; ++row) {
        for (int col = 0; col < map.width; ++col) {
            const int label = map.at(row, col);
            if (label == 0) continue;
            const double x0 = map.origin_x + col * map.cell_size;
            const double y0 = map.origin_y + row * map.cell_size;
            // stable per-label hue
            const int hue = (label * 67) % 360;
            char style[96];
            std::snprintf(style, sizeof(style), "fill=\"hsl(%d,45%%,55%%)\" stroke=\"none\"", hue);
            const Point3 quad[4] = {{x0, y0, 0},
                                    {x0 + map.cell_size, y0, 0},
                                    {x0 + map.cell_size, y0 + map.cell_size, 0},
                                    {x0, y0 + map.cell_size, 0}};
            canvas.polygon(out, quad, style);
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace geomcoder::render
