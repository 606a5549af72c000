#include "geomcoder/scene/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geomcoder/core/error.hpp"

namespace geomcoder::scene {

namespace {

struct PlyHeader {
    std::size_t vertex_count = 0;
    std::vector<std::string> properties;  // in declaration order
};

PlyHeader parse_ply_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != "ply") throw ParseError(path + ": not a PLY file");
    PlyHeader h;
    bool in_vertex = false;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "end_header") return h;
        if (tok == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt != "ascii") throw ParseError(path + ": only ascii PLY is supported");
        } else if (tok == "element") {
            std::string name;
            std::size_t count;
            ss >> name >> count;
            in_vertex = (name == "vertex");
            if (in_vertex) h.vertex_count = count;
        } else if (tok == "property" && in_vertex) {
            std::string type, name;
            ss >> type >> name;
            if (type == "list") throw ParseError(path + ": list properties unsupported");
            h.properties.push_back(name);
        }
    }
    throw ParseError(path + ": missing end_header");
}

int prop_index(const PlyHeader& h, const std::string& name) {
    for (std::size_t i = 0; i < h.properties.size(); ++i)
        if (h.properties[i] == name) return static_cast<int>(i);
    return -1;
}

void read_ply_rows(const std::string& path, fit::PointCloud* cloud, LabeledPointCloud* labeled) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    const PlyHeader h = parse_ply_header(in, path);
    const int ix = prop_index(h, "x"), iy = prop_index(h, "y"), iz = prop_index(h, "z");
    const int il = prop_index(h, "label");
    const int ir = prop_index(h, "red"), ig = prop_index(h, "green"), ib = prop_index(h, "blue");
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError(path + ": missing x/y/z properties");
    if (labeled && il < 0) throw ParseError(path + ": missing label property");

    const bool with_color = cloud && ir >= 0 && ig >= 0 && ib >= 0;
    if (with_color) cloud->colors.emplace();

    std::vector<double> row(h.properties.size());
    for (std::size_t r = 0; r < h.vertex_count; ++r) {
        for (double& v : row)
            if (!(in >> v)) throw ParseError(path + ": truncated vertex data");
        const Point3 p{row[ix], row[iy], row[iz]};
        if (cloud) {
            cloud->points.push_back(p);
            if (with_color)
                cloud->colors->push_back({static_cast<std::uint8_t>(row[ir]),
                                          static_cast<std::uint8_t>(row[ig]),
                                          static_cast<std::uint8_t>(row[ib])});
        }
        if (labeled) {
            labeled->points.push_back(p);
            labeled->labels.push_back(static_cast<int>(row[il]));
        }
    }
}

}  // namespace

void write_ply(const std::string& path, const fit::PointCloud& cloud) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    const bool color = cloud.colors.has_value();
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty float x\nproperty float y\nproperty float z\n";
    if (color) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z);
        if (color) {
            const auto& c = (*cloud.colors)[i];
            out << ' ' << int(c[0]) << ' ' << int(c[1]) << ' ' << int(c[2]);
        }
        out << '\n';
    }
}

void write_labeled_ply(const std::string& path, const LabeledPointCloud& cloud) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nproperty int label\n"
        << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Point3& p = cloud.points[i];
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << ' '
            << cloud.labels[i] << '\n';
    }
}

fit::PointCloud read_ply(const std::string& path) {
    fit::PointCloud cloud;
    read_ply_rows(path, &cloud, nullptr);
    return cloud;
}

LabeledPointCloud read_labeled_ply(const std::string& path) {
    LabeledPointCloud cloud;
    read_ply_rows(path, nullptr, &cloud);
    return cloud;
}

DepthFrame read_depth(const std::string& header_path) {
    const json j = load_json_file(header_path);
    DepthFrame f;
    f.width = static_cast<int>(require_number(j, "width", "depth header"));
    f.height = static_cast<int>(require_number(j, "height", "depth header"));
    f.fx = require_number(j, "fx", "depth header");
    f.fy = require_number(j, "fy", "depth header");
    f.cx = require_number(j, "cx", "depth header");
    f.cy = require_number(j, "cy", "depth header");
    f.camera_pose = transform_from_json(require_field(j, "camera_pose", "depth header"),
                                        "depth header.camera_pose");
    if (f.width <= 0 || f.height <= 0 || f.fx <= 0 || f.fy <= 0 || f.cx < 0 ||
        f.cx >= f.width || f.cy < 0 || f.cy >= f.height)
        throw SchemaError("depth header: invalid intrinsics");

    const std::string raster = require_field(j, "raster", "depth header").get<std::string>();
    const auto raster_path = std::filesystem::path(header_path).parent_path() / raster;
    std::ifstream in(raster_path, std::ios::binary);
    if (!in) throw ParseError("cannot open raster " + raster_path.string());
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    f.depth.resize(n);
    in.read(reinterpret_cast<char*>(f.depth.data()), static_cast<std::streamsize>(n * 4));
    if (static_cast<std::size_t>(in.gcount()) != n * 4)
        throw ParseError(raster_path.string() + ": raster shorter than width*height floats");
    // raster is little-endian on disk; this artifact targets little-endian hosts
    for (float d : f.depth)
        if (d < 0.0f || !std::isfinite(d)) throw SchemaError("depth raster: negative or non-finite");
    return f;
}

void write_depth(const std::string& header_path, const std::string& raster_name,
                 const DepthFrame& frame) {
    json j{{"width", frame.width},   {"height", frame.height}, {"fx", frame.fx},
           {"fy", frame.fy},         {"cx", frame.cx},         {"cy", frame.cy},
           {"camera_pose", to_json(frame.camera_pose)},        {"raster", raster_name}};
    save_json_file(header_path, j);
    const auto raster_path = std::filesystem::path(header_path).parent_path() / raster_name;
    std::ofstream out(raster_path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + raster_path.string());
    out.write(reinterpret_cast<const char*>(frame.depth.data()),
              static_cast<std::streamsize>(frame.depth.size() * 4));
}

SemanticMask read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw ParseError(path + ": expected binary PGM (P5)");
    auto next_int = [&]() {
        // skip whitespace and # comments
        for (;;) {
            const int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v;
        if (!(in >> v)) throw ParseError(path + ": malformed PGM header");
        return v;
    };
    SemanticMask m;
    m.width = static_cast<int>(next_int());
    m.height = static_cast<int>(next_int());
    const long maxval = next_int();
    if (maxval != 65535) throw ParseError(path + ": expected 16-bit PGM (maxval 65535)");
    in.get();  // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    std::vector<unsigned char> raw(n * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw ParseError(path + ": truncated PGM data");
    m.label.resize(n);
    for (std::size_t i = 0; i < n; ++i)  // big-endian samples
        m.label[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    return m;
}

void write_pgm16(const std::string& path, const SemanticMask& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << "P5\n" << mask.width << " " << mask.height << "\n65535\n";
    for (std::uint16_t v : mask.label) {
        out.put(static_cast<char>(v >> 8));
        out.put(static_cast<char>(v & 0xff));
    }
}

json birdseye_to_json(const BirdsEyeMap& map) {
    return json{{"origin", json::array({map.origin_x, map.origin_y})},
                {"cell_size", map.cell_size},
                {"width", map.width},
                {"height", map.height},
                {"cells", map.cell_label}};
}

BirdsEyeMap birdseye_from_json(const json& j) {
    BirdsEyeMap m;
    const json& origin = require_field(j, "origin", "map");
    if (!origin.is_array() || origin.size() != 2) throw SchemaError("map.origin: expected [x, y]");
    m.origin_x = origin[0].get<double>();
    m.origin_y = origin[1].get<double>();
    m.cell_size = require_number(j, "cell_size", "map");
    m.width = static_cast<int>(require_number(j, "width", "map"));
    m.height = static_cast<int>(require_number(j, "height", "map"));
    if (!(m.cell_size > 0.0) || m.width <= 0 || m.height <= 0)
        throw SchemaError("map: invalid dimensions");
    const json& cells = require_field(j, "cells", "map");
    if (!cells.is_array() || cells.size() != static_cast<std::size_t>(m.width) * m.height)
        throw SchemaError("map.cells: expected width*height entries");
    m.cell_label.reserve(cells.size());
    for (const auto& c : cells) m.cell_label.push_back(c.get<int>());
    return m;
}

}  // namespace geomcoder::scene
