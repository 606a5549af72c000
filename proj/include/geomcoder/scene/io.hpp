// File formats at the perception boundary:
//   - ASCII PLY point clouds (float x/y/z, optional uchar rgb, optional int label)
//   - depth: JSON header + 32-bit little-endian float raster
//   - masks: 16-bit binary PGM (P5, big-endian samples per Netpbm)
//   - bird's-eye map: JSON {origin, cell_size, width, height, cells}
#pragma once

#include <string>

#include "geomcoder/core/json.hpp"
#include "geomcoder/scene/scene.hpp"

namespace geomcoder::scene {

void write_ply(const std::string& path, const fit::PointCloud& cloud);
void write_labeled_ply(const std::string& path, const LabeledPointCloud& cloud);

fit::PointCloud read_ply(const std::string& path);
LabeledPointCloud read_labeled_ply(const std::string& path);

// Header JSON: {width, height, fx, fy, cx, cy, camera_pose, raster}, where
// `raster` names the .f32 file relative to the header's directory.
DepthFrame read_depth(const std::string& header_path);
void write_depth(const std::string& header_path, const std::string& raster_name,
                 const DepthFrame& frame);

SemanticMask read_pgm16(const std::string& path);
void write_pgm16(const std::string& path, const SemanticMask& mask);

json birdseye_to_json(const BirdsEyeMap& map);
BirdsEyeMap birdseye_from_json(const json& j);

}  // namespace geomcoder::scene
