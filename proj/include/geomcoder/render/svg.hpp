// Top-down SVG rendering of scenes, maps, and trajectories. Output is a
// deterministic function of the inputs (no timestamps, fixed formatting).
#pragma once

#include <span>
#include <string>
#include <vector>

#include "geomcoder/scene/scene.hpp"
#include "geomcoder/sim/world.hpp"
#include "geomcoder/traj/curve.hpp"

namespace geomcoder::render {

std::string curve_svg(const traj::Curve& curve, std::span<const GeometricPrimitive> obstacles);

std::string scene_svg(const sim::SceneWorld& world, std::span<const traj::Curve> curves);

std::string map_svg(const scene::BirdsEyeMap& map);

}  // namespace geomcoder::render
