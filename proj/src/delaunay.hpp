#pragma once

#include <array>
#include <vector>

#include "magneu/geometry.hpp"

namespace magneu::detail {

/// Delaunay triangulation of a planar point set (convex hull covered).
/// Incremental insertion with recursive edge flips; cocircular ties are
/// treated as legal, so the result is a valid triangulation even for
/// points sampled on a circle. Throws MeshError on degenerate input.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points);

}  // namespace magneu::detail
