#pragma once

#include <array>
#include <span>
#include <vector>

#include "vamorph/geometry.hpp"

namespace vamorph {

struct TriangleMesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;

    Triangle triangle_points(std::size_t t) const {
        const auto& tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }
};

// Delaunay triangulation of the input points (empty open circumdisks, up to
// cocircular ties). Deterministic: triangles come out with the smallest
// vertex index first, positively oriented, sorted lexicographically, and
// cocircular ties resolved toward the lexicographically smallest
// (min-index, max-index) diagonal. Throws ValidationError on duplicate
// points (naming both indices), all-collinear input, fewer than 3 points,
// or non-finite coordinates.
TriangleMesh delaunay(std::span<const Point2> points);

}  // namespace vamorph
