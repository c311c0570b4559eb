#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vamorph/geometry.hpp"

namespace vamorph {

inline constexpr std::size_t kLandmarkCount = 68;

// 68 fiducial points in pixel coordinates, origin top-left, each strictly
// inside [0, width) x [0, height).
struct LandmarkSet {
    std::vector<Point2> points;
    int image_width = 0;
    int image_height = 0;

    void validate() const;  // throws ValidationError naming the offending index
};

// Landmarks plus the 8 frame-rectangle points (corners clockwise from
// top-left, then edge midpoints top/right/bottom/left) so a triangulation
// covers the whole frame. Rectangle uses the inclusive max pixel coordinate
// (width-1, height-1).
struct ExtendedLandmarkSet {
    LandmarkSet base;
    std::array<Point2, 8> boundary;

    std::vector<Point2> all_points() const;  // 76 points, base order then boundary
};

LandmarkSet parse_landmarks(std::string_view json_text, int image_width,
                            int image_height);
std::string landmarks_to_json(const LandmarkSet& lm);

LandmarkSet interpolate(const LandmarkSet& a, const LandmarkSet& b, double w);

// (1-r)*N + r*[(1-t)*A + t*B], composed as interpolate(N, interpolate(A,B,t), r).
LandmarkSet combine3(const LandmarkSet& n, const LandmarkSet& a,
                     const LandmarkSet& b, double t, double r);

ExtendedLandmarkSet extend_with_boundary(const LandmarkSet& lm);

}  // namespace vamorph
