#pragma once

#include <array>
#include <cmath>

namespace vamorph {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
};

// Twice the signed area of (a, b, c); positive when CCW in a y-up frame.
inline double orient2d(Point2 a, Point2 b, Point2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline double triangle_area(Point2 a, Point2 b, Point2 c) {
    return 0.5 * std::abs(orient2d(a, b, c));
}

inline double signed_triangle_area(Point2 a, Point2 b, Point2 c) {
    return 0.5 * orient2d(a, b, c);
}

using Triangle = std::array<Point2, 3>;

}  // namespace vamorph
