#pragma once

#include <string>
#include <utility>

#include "vamorph/delaunay.hpp"
#include "vamorph/image.hpp"
#include "vamorph/landmarks.hpp"
#include "vamorph/va_space.hpp"

namespace vamorph {

// Affine map (x,y) -> (a*x + b*y + c, d*x + e*y + f).
struct AffineTransform {
    double a = 1, b = 0, c = 0;
    double d = 0, e = 1, f = 0;

    Point2 apply(Point2 p) const {
        return {a * p.x + b * p.y + c, d * p.x + e * p.y + f};
    }
};

// Exact 3-point correspondence via the 6-unknown linear solve. Throws
// ComputeError when the source triangle is degenerate (area <= 1e-9 px^2).
AffineTransform affine_from_triangles(const Triangle& src, const Triangle& dst);

// Inverse-maps each output pixel inside a destination triangle to the source
// image and samples bilinearly with edge clamping. The mesh must be built on
// the dst landmark configuration; output dimensions equal the input's.
RasterImage warp_piecewise(const RasterImage& img,
                           const ExtendedLandmarkSet& src_lm,
                           const ExtendedLandmarkSet& dst_lm,
                           const TriangleMesh& mesh);

struct MorphCheck {
    bool accepted = true;
    std::string reason;
};

// Screens a planned warp: rejects when any destination triangle is
// degenerate (area < 0.5 px^2) or any triangle's orientation flips between
// the source and destination vertex configurations.
MorphCheck misalignment_check(const ExtendedLandmarkSet& src_lm,
                              const ExtendedLandmarkSet& dst_lm,
                              const TriangleMesh& mesh);

// Cross-dissolve of two expressions at blend weight w: landmarks are the
// convex combination, both images are warped into that shape and mixed
// (1-w):w, rounded half away from zero. Throws MorphRejected when the
// misalignment screen fails.
std::pair<RasterImage, LandmarkSet> morph_pair(const RasterImage& img_a,
                                               const LandmarkSet& lm_a,
                                               const RasterImage& img_b,
                                               const LandmarkSet& lm_b,
                                               double w);

// Three-way synthesis for one grid point: target shape via combine3(t, r),
// pixel blend weights (1-r), r*(1-t), r*t for neutral/apex_a/apex_b.
// Zero-weight sources are neither warped nor screened.
std::pair<RasterImage, LandmarkSet> morph_grid_point(
    const RasterImage& neutral_img, const LandmarkSet& neutral_lm,
    const RasterImage& apex_a_img, const LandmarkSet& apex_a_lm,
    const RasterImage& apex_b_img, const LandmarkSet& apex_b_lm,
    const MorphPlan& plan);

}  // namespace vamorph
