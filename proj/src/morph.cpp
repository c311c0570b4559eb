#include "vamorph/morph.hpp"

#include <algorithm>
#include <cmath>

#include "vamorph/errors.hpp"

namespace vamorph {

namespace {

// Slightly permissive barycentric inclusion so pixels on shared triangle
// edges are claimed by at least one side.
constexpr double kBaryEps = -1e-9;

std::uint8_t round_u8(double v) {
    const long r = std::lround(v);
    return static_cast<std::uint8_t>(std::clamp(r, 0L, 255L));
}

double sample_bilinear(const std::vector<double>& plane, int width, int height,
                       double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * plane[static_cast<std::size_t>(y0) * width + x0] +
                       fx * plane[static_cast<std::size_t>(y0) * width + x1];
    const double bot = (1.0 - fx) * plane[static_cast<std::size_t>(y1) * width + x0] +
                       fx * plane[static_cast<std::size_t>(y1) * width + x1];
    return (1.0 - fy) * top + fy * bot;
}

// Inverse-mapping warp into float planes (one per channel, row-major).
// Pixels outside every triangle stay 0.
std::vector<std::vector<double>> warp_planes(const RasterImage& img,
                                             const std::vector<Point2>& src_pts,
                                             const std::vector<Point2>& dst_pts,
                                             const TriangleMesh& mesh) {
    const int w = img.width;
    const int h = img.height;
    const int ch = img.channels;

    std::vector<std::vector<double>> src_planes(
        ch, std::vector<double>(static_cast<std::size_t>(w) * h));
    for (int c = 0; c < ch; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                src_planes[c][static_cast<std::size_t>(y) * w + x] =
                    img.at(x, y, c);

    std::vector<std::vector<double>> out(
        ch, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0));

    for (const auto& tri : mesh.triangles) {
        const Triangle dst_tri{dst_pts[tri[0]], dst_pts[tri[1]],
                               dst_pts[tri[2]]};
        const Triangle src_tri{src_pts[tri[0]], src_pts[tri[1]],
                               src_pts[tri[2]]};
        const double area2 = orient2d(dst_tri[0], dst_tri[1], dst_tri[2]);
        if (area2 == 0.0) continue;
        const AffineTransform inv = affine_from_triangles(dst_tri, src_tri);

        const int min_x = std::max(
            0, static_cast<int>(std::floor(
                   std::min({dst_tri[0].x, dst_tri[1].x, dst_tri[2].x}))));
        const int max_x = std::min(
            w - 1, static_cast<int>(std::ceil(
                       std::max({dst_tri[0].x, dst_tri[1].x, dst_tri[2].x}))));
        const int min_y = std::max(
            0, static_cast<int>(std::floor(
                   std::min({dst_tri[0].y, dst_tri[1].y, dst_tri[2].y}))));
        const int max_y = std::min(
            h - 1, static_cast<int>(std::ceil(
                       std::max({dst_tri[0].y, dst_tri[1].y, dst_tri[2].y}))));

        for (int y = min_y; y <= max_y; ++y) {
            for (int x = min_x; x <= max_x; ++x) {
                const Point2 p{static_cast<double>(x), static_cast<double>(y)};
                const double b0 = orient2d(dst_tri[1], dst_tri[2], p) / area2;
                const double b1 = orient2d(dst_tri[2], dst_tri[0], p) / area2;
                const double b2 = orient2d(dst_tri[0], dst_tri[1], p) / area2;
                if (b0 < kBaryEps || b1 < kBaryEps || b2 < kBaryEps) continue;
                const Point2 s = inv.apply(p);
                const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                for (int c = 0; c < ch; ++c)
                    out[c][idx] = sample_bilinear(src_planes[c], w, h, s.x, s.y);
            }
        }
    }
    return out;
}

void check_warp_inputs(const RasterImage& img,
                       const ExtendedLandmarkSet& src_lm,
                       const ExtendedLandmarkSet& dst_lm,
                       const TriangleMesh& mesh) {
    img.validate();
    if (src_lm.base.points.size() != dst_lm.base.points.size())
        throw ValidationError("source and destination landmark counts differ");
    if (mesh.vertices.size() != src_lm.base.points.size() + 8)
        throw ValidationError(
            "mesh has " + std::to_string(mesh.vertices.size()) +
            " vertices for " +
            std::to_string(src_lm.base.points.size() + 8) + " landmarks");
    if (img.width != src_lm.base.image_width ||
        img.height != src_lm.base.image_height)
        throw ValidationError("image dimensions do not match landmark frame");
}

}  // namespace

AffineTransform affine_from_triangles(const Triangle& src,
                                      const Triangle& dst) {
    const double det = orient2d(src[0], src[1], src[2]);
    if (std::abs(det) * 0.5 <= 1e-9)
        throw ComputeError("source triangle is degenerate (area " +
                           std::to_string(std::abs(det) * 0.5) + " px^2)");

    const double x0 = src[0].x, y0 = src[0].y;
    const double x1 = src[1].x, y1 = src[1].y;
    const double x2 = src[2].x, y2 = src[2].y;
    const double d = x0 * (y1 - y2) - y0 * (x1 - x2) + (x1 * y2 - x2 * y1);

    // a*x_i + b*y_i + c = u_i, solved by Cramer's rule per output coordinate.
    const auto solve_row = [&](double u0, double u1, double u2, double& ca,
                               double& cb, double& cc) {
        ca = (u0 * (y1 - y2) - y0 * (u1 - u2) + (u1 * y2 - u2 * y1)) / d;
        cb = (x0 * (u1 - u2) - u0 * (x1 - x2) + (x1 * u2 - x2 * u1)) / d;
        cc = (x0 * (y1 * u2 - y2 * u1) - y0 * (x1 * u2 - x2 * u1) +
              u0 * (x1 * y2 - x2 * y1)) / d;
    };

    AffineTransform t;
    solve_row(dst[0].x, dst[1].x, dst[2].x, t.a, t.b, t.c);
    solve_row(dst[0].y, dst[1].y, dst[2].y, t.d, t.e, t.f);
    return t;
}

RasterImage warp_piecewise(const RasterImage& img,
                           const ExtendedLandmarkSet& src_lm,
                           const ExtendedLandmarkSet& dst_lm,
                           const TriangleMesh& mesh) {
    check_warp_inputs(img, src_lm, dst_lm, mesh);
    const auto planes =
        warp_planes(img, src_lm.all_points(), dst_lm.all_points(), mesh);
    RasterImage out = RasterImage::create(img.width, img.height, img.channels);
    const int ch = img.channels;
    for (int c = 0; c < ch; ++c)
        for (std::size_t i = 0; i < planes[c].size(); ++i)
            out.samples[i * ch + c] = round_u8(planes[c][i]);
    return out;
}

MorphCheck misalignment_check(const ExtendedLandmarkSet& src_lm,
                              const ExtendedLandmarkSet& dst_lm,
                              const TriangleMesh& mesh) {
    const std::vector<Point2> src_pts = src_lm.all_points();
    const std::vector<Point2> dst_pts = dst_lm.all_points();
    if (src_pts.size() != dst_pts.size() ||
        mesh.vertices.size() != dst_pts.size())
        return {false, "landmark/mesh cardinality mismatch"};

    for (const auto& tri : mesh.triangles) {
        const double dst_area2 =
            orient2d(dst_pts[tri[0]], dst_pts[tri[1]], dst_pts[tri[2]]);
        if (std::abs(dst_area2) * 0.5 < 0.5)
            return {false, "degenerate triangle (" + std::to_string(tri[0]) +
                               "," + std::to_string(tri[1]) + "," +
                               std::to_string(tri[2]) + ")"};
        const double src_area2 =
            orient2d(src_pts[tri[0]], src_pts[tri[1]], src_pts[tri[2]]);
        if ((src_area2 > 0.0) != (dst_area2 > 0.0))
            return {false, "orientation flip (" + std::to_string(tri[0]) +
                               "," + std::to_string(tri[1]) + "," +
                               std::to_string(tri[2]) + ")"};
    }
    return {true, ""};
}

namespace {

struct WeightedSource {
    const RasterImage* img;
    const LandmarkSet* lm;
    double weight;
};

// Warps each positively weighted source into the target shape and blends in
// float space; values are rounded to 8-bit exactly once.
RasterImage blend_into_shape(const std::vector<WeightedSource>& sources,
                             const LandmarkSet& target_lm) {
    const ExtendedLandmarkSet target_ext = extend_with_boundary(target_lm);
    const std::vector<Point2> dst_pts = target_ext.all_points();
    TriangleMesh mesh;
    try {
        mesh = delaunay(dst_pts);
    } catch (const ValidationError& e) {
        throw MorphRejected(std::string("target shape untriangulable: ") +
                            e.what());
    }

    const RasterImage& first = *sources.front().img;
    const int w = first.width;
    const int h = first.height;
    const int ch = first.channels;

    std::vector<std::vector<double>> acc(
        ch, std::vector<double>(static_cast<std::size_t>(w) * h, 0.0));
    for (const WeightedSource& s : sources) {
        if (s.weight == 0.0) continue;
        s.img->validate();
        if (s.img->width != w || s.img->height != h || s.img->channels != ch)
            throw ValidationError("morph sources differ in shape");
        const ExtendedLandmarkSet src_ext = extend_with_boundary(*s.lm);
        const MorphCheck check = misalignment_check(src_ext, target_ext, mesh);
        if (!check.accepted) throw MorphRejected(check.reason);
        const auto planes =
            warp_planes(*s.img, src_ext.all_points(), dst_pts, mesh);
        for (int c = 0; c < ch; ++c)
            for (std::size_t i = 0; i < planes[c].size(); ++i)
                acc[c][i] += s.weight * planes[c][i];
    }

    RasterImage out = RasterImage::create(w, h, ch);
    for (int c = 0; c < ch; ++c)
        for (std::size_t i = 0; i < acc[c].size(); ++i)
            out.samples[i * ch + c] = round_u8(acc[c][i]);
    return out;
}

}  // namespace

std::pair<RasterImage, LandmarkSet> morph_pair(const RasterImage& img_a,
                                               const LandmarkSet& lm_a,
                                               const RasterImage& img_b,
                                               const LandmarkSet& lm_b,
                                               double w) {
    if (!(w >= 0.0 && w <= 1.0))
        throw ValidationError("morph weight must lie in [0,1], got " +
                              std::to_string(w));
    const LandmarkSet target = interpolate(lm_a, lm_b, w);
    RasterImage out = blend_into_shape(
        {{&img_a, &lm_a, 1.0 - w}, {&img_b, &lm_b, w}}, target);
    return {std::move(out), target};
}

std::pair<RasterImage, LandmarkSet> morph_grid_point(
    const RasterImage& neutral_img, const LandmarkSet& neutral_lm,
    const RasterImage& apex_a_img, const LandmarkSet& apex_a_lm,
    const RasterImage& apex_b_img, const LandmarkSet& apex_b_lm,
    const MorphPlan& plan) {
    const double t = plan.angle_weight;
    const double r = plan.intensity_weight;
    if (!(t >= 0.0 && t <= 1.0) || !(r >= 0.0 && r <= 1.0))
        throw ValidationError("morph plan weights must lie in [0,1]");
    const LandmarkSet target = combine3(neutral_lm, apex_a_lm, apex_b_lm, t, r);
    RasterImage out = blend_into_shape({{&neutral_img, &neutral_lm, 1.0 - r},
                                        {&apex_a_img, &apex_a_lm, r * (1.0 - t)},
                                        {&apex_b_img, &apex_b_lm, r * t}},
                                       target);
    return {std::move(out), target};
}

}  // namespace vamorph
