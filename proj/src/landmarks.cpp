#include "vamorph/landmarks.hpp"

#include <cmath>

#include <json.hpp>

#include "vamorph/errors.hpp"

namespace vamorph {

void LandmarkSet::validate() const {
    if (points.size() != kLandmarkCount)
        throw ValidationError("expected 68 points, got " +
                              std::to_string(points.size()));
    if (image_width <= 0 || image_height <= 0)
        throw ValidationError("landmark frame dimensions must be positive");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2& p = points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("landmark " + std::to_string(i) +
                                  " has a non-finite coordinate");
        if (p.x < 0.0 || p.x >= image_width || p.y < 0.0 ||
            p.y >= image_height)
            throw ValidationError(
                "landmark " + std::to_string(i) + " at (" +
                std::to_string(p.x) + ", " + std::to_string(p.y) +
                ") lies outside the " + std::to_string(image_width) + "x" +
                std::to_string(image_height) + " frame");
    }
}

std::vector<Point2> ExtendedLandmarkSet::all_points() const {
    std::vector<Point2> pts = base.points;
    pts.insert(pts.end(), boundary.begin(), boundary.end());
    return pts;
}

LandmarkSet parse_landmarks(std::string_view json_text, int image_width,
                            int image_height) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed landmark JSON: ") +
                              e.what());
    }
    if (!doc.is_array())
        throw ValidationError(
            "landmark document must be a JSON array of [x, y] pairs");

    LandmarkSet lm;
    lm.image_width = image_width;
    lm.image_height = image_height;
    if (doc.size() != kLandmarkCount)
        throw ValidationError("expected 68 points, got " +
                              std::to_string(doc.size()));
    lm.points.reserve(kLandmarkCount);
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& pair = doc[i];
        if (!pair.is_array() || pair.size() != 2 ||
            !pair[0].is_number() || !pair[1].is_number())
            throw ValidationError("landmark " + std::to_string(i) +
                                  " is not an [x, y] number pair");
        lm.points.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    lm.validate();
    return lm;
}

std::string landmarks_to_json(const LandmarkSet& lm) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Point2& p : lm.points)
        arr.push_back(nlohmann::ordered_json::array({p.x, p.y}));
    return arr.dump();
}

LandmarkSet interpolate(const LandmarkSet& a, const LandmarkSet& b, double w) {
    if (a.image_width != b.image_width || a.image_height != b.image_height)
        throw ValidationError("cannot interpolate landmark sets from " +
                              std::to_string(a.image_width) + "x" +
                              std::to_string(a.image_height) + " and " +
                              std::to_string(b.image_width) + "x" +
                              std::to_string(b.image_height) + " frames");
    if (a.points.size() != b.points.size())
        throw ValidationError("landmark sets differ in point count");
    if (!(w >= 0.0 && w <= 1.0))
        throw ValidationError("interpolation weight must lie in [0,1], got " +
                              std::to_string(w));
    LandmarkSet out;
    out.image_width = a.image_width;
    out.image_height = a.image_height;
    out.points.reserve(a.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        out.points.push_back({(1.0 - w) * a.points[i].x + w * b.points[i].x,
                              (1.0 - w) * a.points[i].y + w * b.points[i].y});
    return out;
}

LandmarkSet combine3(const LandmarkSet& n, const LandmarkSet& a,
                     const LandmarkSet& b, double t, double r) {
    return interpolate(n, interpolate(a, b, t), r);
}

ExtendedLandmarkSet extend_with_boundary(const LandmarkSet& lm) {
    lm.validate();
    const double w = lm.image_width - 1;
    const double h = lm.image_height - 1;
    ExtendedLandmarkSet ext;
    ext.base = lm;
    ext.boundary = {{
        {0.0, 0.0},
        {w, 0.0},
        {w, h},
        {0.0, h},
        {w / 2.0, 0.0},
        {w, h / 2.0},
        {w / 2.0, h},
        {0.0, h / 2.0},
    }};
    return ext;
}

}  // namespace vamorph
