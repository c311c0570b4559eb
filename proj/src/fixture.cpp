#include "vamorph/fixture.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "vamorph/errors.hpp"
#include "vamorph/manifest.hpp"
#include "vamorph/va_space.hpp"

namespace vamorph {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

struct FaceParams {
    double scale_w;
    double scale_h;
    double eye_dx;    // eye center distance from the face axis
    double mouth_w;   // mouth half-width
    Rgb skin, lip, iris, brow, bg;
};

// A handful of visually distinct identities; parameters repeat beyond that.
FaceParams subject_params(int subject_index) {
    static const FaceParams bank[] = {
        {1.00, 1.00, 16.0, 16.0,
         {224, 188, 160}, {170, 90, 90}, {70, 100, 140}, {70, 50, 40},
         {40, 44, 52}},
        {0.94, 1.03, 14.5, 14.0,
         {198, 158, 128}, {150, 78, 82}, {90, 70, 40}, {45, 35, 30},
         {46, 40, 54}},
        {1.04, 0.96, 17.5, 17.0,
         {236, 204, 180}, {182, 102, 98}, {60, 110, 90}, {85, 65, 45},
         {38, 48, 46}},
        {0.97, 0.99, 15.5, 15.0,
         {172, 130, 104}, {140, 70, 72}, {55, 45, 40}, {35, 28, 24},
         {50, 44, 44}},
    };
    const int count = static_cast<int>(std::size(bank));
    return bank[((subject_index % count) + count) % count];
}

struct Deform {
    std::array<Point2, 68> delta{};  // px at intensity 1 in the 128 frame

    void add(int index, double dx, double dy) {
        delta[index].x += dx;
        delta[index].y += dy;
    }
    void add_range(int first, int last, double dx, double dy) {
        for (int i = first; i <= last; ++i) add(i, dx, dy);
    }
};

// Displacements stay small (<= 6 px) so every blend of expressions keeps the
// mesh triangles positively oriented and at least ~2 px of inner-lip gap.
Deform expression_deform(const std::string& emotion) {
    Deform d;
    if (emotion == "NEUTRAL") return d;
    if (emotion == "HAPPY") {
        d.add(48, -3.0, -3.5);           // mouth corners out and up
        d.add(54, 3.0, -3.5);
        d.add(49, -1.0, -2.0);
        d.add(53, 1.0, -2.0);
        d.add_range(50, 52, 0.0, -1.0);  // upper lip lifts a little
        d.add_range(55, 59, 0.0, -1.5);  // lower lip follows the corners
        d.add(60, -2.0, -2.0);
        d.add(64, 2.0, -2.0);
        d.add_range(61, 63, 0.0, -1.0);
        d.add_range(65, 67, 0.0, -0.5);
        d.add(4, -1.0, 0.0);             // cheeks push outward
        d.add(12, 1.0, 0.0);
        d.add_range(36, 41, 0.0, 0.0);
        d.add(37, 0.0, 0.5);             // slight squint
        d.add(38, 0.0, 0.5);
        d.add(43, 0.0, 0.5);
        d.add(44, 0.0, 0.5);
        return d;
    }
    if (emotion == "SURPRISE") {
        d.add_range(17, 26, 0.0, -5.0);  // brows jump up
        d.add(37, 0.0, -1.5);            // upper lids rise
        d.add(38, 0.0, -1.5);
        d.add(43, 0.0, -1.5);
        d.add(44, 0.0, -1.5);
        d.add(40, 0.0, 1.0);             // lower lids drop
        d.add(41, 0.0, 1.0);
        d.add(46, 0.0, 1.0);
        d.add(47, 0.0, 1.0);
        d.add_range(55, 59, 0.0, 5.0);   // jaw drops, mouth opens
        d.add_range(65, 67, 0.0, 4.5);
        d.add(48, 1.5, 1.0);             // corners pull slightly inward
        d.add(54, -1.5, 1.0);
        d.add(60, 1.0, 1.0);
        d.add(64, -1.0, 1.0);
        d.add_range(6, 10, 0.0, 3.0);    // chin follows the jaw
        return d;
    }
    if (emotion == "AFRAID") {
        d.add_range(17, 26, 0.0, -3.5);
        d.add(21, 1.5, -1.0);            // inner brow ends pull together
        d.add(22, -1.5, -1.0);
        d.add(37, 0.0, -1.0);
        d.add(38, 0.0, -1.0);
        d.add(43, 0.0, -1.0);
        d.add(44, 0.0, -1.0);
        d.add(48, 2.0, 0.5);             // mouth narrows, slightly open
        d.add(54, -2.0, 0.5);
        d.add(60, 1.5, 0.0);
        d.add(64, -1.5, 0.0);
        d.add_range(55, 59, 0.0, 2.5);
        d.add_range(65, 67, 0.0, 2.0);
        return d;
    }
    if (emotion == "ANGRY") {
        d.add_range(17, 26, 0.0, 2.0);   // brows clamp down
        d.add(21, 1.0, 3.0);             // inner ends dive
        d.add(22, -1.0, 3.0);
        d.add(37, 0.0, 1.0);             // narrowed eyes
        d.add(38, 0.0, 1.0);
        d.add(43, 0.0, 1.0);
        d.add(44, 0.0, 1.0);
        d.add(48, 1.0, 1.0);             // pressed lips
        d.add(54, -1.0, 1.0);
        d.add_range(50, 52, 0.0, 0.5);
        d.add_range(56, 58, 0.0, -1.0);
        d.add_range(65, 67, 0.0, -0.5);
        return d;
    }
    if (emotion == "DISGUST") {
        d.add_range(17, 26, 0.0, 1.5);
        d.add(21, 0.5, 2.0);
        d.add(22, -0.5, 2.0);
        d.add_range(31, 35, 0.0, -2.0);  // nose wrinkles upward
        d.add_range(49, 53, 0.0, -2.5);  // raised upper lip
        d.add_range(61, 63, 0.0, -1.5);
        d.add(48, 0.5, 2.0);             // corners sag
        d.add(54, -0.5, 2.0);
        return d;
    }
    if (emotion == "SAD") {
        d.add(17, 0.0, 1.0);
        d.add(26, 0.0, 1.0);
        d.add(21, 0.5, -1.5);            // oblique brows
        d.add(22, -0.5, -1.5);
        d.add(37, 0.0, 1.0);             // drooping lids
        d.add(38, 0.0, 1.0);
        d.add(43, 0.0, 1.0);
        d.add(44, 0.0, 1.0);
        d.add(48, 0.5, 4.0);             // corners fall
        d.add(54, -0.5, 4.0);
        d.add(60, 0.5, 2.5);
        d.add(64, -0.5, 2.5);
        d.add(57, 0.0, 1.0);
        d.add(66, 0.0, 0.5);
        return d;
    }
    throw ValidationError("unknown emotion \"" + emotion + "\"");
}

std::array<Point2, 68> base_landmarks(const FaceParams& fp) {
    std::array<Point2, 68> p{};
    const double cx = 64.0;
    const double cy = 66.0;
    const double rx = 38.0 * fp.scale_w;
    const double ry = 46.0 * fp.scale_h;

    // 0-16: jaw, left temple around the chin to the right temple
    for (int i = 0; i <= 16; ++i) {
        const double phi =
            std::numbers::pi + i * (std::numbers::pi / 16.0);
        p[i] = {cx + rx * std::cos(phi), cy - ry * std::sin(phi)};
    }
    // 17-21 / 22-26: brows with a mild arch
    for (int j = 0; j <= 4; ++j) {
        const double arch = 3.0 * std::sin(j * std::numbers::pi / 4.0);
        const double x = 38.0 + 5.0 * j;
        p[17 + j] = {cx + (x - cx) * fp.scale_w, 40.0 - arch};
        p[26 - j] = {cx - (x - cx) * fp.scale_w, 40.0 - arch};
    }
    // 27-30: nose bridge; 31-35: nostril base
    for (int j = 0; j <= 3; ++j) p[27 + j] = {cx, 48.0 + 7.0 * j};
    for (int j = 0; j <= 4; ++j)
        p[31 + j] = {cx + (4.0 * (j - 2)) * fp.scale_w,
                     76.0 - 1.5 * std::abs(j - 2)};
    // 36-41 / 42-47: eye hexagons
    const auto eye = [&](int first, double ex) {
        p[first + 0] = {ex - 7.0, 50.0};
        p[first + 1] = {ex - 3.0, 47.0};
        p[first + 2] = {ex + 3.0, 47.0};
        p[first + 3] = {ex + 7.0, 50.0};
        p[first + 4] = {ex + 3.0, 53.0};
        p[first + 5] = {ex - 3.0, 53.0};
    };
    eye(36, cx - fp.eye_dx);
    eye(42, cx + fp.eye_dx);
    // 48-59: outer lip; 60-67: inner lip (slightly parted at rest)
    const double mw = fp.mouth_w;
    const double my = 92.0;
    p[48] = {cx - mw, my};
    p[49] = {cx - mw * 0.62, my - 3.5};
    p[50] = {cx - mw * 0.30, my - 5.0};
    p[51] = {cx, my - 4.3};
    p[52] = {cx + mw * 0.30, my - 5.0};
    p[53] = {cx + mw * 0.62, my - 3.5};
    p[54] = {cx + mw, my};
    p[55] = {cx + mw * 0.62, my + 4.5};
    p[56] = {cx + mw * 0.30, my + 7.0};
    p[57] = {cx, my + 7.5};
    p[58] = {cx - mw * 0.30, my + 7.0};
    p[59] = {cx - mw * 0.62, my + 4.5};
    p[60] = {cx - mw * 0.72, my};
    p[61] = {cx - mw * 0.30, my - 1.6};
    p[62] = {cx, my - 1.4};
    p[63] = {cx + mw * 0.30, my - 1.6};
    p[64] = {cx + mw * 0.72, my};
    p[65] = {cx + mw * 0.30, my + 1.8};
    p[66] = {cx, my + 2.0};
    p[67] = {cx - mw * 0.30, my + 1.8};
    return p;
}

// --- tiny raster helpers -------------------------------------------------

void put(RasterImage& img, int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[k];
}

void fill_polygon(RasterImage& img, const std::vector<Point2>& poly,
                  const Rgb& c) {
    double min_y = poly[0].y, max_y = poly[0].y;
    for (const Point2& p : poly) {
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(max_y)));
    std::vector<double> xs;
    for (int y = y0; y <= y1; ++y) {
        xs.clear();
        const double fy = y;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point2& a = poly[i];
            const Point2& b = poly[(i + 1) % poly.size()];
            if ((a.y <= fy && b.y > fy) || (b.y <= fy && a.y > fy))
                xs.push_back(a.x + (fy - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            const int xa = std::max(0, static_cast<int>(std::ceil(xs[i])));
            const int xb = std::min(img.width - 1,
                                    static_cast<int>(std::floor(xs[i + 1])));
            for (int x = xa; x <= xb; ++x) put(img, x, y, c);
        }
    }
}

void fill_disc(RasterImage& img, Point2 center, double radius, const Rgb& c) {
    const int y0 = static_cast<int>(std::floor(center.y - radius));
    const int y1 = static_cast<int>(std::ceil(center.y + radius));
    const int x0 = static_cast<int>(std::floor(center.x - radius));
    const int x1 = static_cast<int>(std::ceil(center.x + radius));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - center.x;
            const double dy = y - center.y;
            if (dx * dx + dy * dy <= radius * radius) put(img, x, y, c);
        }
}

void stroke_polyline(RasterImage& img, const std::vector<Point2>& pts,
                     double width, const Rgb& c) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Point2 a = pts[i];
        const Point2 b = pts[i + 1];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            fill_disc(img, {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)},
                      width / 2.0, c);
        }
    }
}

// Deterministic per-pixel dither so histograms carry many distinct levels.
int hash_noise(int x, int y) {
    std::uint32_t h = static_cast<std::uint32_t>(x) * 0x9E3779B1u ^
                      static_cast<std::uint32_t>(y) * 0x85EBCA77u;
    h ^= h >> 13;
    h *= 0xC2B2AE35u;
    h ^= h >> 16;
    return static_cast<int>(h % 7u) - 3;
}

Rgb shade(const Rgb& c, int dv) {
    Rgb out;
    for (int k = 0; k < 3; ++k)
        out[k] = static_cast<std::uint8_t>(
            std::clamp(static_cast<int>(c[k]) + dv, 0, 255));
    return out;
}

}  // namespace

FixtureFace draw_face(int subject_index, const std::string& emotion,
                      double intensity, int width, int height) {
    if (width < 64 || height < 64)
        throw ValidationError("fixture faces need at least a 64x64 frame");
    if (!(intensity >= 0.0 && intensity <= 1.0))
        throw ValidationError("expression intensity must lie in [0,1]");

    const FaceParams fp = subject_params(subject_index);
    const Deform deform = expression_deform(emotion);
    const double q = emotion == "NEUTRAL" ? 0.0 : intensity;

    std::array<Point2, 68> pts = base_landmarks(fp);
    for (int i = 0; i < 68; ++i) {
        pts[i].x += q * deform.delta[i].x;
        pts[i].y += q * deform.delta[i].y;
    }
    // Scale the canonical 128-frame layout to the requested frame.
    const double sx = width / 128.0;
    const double sy = height / 128.0;
    for (Point2& p : pts) {
        p.x *= sx;
        p.y *= sy;
    }

    LandmarkSet lm;
    lm.points.assign(pts.begin(), pts.end());
    lm.image_width = width;
    lm.image_height = height;
    lm.validate();

    RasterImage img = RasterImage::create(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            put(img, x, y, shade(fp.bg, hash_noise(x, y)));

    // Face region: jaw arc plus a mirrored forehead arc.
    std::vector<Point2> outline(pts.begin(), pts.begin() + 17);
    const double cx = 64.0 * sx;
    const double cy = 66.0 * sy;
    const double rx = 38.0 * fp.scale_w * sx;
    const double ry = 46.0 * fp.scale_h * sy;
    for (int i = 1; i < 16; ++i) {
        const double phi = i * (std::numbers::pi / 16.0);
        outline.push_back(
            {cx + rx * std::cos(-phi), cy - 0.92 * ry * std::sin(phi)});
    }
    fill_polygon(img, outline, fp.skin);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            // Re-dither the skin only; the outline test is a cheap ellipse.
            const double ex = (x - cx) / rx;
            const double ey = (y - cy) / (0.96 * ry);
            if (ex * ex + ey * ey <= 1.0) {
                const int grad = static_cast<int>((x - cx) / rx * 6.0);
                put(img, x, y, shade(fp.skin, hash_noise(x, y) + grad));
            }
        }

    // Brows
    stroke_polyline(img, {pts.begin() + 17, pts.begin() + 22}, 2.6, fp.brow);
    stroke_polyline(img, {pts.begin() + 22, pts.begin() + 27}, 2.6, fp.brow);

    // Nose
    stroke_polyline(img, {pts.begin() + 27, pts.begin() + 31}, 2.0,
                    shade(fp.skin, -28));
    stroke_polyline(img, {pts.begin() + 31, pts.begin() + 36}, 1.6,
                    shade(fp.skin, -36));

    // Eyes: white, iris, pupil
    const auto draw_eye = [&](int first) {
        std::vector<Point2> hex(pts.begin() + first, pts.begin() + first + 6);
        fill_polygon(img, hex, {245, 245, 245});
        Point2 c{0.0, 0.0};
        for (const Point2& p : hex) c = c + p;
        c = (1.0 / 6.0) * c;
        fill_disc(img, c, 2.4 * std::min(sx, sy), fp.iris);
        fill_disc(img, c, 1.1 * std::min(sx, sy), {20, 20, 20});
        stroke_polyline(img, {hex[0], hex[1], hex[2], hex[3]}, 1.0,
                        shade(fp.brow, -10));
    };
    draw_eye(36);
    draw_eye(42);

    // Mouth: outer lips, then the darker inner opening
    fill_polygon(img, {pts.begin() + 48, pts.begin() + 60}, fp.lip);
    fill_polygon(img, {pts.begin() + 60, pts.begin() + 68}, {60, 30, 34});

    return {std::move(img), lm};
}

void write_fixture_dataset(const std::filesystem::path& dir,
                           const FixtureOptions& options) {
    if (options.subjects < 1)
        throw ValidationError("fixture needs at least one subject");
    if (options.nir_references < 1)
        throw ValidationError("fixture needs at least one reference image");

    const VATemplate tmpl = VATemplate::defaults();
    Manifest manifest;

    for (int s = 0; s < options.subjects; ++s) {
        char sid[16];
        std::snprintf(sid, sizeof(sid), "s%02d", s + 1);
        const std::string subject = sid;

        std::vector<std::string> emotions = {"NEUTRAL"};
        for (const EmotionAnchor& a : tmpl.anchors)
            emotions.push_back(a.emotion);

        for (const std::string& emotion : emotions) {
            const FixtureFace face = draw_face(s, emotion, 1.0,
                                               options.width, options.height);
            std::string stem = emotion;
            std::transform(stem.begin(), stem.end(), stem.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            const std::string img_rel = subject + "/" + stem + ".png";
            const std::string lm_rel = subject + "/" + stem + ".json";
            save_png(face.image, dir / img_rel);
            atomic_write_text(dir / lm_rel, landmarks_to_json(face.landmarks));

            SampleRecord rec;
            rec.image_path = img_rel;
            rec.landmark_path = lm_rel;
            rec.subject_id = subject;
            rec.emotion_label = emotion;
            if (emotion != "NEUTRAL") {
                for (const EmotionAnchor& a : tmpl.anchors)
                    if (a.emotion == emotion) rec.angle_deg = a.angle_deg;
                rec.intensity = 1.0;
                std::tie(rec.valence, rec.arousal) =
                    polar_to_va(*rec.angle_deg, 1.0);
            }
            rec.domain = Domain::VL;
            rec.origin = Origin::original;
            rec.split = Split::unassigned;
            manifest.records.push_back(std::move(rec));
        }
    }
    write_manifest(manifest, dir / "manifest.jsonl");

    // Grayscale reference images with varied, smooth histograms.
    for (int i = 0; i < options.nir_references; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "nir_ref/ref%02d.png", i + 1);
        RasterImage ref =
            RasterImage::create(options.width, options.height, 1);
        const double mean = 90.0 + 25.0 * i;
        for (int y = 0; y < ref.height; ++y)
            for (int x = 0; x < ref.width; ++x) {
                const double dx = (x - ref.width / 2.0) / (ref.width / 2.0);
                const double dy = (y - ref.height / 2.0) / (ref.height / 2.0);
                const double vignette = 1.0 - 0.45 * (dx * dx + dy * dy);
                const double v = mean * vignette + 14.0 * dx +
                                 hash_noise(x + 31 * i, y);
                ref.at(x, y, 0) = static_cast<std::uint8_t>(
                    std::clamp(static_cast<int>(std::lround(v)), 0, 255));
            }
        save_png(ref, dir / name);
    }
}

}  // namespace vamorph
