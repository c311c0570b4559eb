#include "vamorph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "vamorph/errors.hpp"
#include "vamorph/image.hpp"
#include "vamorph/landmarks.hpp"
#include "vamorph/morph.hpp"
#include "vamorph/parallel.hpp"

namespace vamorph {

namespace {

struct SubjectSources {
    // Emotion name -> (image, landmarks); includes "NEUTRAL".
    std::map<std::string, std::pair<RasterImage, LandmarkSet>> by_emotion;
};

LandmarkSet load_record_landmarks(const SampleRecord& rec,
                                  const std::filesystem::path& base,
                                  const RasterImage& img) {
    if (rec.landmarks) {
        LandmarkSet lm;
        lm.points = *rec.landmarks;
        lm.image_width = img.width;
        lm.image_height = img.height;
        lm.validate();
        return lm;
    }
    if (!rec.landmark_path)
        throw ValidationError("record " + rec.image_path +
                              " carries no landmarks");
    const std::filesystem::path path = base / *rec.landmark_path;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open landmark file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_landmarks(buf.str(), img.width, img.height);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

SubjectSources gather_subject(const std::string& subject,
                              std::span<const SampleRecord* const> records,
                              const std::filesystem::path& base,
                              const VATemplate& tmpl) {
    SubjectSources src;
    for (const SampleRecord* rec : records) {
        RasterImage img = load_image(base / rec->image_path);
        LandmarkSet lm = load_record_landmarks(*rec, base, img);
        src.by_emotion.emplace(rec->emotion_label,
                               std::make_pair(std::move(img), std::move(lm)));
    }
    if (src.by_emotion.find("NEUTRAL") == src.by_emotion.end())
        throw ValidationError("subject " + subject +
                              " is missing its NEUTRAL expression");
    for (const EmotionAnchor& anchor : tmpl.anchors)
        if (src.by_emotion.find(anchor.emotion) == src.by_emotion.end())
            throw ValidationError("subject " + subject + " is missing its " +
                                  anchor.emotion + " expression");
    return src;
}

std::string grid_file_name(const GridPoint& point) {
    if (!point.angle_deg) return "neutral.png";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "a%04d_i%03d.png",
                  static_cast<int>(std::lround(*point.angle_deg * 10.0)),
                  static_cast<int>(std::lround(point.intensity * 100.0)));
    return buf;
}

}  // namespace

AugmentResult augment_dataset(const Manifest& input,
                              const std::filesystem::path& input_dir,
                              const VATemplate& tmpl,
                              const std::filesystem::path& out_dir,
                              unsigned workers) {
    tmpl.validate();
    for (const SampleRecord& r : input.records)
        if (r.origin != Origin::original)
            throw ValidationError("augmentation input record " + r.image_path +
                                  " has origin " + to_string(r.origin) +
                                  "; only originals are accepted");

    std::map<std::string, std::vector<const SampleRecord*>> by_subject;
    for (const SampleRecord& r : input.records)
        by_subject[r.subject_id].push_back(&r);
    if (by_subject.empty())
        throw ValidationError("augmentation input manifest is empty");

    const std::vector<GridPoint> grid = build_grid(tmpl);
    const std::vector<MorphPlan> plans = plan_morphs(grid, tmpl);

    std::vector<std::string> subject_ids;
    std::vector<std::vector<const SampleRecord*>> subject_records;
    subject_ids.reserve(by_subject.size());
    for (auto& [id, recs] : by_subject) {
        subject_ids.push_back(id);
        subject_records.push_back(std::move(recs));
    }

    // Pass-through records keep pointing at the original files, re-expressed
    // relative to out_dir so the output manifest resolves them.
    const auto reanchor = [&](const std::string& rel) {
        return (input_dir / rel)
            .lexically_normal()
            .lexically_relative(out_dir.lexically_normal())
            .generic_string();
    };

    struct SubjectOutput {
        std::vector<SampleRecord> records;
        std::vector<Rejection> rejections;
    };
    std::vector<SubjectOutput> outputs(subject_ids.size());

    parallel_for(subject_ids.size(), workers, [&](std::size_t si) {
        const std::string& subject = subject_ids[si];
        const std::vector<const SampleRecord*>& originals =
            subject_records[si];
        const SubjectSources src =
            gather_subject(subject, originals, input_dir, tmpl);
        SubjectOutput& out = outputs[si];

        const auto& [neutral_img, neutral_lm] = src.by_emotion.at("NEUTRAL");

        const auto passthrough = [&](const std::string& emotion) {
            const SampleRecord* orig = nullptr;
            for (const SampleRecord* r : originals)
                if (r->emotion_label == emotion) orig = r;
            SampleRecord rec = *orig;
            rec.image_path = reanchor(orig->image_path);
            if (orig->landmark_path)
                rec.landmark_path = reanchor(*orig->landmark_path);
            rec.split = Split::unassigned;
            return rec;
        };

        // Neutral record first.
        {
            SampleRecord rec = passthrough("NEUTRAL");
            rec.angle_deg.reset();
            rec.intensity = 0.0;
            rec.valence = 0.0;
            rec.arousal = 0.0;
            out.records.push_back(std::move(rec));
        }

        for (const MorphPlan& plan : plans) {
            const GridPoint& point = plan.target;
            SampleRecord rec;
            rec.subject_id = subject;
            rec.emotion_label = blend_label(plan);
            rec.angle_deg = point.angle_deg;
            rec.intensity = point.intensity;
            rec.valence = point.valence;
            rec.arousal = point.arousal;
            rec.domain = Domain::VL;
            rec.split = Split::unassigned;

            if (point.kind == GridPointKind::prototype) {
                SampleRecord orig = passthrough(plan.apex_a);
                orig.emotion_label = rec.emotion_label;
                orig.angle_deg = rec.angle_deg;
                orig.intensity = rec.intensity;
                orig.valence = rec.valence;
                orig.arousal = rec.arousal;
                out.records.push_back(std::move(orig));
                continue;
            }

            const auto& [img_a, lm_a] = src.by_emotion.at(plan.apex_a);
            const auto& [img_b, lm_b] = src.by_emotion.at(plan.apex_b);
            try {
                auto [img, lm] = morph_grid_point(neutral_img, neutral_lm,
                                                  img_a, lm_a, img_b, lm_b,
                                                  plan);
                const std::string rel =
                    subject + "/" + grid_file_name(point);
                save_png(img, out_dir / rel);
                rec.image_path = rel;
                std::vector<Point2> pts = lm.points;
                rec.landmarks = std::move(pts);
                rec.origin = Origin::morphed;
                out.records.push_back(std::move(rec));
            } catch (const MorphRejected& e) {
                out.rejections.push_back(
                    {subject, point.angle_deg, point.intensity, e.reason()});
            }
        }
    });

    AugmentResult result;
    result.manifest.va_template = tmpl;
    for (SubjectOutput& out : outputs) {
        std::move(out.records.begin(), out.records.end(),
                  std::back_inserter(result.manifest.records));
        std::move(out.rejections.begin(), out.rejections.end(),
                  std::back_inserter(result.rejections));
    }
    return result;
}

Manifest translate_dataset(const Manifest& input,
                           const std::filesystem::path& input_dir,
                           const NirReferenceStats& stats,
                           const std::filesystem::path& out_dir,
                           unsigned workers) {
    stats.validate();
    for (const SampleRecord& r : input.records)
        if (r.domain != Domain::VL)
            throw ValidationError("translation input record " + r.image_path +
                                  " has domain " + to_string(r.domain) +
                                  "; only VL records are accepted");

    // Output name: <subject>/<basename>.png; collisions are validation
    // errors rather than silent overwrites.
    std::vector<std::string> out_paths(input.records.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < input.records.size(); ++i) {
        const SampleRecord& r = input.records[i];
        const std::string name =
            std::filesystem::path(r.image_path).stem().string() + ".png";
        out_paths[i] = r.subject_id + "/" + name;
        if (!seen.insert(out_paths[i]).second)
            throw ValidationError(
                "translated output path collision at " + out_paths[i] +
                "; input basenames must be unique per subject");
    }

    Manifest out;
    out.va_template = input.va_template;
    out.records.resize(input.records.size());
    parallel_for(input.records.size(), workers, [&](std::size_t i) {
        const SampleRecord& r = input.records[i];
        const RasterImage img = load_image(input_dir / r.image_path);
        const RasterImage nir = to_nir(img, stats);
        save_png(nir, out_dir / out_paths[i]);

        SampleRecord rec = r;
        rec.image_path = out_paths[i];
        rec.domain = Domain::NIR_SYNTH;
        rec.origin = Origin::translated;
        out.records[i] = std::move(rec);
    });
    return out;
}

Manifest split_by_identity(const Manifest& manifest, double test_fraction,
                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("test fraction must lie in (0,1), got " +
                              std::to_string(test_fraction));

    std::set<std::string> subject_set;
    for (const SampleRecord& r : manifest.records)
        subject_set.insert(r.subject_id);
    if (subject_set.size() < 2)
        throw ValidationError("identity split needs at least 2 subjects, got " +
                              std::to_string(subject_set.size()));

    std::vector<std::string> subjects(subject_set.begin(), subject_set.end());

    // Fisher-Yates with raw 32-bit draws: std::shuffle and
    // uniform_int_distribution are implementation-defined, and split
    // assignments must reproduce across platforms.
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    for (std::size_t i = subjects.size() - 1; i > 0; --i) {
        const std::size_t j = rng() % (i + 1);
        std::swap(subjects[i], subjects[j]);
    }

    // Tiny slack before ceil so products like 0.1 * 80 (= 8 + 4.4e-16 in
    // doubles) do not round up an extra subject.
    const std::size_t test_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(
               test_fraction * static_cast<double>(subjects.size()) - 1e-9)));
    std::set<std::string> test_subjects(subjects.begin(),
                                        subjects.begin() + test_count);

    Manifest out = manifest;
    for (SampleRecord& r : out.records)
        r.split = test_subjects.count(r.subject_id) ? Split::test
                                                    : Split::train;
    return out;
}

void write_rejections(std::span<const Rejection> rejections,
                      const std::filesystem::path& path) {
    std::ostringstream out;
    for (const Rejection& r : rejections) {
        nlohmann::ordered_json j;
        j["subject_id"] = r.subject_id;
        if (r.angle_deg) j["angle_deg"] = *r.angle_deg;
        j["intensity"] = r.intensity;
        j["reason"] = r.reason;
        out << j.dump() << '\n';
    }
    atomic_write_text(path, out.str());
}

}  // namespace vamorph
