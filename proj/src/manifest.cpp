#include "vamorph/manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vamorph/errors.hpp"
#include "vamorph/image.hpp"

namespace vamorph {

const char* to_string(Domain d) {
    switch (d) {
        case Domain::VL: return "VL";
        case Domain::NIR: return "NIR";
        case Domain::NIR_SYNTH: return "NIR_SYNTH";
    }
    return "unknown";
}

const char* to_string(Origin o) {
    switch (o) {
        case Origin::original: return "original";
        case Origin::morphed: return "morphed";
        case Origin::translated: return "translated";
    }
    return "unknown";
}

const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::unassigned: return "unassigned";
    }
    return "unknown";
}

Domain domain_from_string(const std::string& s) {
    if (s == "VL") return Domain::VL;
    if (s == "NIR") return Domain::NIR;
    if (s == "NIR_SYNTH") return Domain::NIR_SYNTH;
    throw ValidationError("unknown domain \"" + s + "\"");
}

Origin origin_from_string(const std::string& s) {
    if (s == "original") return Origin::original;
    if (s == "morphed") return Origin::morphed;
    if (s == "translated") return Origin::translated;
    throw ValidationError("unknown origin \"" + s + "\"");
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    if (s == "unassigned") return Split::unassigned;
    throw ValidationError("unknown split \"" + s + "\"");
}

nlohmann::ordered_json SampleRecord::to_json() const {
    nlohmann::ordered_json j;
    j["image_path"] = image_path;
    if (landmark_path) j["landmark_path"] = *landmark_path;
    if (landmarks) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const Point2& p : *landmarks)
            arr.push_back(nlohmann::ordered_json::array({p.x, p.y}));
        j["landmarks"] = std::move(arr);
    }
    j["subject_id"] = subject_id;
    j["emotion_label"] = emotion_label;
    if (angle_deg) j["angle_deg"] = *angle_deg;
    j["intensity"] = intensity;
    j["valence"] = valence;
    j["arousal"] = arousal;
    j["domain"] = to_string(domain);
    j["origin"] = to_string(origin);
    j["split"] = to_string(split);
    return j;
}

SampleRecord SampleRecord::from_json(const nlohmann::json& j) {
    SampleRecord r;
    try {
        r.image_path = j.at("image_path").get<std::string>();
        if (j.contains("landmark_path"))
            r.landmark_path = j.at("landmark_path").get<std::string>();
        if (j.contains("landmarks")) {
            std::vector<Point2> pts;
            for (const auto& pair : j.at("landmarks")) {
                if (!pair.is_array() || pair.size() != 2)
                    throw ValidationError(
                        "embedded landmarks must be [x, y] pairs");
                pts.push_back({pair[0].get<double>(), pair[1].get<double>()});
            }
            r.landmarks = std::move(pts);
        }
        r.subject_id = j.at("subject_id").get<std::string>();
        r.emotion_label = j.at("emotion_label").get<std::string>();
        if (j.contains("angle_deg"))
            r.angle_deg = j.at("angle_deg").get<double>();
        r.intensity = j.at("intensity").get<double>();
        r.valence = j.at("valence").get<double>();
        r.arousal = j.at("arousal").get<double>();
        r.domain = domain_from_string(j.at("domain").get<std::string>());
        r.origin = origin_from_string(j.at("origin").get<std::string>());
        r.split = split_from_string(j.at("split").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed record: ") + e.what());
    }
    if (r.subject_id.empty())
        throw ValidationError("record has an empty subject_id");
    if (r.angle_deg) {
        const auto [v, a] = polar_to_va(*r.angle_deg, r.intensity);
        if (std::abs(v - r.valence) > 1e-6 || std::abs(a - r.arousal) > 1e-6)
            throw ValidationError(
                "record labels (" + std::to_string(r.valence) + ", " +
                std::to_string(r.arousal) +
                ") disagree with angle_deg/intensity, which give (" +
                std::to_string(v) + ", " + std::to_string(a) + ")");
    }
    return r;
}

Manifest read_manifest(const std::filesystem::path& path,
                       bool validate_files) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());

    Manifest m;
    std::set<std::string> seen_paths;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path.string() + ":" +
                                  std::to_string(line_no) +
                                  ": malformed JSON: " + e.what());
        }
        SampleRecord r;
        try {
            r = SampleRecord::from_json(j);
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" +
                                  std::to_string(line_no) + ": " + e.what());
        }
        if (!seen_paths.insert(r.image_path).second)
            throw ValidationError(path.string() + ":" +
                                  std::to_string(line_no) +
                                  ": duplicate image_path \"" + r.image_path +
                                  "\"");
        m.records.push_back(std::move(r));
    }
    if (in.bad()) throw IoError("failed reading manifest " + path.string());

    if (validate_files) {
        const std::filesystem::path base = path.parent_path();
        for (const SampleRecord& r : m.records) {
            if (!std::filesystem::exists(base / r.image_path))
                throw ValidationError("manifest references missing image " +
                                      r.image_path);
            if (r.landmark_path &&
                !std::filesystem::exists(base / *r.landmark_path))
                throw ValidationError(
                    "manifest references missing landmark file " +
                    *r.landmark_path);
        }
    }
    return m;
}

void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path) {
    std::set<std::string> seen_paths;
    for (const SampleRecord& r : manifest.records)
        if (!seen_paths.insert(r.image_path).second)
            throw ValidationError("duplicate image_path \"" + r.image_path +
                                  "\" in manifest");
    std::ostringstream out;
    for (const SampleRecord& r : manifest.records)
        out << r.to_json().dump() << '\n';
    atomic_write_text(path, out.str());
}

}  // namespace vamorph
