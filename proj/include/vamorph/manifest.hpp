#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vamorph/geometry.hpp"
#include "vamorph/va_space.hpp"

namespace vamorph {

enum class Domain { VL, NIR, NIR_SYNTH };
enum class Origin { original, morphed, translated };
enum class Split { train, test, unassigned };

const char* to_string(Domain d);
const char* to_string(Origin o);
const char* to_string(Split s);
Domain domain_from_string(const std::string& s);
Origin origin_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// One dataset sample. Paths are relative to the manifest file; morphed
// records embed their landmarks instead of referencing a file.
struct SampleRecord {
    std::string image_path;
    std::optional<std::string> landmark_path;
    std::optional<std::vector<Point2>> landmarks;
    std::string subject_id;
    std::string emotion_label;
    std::optional<double> angle_deg;
    double intensity = 0.0;
    double valence = 0.0;
    double arousal = 0.0;
    Domain domain = Domain::VL;
    Origin origin = Origin::original;
    Split split = Split::unassigned;

    nlohmann::ordered_json to_json() const;
    static SampleRecord from_json(const nlohmann::json& j);
};

struct Manifest {
    std::vector<SampleRecord> records;
    std::optional<VATemplate> va_template;  // in-memory only, not in the JSONL
    int schema_version = 1;
};

// JSONL, one record per line, UTF-8. Reading rejects malformed lines (with
// the line number) and duplicate image paths; writing is atomic and
// canonical, so write(read(m)) round-trips byte-identically.
Manifest read_manifest(const std::filesystem::path& path,
                       bool validate_files = false);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace vamorph
