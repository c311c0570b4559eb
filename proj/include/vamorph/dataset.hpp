#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vamorph/manifest.hpp"
#include "vamorph/nir_proxy.hpp"
#include "vamorph/va_space.hpp"

namespace vamorph {

struct Rejection {
    std::string subject_id;
    std::optional<double> angle_deg;
    double intensity = 0.0;
    std::string reason;
};

struct AugmentResult {
    Manifest manifest;  // paths relative to out_dir
    std::vector<Rejection> rejections;
};

// Walks subjects x grid points: synthesized points are morphed and written
// as PNGs under out_dir/<subject>/, neutral and prototype points pass
// through as records referencing the original files. Rejected morphs are
// collected and omitted. Records come back sorted (subject, angle,
// intensity), neutral first per subject. input_dir anchors the input
// manifest's relative paths. Subjects are processed in parallel when
// workers > 1; results do not depend on the worker count.
AugmentResult augment_dataset(const Manifest& input,
                              const std::filesystem::path& input_dir,
                              const VATemplate& tmpl,
                              const std::filesystem::path& out_dir,
                              unsigned workers = 1);

// One NIR_SYNTH grayscale PNG per VL input record, labels copied unchanged.
Manifest translate_dataset(const Manifest& input,
                           const std::filesystem::path& input_dir,
                           const NirReferenceStats& stats,
                           const std::filesystem::path& out_dir,
                           unsigned workers = 1);

// Identity-disjoint split: subjects sorted, shuffled by a seeded
// deterministic RNG, ceil(test_fraction * n) assigned to test.
Manifest split_by_identity(const Manifest& manifest, double test_fraction,
                           std::uint64_t seed);

void write_rejections(std::span<const Rejection> rejections,
                      const std::filesystem::path& path);

}  // namespace vamorph
