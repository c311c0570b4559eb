#pragma once

#include <filesystem>
#include <string>

#include "vamorph/image.hpp"
#include "vamorph/landmarks.hpp"

namespace vamorph {

// Procedurally drawn synthetic faces with hand-placed 68-point landmarks.
// The real datasets are license-restricted, so the test suite and the
// bundled demo fixture run on these instead.

struct FixtureFace {
    RasterImage image;  // RGB
    LandmarkSet landmarks;
};

// emotion is one of NEUTRAL, HAPPY, SURPRISE, AFRAID, ANGRY, DISGUST, SAD;
// intensity scales the expression deformation (NEUTRAL ignores it).
// Deterministic in all arguments.
FixtureFace draw_face(int subject_index, const std::string& emotion,
                      double intensity, int width = 128, int height = 128);

struct FixtureOptions {
    int subjects = 2;
    int width = 128;
    int height = 128;
    int nir_references = 3;
};

// Writes <dir>/manifest.jsonl plus per-subject apex/neutral images and
// landmark files, and <dir>/nir_ref/ with grayscale reference images
// (for nir-stats).
void write_fixture_dataset(const std::filesystem::path& dir,
                           const FixtureOptions& options = {});

}  // namespace vamorph
