#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vamorph/image.hpp"
#include "vamorph/manifest.hpp"

namespace vamorph {

struct PredictionEntry {
    std::string record_key;  // image_path of the manifest record
    double valence = 0.0;
    double arousal = 0.0;
};

struct PredictionSet {
    std::vector<PredictionEntry> entries;
};

PredictionSet read_predictions(const std::filesystem::path& path);
void write_predictions(const PredictionSet& preds,
                       const std::filesystem::path& path);

double rmse(std::span<const double> pred, std::span<const double> truth);

// Concordance correlation coefficient with population (1/n) moments:
// 2*cov / (var_p + var_t + (mean_p - mean_t)^2). Throws on length < 2 and on
// the degenerate 0/0 case (both sequences constant with equal means).
double ccc(std::span<const double> pred, std::span<const double> truth);

struct GroupScores {
    std::size_t count = 0;
    double rmse_valence = 0.0;
    double rmse_arousal = 0.0;
    double rmse_2d = 0.0;
    std::optional<double> ccc_valence;  // absent when undefined for the group
    std::optional<double> ccc_arousal;
};

struct EvalReport {
    std::size_t n = 0;
    GroupScores global;
    std::map<std::string, GroupScores> per_emotion;  // keyed by emotion_label

    nlohmann::ordered_json to_json() const;
};

// Predictions must align one-to-one with the given records (keyed by
// image_path); missing and extra keys are reported together.
EvalReport evaluate(std::span<const SampleRecord> records,
                    const PredictionSet& predictions, bool group);

struct HeatmapCell {
    std::size_t count = 0;
    double rmse_valence = 0.0;
    double rmse_arousal = 0.0;
};

// resolution x resolution grid over [-1,1]^2, indexed by ground-truth
// (valence, arousal); right/top edges inclusive in the last bin.
struct HeatmapGrid {
    int resolution = 0;
    std::vector<HeatmapCell> cells;  // row-major, [arousal_bin * res + valence_bin]

    const HeatmapCell& cell(int arousal_bin, int valence_bin) const {
        return cells[static_cast<std::size_t>(arousal_bin) * resolution + valence_bin];
    }
};

HeatmapGrid heatmap(std::span<const SampleRecord> records,
                    const PredictionSet& predictions, int resolution);

enum class VaDimension { valence, arousal };

struct RenderedHeatmap {
    std::string csv;    // rows: arousal bins descending; cols: valence ascending
    RasterImage image;  // blue->red ramp anchored at rmse 0 and the grid max;
                        // empty cells mid-gray
};

RenderedHeatmap render_heatmap(const HeatmapGrid& grid, VaDimension dim);

}  // namespace vamorph
