#pragma once

#include <array>
#include <cstdint>
#include <span>

#include <json.hpp>

#include "vamorph/image.hpp"

namespace vamorph {

// Empirical CDF of 8-bit NIR reference intensities, pooled over all pixels
// of the reference set.
struct NirReferenceStats {
    std::array<double, 256> cdf{};
    std::int64_t source_count = 0;

    void validate() const;  // non-decreasing, cdf[255] == 1, source_count >= 1

    nlohmann::ordered_json to_json() const;
    static NirReferenceStats from_json(const nlohmann::json& j);
};

NirReferenceStats compute_reference_stats(std::span<const RasterImage> images);

// Deterministic VL->NIR-style translation: Rec.601 luminance, then monotone
// histogram matching of the image's own luminance CDF onto the reference CDF
// (output value = smallest k with ref_cdf[k] >= source_cdf[v]).
RasterImage to_nir(const RasterImage& img, const NirReferenceStats& stats);

}  // namespace vamorph
