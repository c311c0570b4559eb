#include "vamorph/nir_proxy.hpp"

#include <cstdint>
#include <string>

#include "vamorph/errors.hpp"

namespace vamorph {

void NirReferenceStats::validate() const {
    if (source_count < 1)
        throw ValidationError("reference stats need at least one source image");
    double prev = 0.0;
    for (int k = 0; k < 256; ++k) {
        if (!(cdf[k] >= 0.0 && cdf[k] <= 1.0))
            throw ValidationError("cdf[" + std::to_string(k) +
                                  "] lies outside [0,1]");
        if (cdf[k] < prev)
            throw ValidationError("cdf decreases at bin " + std::to_string(k));
        prev = cdf[k];
    }
    if (cdf[255] != 1.0)
        throw ValidationError("cdf[255] must be exactly 1");
}

nlohmann::ordered_json NirReferenceStats::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["source_count"] = source_count;
    j["cdf"] = cdf;
    return j;
}

NirReferenceStats NirReferenceStats::from_json(const nlohmann::json& j) {
    NirReferenceStats stats;
    try {
        stats.source_count = j.at("source_count").get<std::int64_t>();
        const auto& arr = j.at("cdf");
        if (!arr.is_array() || arr.size() != 256)
            throw ValidationError("stats cdf must hold 256 entries");
        for (int k = 0; k < 256; ++k) stats.cdf[k] = arr[k].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed stats JSON: ") + e.what());
    }
    stats.validate();
    return stats;
}

NirReferenceStats compute_reference_stats(
    std::span<const RasterImage> images) {
    if (images.empty())
        throw ValidationError(
            "at least one reference image is required for stats");
    std::array<std::uint64_t, 256> hist{};
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const RasterImage& img = images[i];
        img.validate();
        if (img.channels != 1)
            throw ValidationError("reference image " + std::to_string(i) +
                                  " is not grayscale");
        for (std::uint8_t v : img.samples) ++hist[v];
        total += img.samples.size();
    }

    NirReferenceStats stats;
    stats.source_count = static_cast<std::int64_t>(images.size());
    std::uint64_t running = 0;
    for (int k = 0; k < 256; ++k) {
        running += hist[k];
        stats.cdf[k] = static_cast<double>(running) / static_cast<double>(total);
    }
    stats.cdf[255] = 1.0;
    return stats;
}

RasterImage to_nir(const RasterImage& img, const NirReferenceStats& stats) {
    stats.validate();
    const RasterImage gray = to_luminance(img);

    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : gray.samples) ++hist[v];
    const double total = static_cast<double>(gray.samples.size());

    std::array<double, 256> source_cdf{};
    std::uint64_t running = 0;
    for (int k = 0; k < 256; ++k) {
        running += hist[k];
        source_cdf[k] = static_cast<double>(running) / total;
    }

    // Monotone matching: walk both CDFs once; k never moves backwards
    // because both are non-decreasing.
    std::array<std::uint8_t, 256> lut{};
    int k = 0;
    for (int v = 0; v < 256; ++v) {
        while (k < 255 && stats.cdf[k] < source_cdf[v]) ++k;
        lut[v] = static_cast<std::uint8_t>(k);
    }

    RasterImage out = gray;
    for (std::uint8_t& v : out.samples) v = lut[v];
    return out;
}

}  // namespace vamorph
