#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vamorph {

// 8-bit raster image, row-major interleaved samples, 1 (grayscale) or 3 (RGB)
// channels.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> samples;

    static RasterImage create(int width, int height, int channels,
                              std::uint8_t fill = 0);

    std::uint8_t& at(int x, int y, int c) {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const RasterImage& other) const {
        return width == other.width && height == other.height &&
               channels == other.channels;
    }

    void validate() const;  // throws ValidationError on inconsistent fields
};

// Decoders sniff the container by magic bytes; PNG and JPEG are accepted,
// anything else is an IoError. Palette/16-bit/alpha PNG variants are folded
// down to 8-bit grayscale or RGB.
RasterImage load_image(const std::filesystem::path& path);
RasterImage decode_image(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_png(const RasterImage& img);
// Writes via temp file + rename so partially written images never appear at
// the target path.
void save_png(const RasterImage& img, const std::filesystem::path& path);

// Rec. 601 luminance. 8-bit output rounds half away from zero; grayscale
// input passes through unchanged.
RasterImage to_luminance(const RasterImage& img);
std::vector<double> luminance_f64(const RasterImage& img);

// Shared atomic-write helper for all CLI artifacts.
void atomic_write_bytes(const std::filesystem::path& path,
                        const void* data, std::size_t size);
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text);

}  // namespace vamorph
