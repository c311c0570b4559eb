#include "vamorph/image.hpp"

#include <jpeglib.h>
#include <png.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <string>

#include "vamorph/errors.hpp"

namespace vamorph {

RasterImage RasterImage::create(int width, int height, int channels,
                                std::uint8_t fill) {
    if (width <= 0 || height <= 0)
        throw ValidationError("image dimensions must be positive, got " +
                              std::to_string(width) + "x" +
                              std::to_string(height));
    if (channels != 1 && channels != 3)
        throw ValidationError("image must have 1 or 3 channels, got " +
                              std::to_string(channels));
    RasterImage img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.samples.assign(static_cast<std::size_t>(width) * height * channels,
                       fill);
    return img;
}

void RasterImage::validate() const {
    if (width <= 0 || height <= 0)
        throw ValidationError("image dimensions must be positive, got " +
                              std::to_string(width) + "x" +
                              std::to_string(height));
    if (channels != 1 && channels != 3)
        throw ValidationError("image must have 1 or 3 channels, got " +
                              std::to_string(channels));
    const std::size_t expected =
        static_cast<std::size_t>(width) * height * channels;
    if (samples.size() != expected)
        throw ValidationError("image sample buffer holds " +
                              std::to_string(samples.size()) +
                              " bytes, expected " + std::to_string(expected));
}

namespace {

struct PngReadState {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->offset + count > state->size)
        png_error(png, "unexpected end of PNG stream");
    std::memcpy(out, state->data + state->offset, count);
    state->offset += count;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void png_flush_noop(png_structp) {}

RasterImage decode_png(const std::vector<std::uint8_t>& bytes) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("failed to initialize PNG decoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("failed to initialize PNG decoder");
    }

    RasterImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG data");
    }

    PngReadState state{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &state, png_read_from_memory);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    // Normalize every PNG variant to 8-bit gray or RGB.
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG channel count " +
                      std::to_string(channels));
    }

    img = RasterImage::create(static_cast<int>(width),
                              static_cast<int>(height), channels);
    rows.resize(height);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = img.samples.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RasterImage decode_jpeg(const std::vector<std::uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError(std::string("corrupt JPEG data: ") + err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space =
        cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int channels = cinfo.output_components;
    RasterImage img = RasterImage::create(static_cast<int>(cinfo.output_width),
                                          static_cast<int>(cinfo.output_height),
                                          channels);
    const std::size_t stride =
        static_cast<std::size_t>(img.width) * channels;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.samples.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
    static std::atomic<unsigned> counter{0};
    const unsigned n = counter.fetch_add(1, std::memory_order_relaxed);
    return path.parent_path() /
           (".tmp." + path.filename().string() + "." + std::to_string(n) +
            "." + std::to_string(::getpid()));
}

}  // namespace

RasterImage decode_image(const std::vector<std::uint8_t>& bytes) {
    static const std::uint8_t png_magic[] = {0x89, 'P', 'N', 'G'};
    static const std::uint8_t jpeg_magic[] = {0xFF, 0xD8, 0xFF};
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), png_magic, 4) == 0)
        return decode_png(bytes);
    if (bytes.size() >= 3 && std::memcmp(bytes.data(), jpeg_magic, 3) == 0)
        return decode_jpeg(bytes);
    throw IoError("unrecognized image format (expected PNG or JPEG)");
}

RasterImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading image file " + path.string());
    try {
        return decode_image(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    img.validate();
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    if (!png) throw IoError("failed to initialize PNG encoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("failed to initialize PNG encoder");
    }

    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(img.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed");
    }

    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride =
        static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.samples.data() + y * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void save_png(const RasterImage& img, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = encode_png(img);
    atomic_write_bytes(path, bytes.data(), bytes.size());
}

RasterImage to_luminance(const RasterImage& img) {
    img.validate();
    if (img.channels == 1) return img;
    RasterImage gray = RasterImage::create(img.width, img.height, 1);
    const std::size_t pixels =
        static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < pixels; ++i) {
        const double l = 0.299 * img.samples[i * 3] +
                         0.587 * img.samples[i * 3 + 1] +
                         0.114 * img.samples[i * 3 + 2];
        gray.samples[i] = static_cast<std::uint8_t>(std::lround(l));
    }
    return gray;
}

std::vector<double> luminance_f64(const RasterImage& img) {
    img.validate();
    const std::size_t pixels =
        static_cast<std::size_t>(img.width) * img.height;
    std::vector<double> out(pixels);
    if (img.channels == 1) {
        for (std::size_t i = 0; i < pixels; ++i) out[i] = img.samples[i];
    } else {
        for (std::size_t i = 0; i < pixels; ++i)
            out[i] = 0.299 * img.samples[i * 3] +
                     0.587 * img.samples[i * 3 + 1] +
                     0.114 * img.samples[i * 3 + 2];
    }
    return out;
}

void atomic_write_bytes(const std::filesystem::path& path, const void* data,
                        std::size_t size) {
    const std::filesystem::path parent = path.parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec)
            throw IoError("cannot create directory " + parent.string() + ": " +
                          ec.message());
    }
    const std::filesystem::path tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(static_cast<const char*>(data),
                  static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        throw IoError("cannot move temp file onto " + path.string() + ": " +
                      ec.message());
    }
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& text) {
    atomic_write_bytes(path, text.data(), text.size());
}

}  // namespace vamorph
