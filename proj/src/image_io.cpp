#include "gazelab/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

namespace gazelab {

namespace fs = std::filesystem;

void validate(const Image& img) {
    if (img.width < 8 || img.height < 8) {
        throw std::invalid_argument("image must be at least 8x8, got " + to_string(img.dims()));
    }
    if (img.channels != 1 && img.channels != 3) {
        throw std::invalid_argument("image must have 1 or 3 channels, got " + std::to_string(img.channels));
    }
    if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
        throw std::invalid_argument("image buffer size does not match its dimensions");
    }
    for (double v : img.data) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("image intensity outside [0,1]");
        }
    }
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw ImageIoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    }
    return f;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Raw decoded raster: samples widened to 16 bits, interleaved channels.
struct RawRaster {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::uint32_t maxval = 0;
    std::vector<std::uint16_t> samples;
};

// ---------------------------------------------------------------- PNM

class PnmReader {
public:
    PnmReader(std::vector<unsigned char> bytes, std::string name) : bytes_(std::move(bytes)), name_(std::move(name)) {}

    RawRaster read() {
        if (bytes_.size() < 2 || bytes_[0] != 'P') fail("not a PNM file");
        const char kind = static_cast<char>(bytes_[1]);
        pos_ = 2;
        int channels = 0;
        bool binary = false;
        switch (kind) {
            case '2': channels = 1; break;
            case '3': channels = 3; break;
            case '5': channels = 1; binary = true; break;
            case '6': channels = 3; binary = true; break;
            default: fail(std::string("unsupported PNM variant P") + kind);
        }
        RawRaster r;
        r.width = static_cast<int>(next_int());
        r.height = static_cast<int>(next_int());
        r.maxval = static_cast<std::uint32_t>(next_int());
        r.channels = channels;
        if (r.width <= 0 || r.height <= 0) fail("zero-area image");
        if (r.maxval == 0 || r.maxval > 65535) fail("maxval out of range");
        const std::size_t n = static_cast<std::size_t>(r.width) * r.height * channels;
        r.samples.resize(n);
        if (binary) {
            ++pos_;  // single whitespace after maxval
            const std::size_t bps = r.maxval > 255 ? 2 : 1;
            if (bytes_.size() < pos_ + n * bps) fail("truncated pixel data");
            for (std::size_t i = 0; i < n; ++i) {
                const unsigned char* p = &bytes_[pos_ + i * bps];
                r.samples[i] = bps == 2 ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : p[0];
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) r.samples[i] = static_cast<std::uint16_t>(next_int());
        }
        for (auto s : r.samples) {
            if (s > r.maxval) fail("sample exceeds maxval");
        }
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ImageIoError(name_ + ": " + what); }

    long next_int() {
        for (;;) {
            while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
            if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("malformed header");
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000) fail("header value too large");
            ++pos_;
        }
        return v;
    }

    std::vector<unsigned char> bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- PNG

RawRaster read_png_raw(const fs::path& path, bool keep16) {
    FilePtr file = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw ImageIoError(path.string() + ": not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("libpng initialisation failed");
    }
    RawRaster r;
    std::vector<png_bytep> rows;
    std::vector<unsigned char> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError(path.string() + ": corrupt PNG data");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (!keep16 && depth == 16) png_set_strip_16(png);
    if (depth == 16 && keep16) png_set_swap(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    r.width = static_cast<int>(png_get_image_width(png, info));
    r.height = static_cast<int>(png_get_image_height(png, info));
    r.channels = png_get_channels(png, info);
    const int out_depth = png_get_bit_depth(png, info);
    r.maxval = out_depth == 16 ? 65535u : 255u;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * static_cast<std::size_t>(r.height));
    rows.resize(static_cast<std::size_t>(r.height));
    for (int y = 0; y < r.height; ++y) rows[y] = buffer.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = static_cast<std::size_t>(r.width) * r.height * r.channels;
    r.samples.resize(n);
    if (out_depth == 16) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint16_t v;
            std::memcpy(&v, buffer.data() + 2 * i, 2);
            r.samples[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) r.samples[i] = buffer[i];
    }
    return r;
}

// ---------------------------------------------------------------- JPEG

struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RawRaster read_jpeg_raw(const fs::path& path) {
    FilePtr file = open_file(path, "rb");
    jpeg_decompress_struct cinfo{};
    JpegErrorManager jerr{};
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    RawRaster r;
    std::vector<JSAMPLE> row;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw ImageIoError(path.string() + ": " + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.jpeg_color_space != JCS_GRAYSCALE) cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    r.width = static_cast<int>(cinfo.output_width);
    r.height = static_cast<int>(cinfo.output_height);
    r.channels = cinfo.output_components;
    r.maxval = 255;
    r.samples.resize(static_cast<std::size_t>(r.width) * r.height * r.channels);
    row.resize(static_cast<std::size_t>(r.width) * r.channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW rp = row.data();
        const auto y = cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &rp, 1);
        std::copy(row.begin(), row.end(), r.samples.begin() + static_cast<std::ptrdiff_t>(y * row.size()));
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return r;
}

enum class Format { Png, Jpeg, Pnm, Unknown };

Format sniff(const fs::path& path) {
    FilePtr f = open_file(path, "rb");
    unsigned char head[8] = {};
    const std::size_t n = std::fread(head, 1, sizeof head, f.get());
    if (n >= 8 && png_sig_cmp(head, 0, 8) == 0) return Format::Png;
    if (n >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF) return Format::Jpeg;
    if (n >= 2 && head[0] == 'P' && head[1] >= '1' && head[1] <= '7') return Format::Pnm;
    return Format::Unknown;
}

RawRaster read_raw(const fs::path& path, bool keep16) {
    switch (sniff(path)) {
        case Format::Png: return read_png_raw(path, keep16);
        case Format::Jpeg: return read_jpeg_raw(path);
        case Format::Pnm: return PnmReader(read_bytes(path), path.string()).read();
        case Format::Unknown: break;
    }
    throw ImageIoError(path.string() + ": unsupported image format");
}

}  // namespace

Image read_image(const fs::path& path) {
    RawRaster raw = read_raw(path, false);
    if (raw.width <= 0 || raw.height <= 0) throw ImageIoError(path.string() + ": zero-area image");
    const int out_channels = raw.channels >= 3 ? 3 : 1;
    Image img = Image::blank(raw.width, raw.height, out_channels);
    const double scale = 1.0 / raw.maxval;
    const std::size_t pixels = static_cast<std::size_t>(raw.width) * raw.height;
    for (std::size_t i = 0; i < pixels; ++i) {
        for (int c = 0; c < out_channels; ++c) {
            img.data[i * out_channels + c] = raw.samples[i * raw.channels + c] * scale;
        }
    }
    return img;
}

GrayRaster read_gray16(const fs::path& path) {
    const Format fmt = sniff(path);
    if (fmt != Format::Png && fmt != Format::Pnm) {
        throw ImageIoError(path.string() + ": top-down maps must be 16-bit PGM or PNG");
    }
    RawRaster raw = read_raw(path, true);
    if (raw.channels != 1) throw ImageIoError(path.string() + ": expected a single-channel map");
    if (raw.maxval != 65535) throw ImageIoError(path.string() + ": expected 16-bit samples (maxval 65535)");
    if (raw.width <= 0 || raw.height <= 0) throw ImageIoError(path.string() + ": zero-area map");
    return {raw.width, raw.height, raw.maxval, std::move(raw.samples)};
}

void write_pgm16(const fs::path& path, const GrayRaster& raster) {
    if (raster.samples.size() != static_cast<std::size_t>(raster.width) * raster.height) {
        throw ImageIoError("raster size mismatch writing " + path.string());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot write '" + path.string() + "'");
    out << "P5\n" << raster.width << ' ' << raster.height << "\n65535\n";
    std::vector<char> bytes(raster.samples.size() * 2);
    for (std::size_t i = 0; i < raster.samples.size(); ++i) {
        bytes[2 * i] = static_cast<char>(raster.samples[i] >> 8);
        bytes[2 * i + 1] = static_cast<char>(raster.samples[i] & 0xFF);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ImageIoError("write failed for '" + path.string() + "'");
}

namespace {

std::uint8_t quantize8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_pnm8(const fs::path& path, const Image& img, int channels, const char* magic) {
    if (img.channels != channels) throw ImageIoError("channel mismatch writing " + path.string());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot write '" + path.string() + "'");
    out << magic << '\n' << img.width << ' ' << img.height << "\n255\n";
    std::vector<char> bytes(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) bytes[i] = static_cast<char>(quantize8(img.data[i]));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ImageIoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_pgm8(const fs::path& path, const Image& gray) { write_pnm8(path, gray, 1, "P5"); }
void write_ppm8(const fs::path& path, const Image& rgb) { write_pnm8(path, rgb, 3, "P6"); }

void write_png(const fs::path& path, const Rgb8& image) {
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
        throw ImageIoError("pixel buffer size mismatch writing " + path.string());
    }
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw ImageIoError("libpng initialisation failed");
    }
    std::vector<png_const_bytep> rows(static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) rows[y] = image.pixels.data() + static_cast<std::size_t>(y) * image.width * 3;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ImageIoError("failed writing PNG '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Rgb8 read_png_rgb8(const fs::path& path) {
    RawRaster raw = read_png_raw(path, false);
    Rgb8 out{raw.width, raw.height, {}};
    const std::size_t pixels = static_cast<std::size_t>(raw.width) * raw.height;
    out.pixels.resize(pixels * 3);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (int c = 0; c < 3; ++c) {
            out.pixels[i * 3 + c] = static_cast<std::uint8_t>(raw.samples[i * raw.channels + (raw.channels >= 3 ? c : 0)]);
        }
    }
    return out;
}

Rgb8 to_rgb8(const Image& img) {
    Rgb8 out{img.width, img.height, {}};
    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    out.pixels.resize(pixels * 3);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (int c = 0; c < 3; ++c) {
            out.pixels[i * 3 + c] = quantize8(img.data[i * img.channels + (img.channels == 3 ? c : 0)]);
        }
    }
    return out;
}

}  // namespace gazelab
