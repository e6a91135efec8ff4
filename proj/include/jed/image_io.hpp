#pragma once

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "jed/core.hpp"

namespace jed {

enum class ImageFormat { png, ppm };

// Round-half-up quantization of a [0,1] value to one byte; out-of-range input
// is clamped first.
inline unsigned char quantize_byte(double v) {
    return static_cast<unsigned char>(std::floor(clamp01(v) * 255.0 + 0.5));
}

namespace detail {

inline ColorImage planes_from_rgb8(const std::vector<unsigned char>& rgb, int width, int height,
                                   int channels) {
    ImagePlane r(width, height), g(width, height), b(width, height);
    std::size_t n = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* px = rgb.data() + i * channels;
        r.values()[i] = px[0] / 255.0;
        g.values()[i] = px[1] / 255.0;
        b.values()[i] = px[2] / 255.0;
    }
    return ColorImage(std::move(r), std::move(g), std::move(b));
}

// --- PPM (binary P6, maxval 255) ---

inline bool ppm_skip_space(const std::vector<unsigned char>& bytes, std::size_t& pos) {
    bool skipped = false;
    while (pos < bytes.size()) {
        unsigned char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
        skipped = true;
    }
    return skipped;
}

inline long ppm_read_int(const std::vector<unsigned char>& bytes, std::size_t& pos) {
    if (!ppm_skip_space(bytes, pos))
        throw DecodeError("ppm: missing separator in header");
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9')
        throw DecodeError("ppm: expected integer in header");
    long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
        value = value * 10 + (bytes[pos] - '0');
        if (value > 1'000'000'000) throw DecodeError("ppm: header value out of range");
        ++pos;
    }
    return value;
}

inline ColorImage decode_ppm(const std::vector<unsigned char>& bytes) {
    std::size_t pos = 2;  // past "P6"
    long width = ppm_read_int(bytes, pos);
    long height = ppm_read_int(bytes, pos);
    long maxval = ppm_read_int(bytes, pos);
    if (width < 1 || height < 1)
        throw DecodeError("ppm: bad dimensions");
    if (maxval != 255)
        throw UnsupportedFormatError("ppm: only maxval 255 is supported");
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size() || !(bytes[pos] == ' ' || bytes[pos] == '\t' || bytes[pos] == '\r' ||
                                 bytes[pos] == '\n'))
        throw DecodeError("ppm: missing raster separator");
    ++pos;
    std::size_t need = static_cast<std::size_t>(width) * height * 3;
    if (bytes.size() - pos < need)
        throw DecodeError("ppm: truncated pixel data");
    std::vector<unsigned char> rgb(bytes.begin() + pos, bytes.begin() + pos + need);
    return planes_from_rgb8(rgb, static_cast<int>(width), static_cast<int>(height), 3);
}

inline std::vector<unsigned char> encode_ppm(const ColorImage& img) {
    std::string header = "P6\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    out.reserve(out.size() + n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(quantize_byte(img.r.values()[i]));
        out.push_back(quantize_byte(img.g.values()[i]));
        out.push_back(quantize_byte(img.b.values()[i]));
    }
    return out;
}

// --- PNG (8-bit truecolor, optionally with alpha; non-interlaced) ---

constexpr unsigned char kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

inline std::uint32_t read_u32be(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void push_u32be(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

inline int paeth_predictor(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

inline void unfilter_scanline(int filter, unsigned char* row, const unsigned char* prev,
                              std::size_t rowbytes, int bpp) {
    switch (filter) {
        case 0:
            break;
        case 1:  // Sub
            for (std::size_t i = bpp; i < rowbytes; ++i) row[i] += row[i - bpp];
            break;
        case 2:  // Up
            if (prev)
                for (std::size_t i = 0; i < rowbytes; ++i) row[i] += prev[i];
            break;
        case 3:  // Average
            for (std::size_t i = 0; i < rowbytes; ++i) {
                int left = i >= static_cast<std::size_t>(bpp) ? row[i - bpp] : 0;
                int up = prev ? prev[i] : 0;
                row[i] = static_cast<unsigned char>(row[i] + (left + up) / 2);
            }
            break;
        case 4:  // Paeth
            for (std::size_t i = 0; i < rowbytes; ++i) {
                int left = i >= static_cast<std::size_t>(bpp) ? row[i - bpp] : 0;
                int up = prev ? prev[i] : 0;
                int upleft = (prev && i >= static_cast<std::size_t>(bpp)) ? prev[i - bpp] : 0;
                row[i] = static_cast<unsigned char>(row[i] + paeth_predictor(left, up, upleft));
            }
            break;
        default:
            throw DecodeError("png: invalid filter type");
    }
}

inline ColorImage decode_png(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 8 + 25 || std::memcmp(bytes.data(), kPngSignature, 8) != 0)
        throw DecodeError("png: bad signature");

    std::size_t pos = 8;
    bool seen_ihdr = false, seen_iend = false;
    std::uint32_t width = 0, height = 0;
    int bit_depth = 0, color_type = 0, interlace = 0;
    std::vector<unsigned char> idat;

    while (pos + 12 <= bytes.size() && !seen_iend) {
        std::uint32_t len = read_u32be(bytes.data() + pos);
        if (pos + 12 + static_cast<std::size_t>(len) > bytes.size())
            throw DecodeError("png: truncated chunk");
        const unsigned char* type = bytes.data() + pos + 4;
        const unsigned char* data = bytes.data() + pos + 8;
        std::uint32_t stored_crc = read_u32be(data + len);
        std::uint32_t actual_crc =
            static_cast<std::uint32_t>(crc32(crc32(0L, type, 4), data, len));
        if (stored_crc != actual_crc) throw DecodeError("png: chunk CRC mismatch");

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw DecodeError("png: bad IHDR length");
            width = read_u32be(data);
            height = read_u32be(data + 4);
            bit_depth = data[8];
            color_type = data[9];
            if (data[10] != 0 || data[11] != 0) throw DecodeError("png: bad IHDR fields");
            interlace = data[12];
            if (width == 0 || height == 0) throw DecodeError("png: zero dimension");
            if (width > 1'000'000 || height > 1'000'000 ||
                static_cast<std::uint64_t>(width) * height > (std::uint64_t(1) << 28))
                throw DecodeError("png: unreasonable dimensions");
            seen_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            if (!seen_ihdr) throw DecodeError("png: IDAT before IHDR");
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            seen_iend = true;
        }
        // Ancillary chunks are skipped.
        pos += 12 + len;
    }
    if (!seen_ihdr || !seen_iend) throw DecodeError("png: missing IHDR or IEND");

    if (bit_depth != 8)
        throw UnsupportedFormatError("png: only 8-bit images are supported");
    if (color_type != 2 && color_type != 6)
        throw UnsupportedFormatError("png: only truecolor (RGB/RGBA) is supported");
    if (interlace != 0)
        throw UnsupportedFormatError("png: interlaced images are not supported");

    int bpp = color_type == 6 ? 4 : 3;
    std::size_t rowbytes = static_cast<std::size_t>(width) * bpp;
    std::size_t raw_size = static_cast<std::size_t>(height) * (rowbytes + 1);
    std::vector<unsigned char> raw(raw_size);
    uLongf dest_len = raw_size;
    int zret = uncompress(raw.data(), &dest_len, idat.data(), static_cast<uLong>(idat.size()));
    if (zret != Z_OK || dest_len != raw_size)
        throw DecodeError("png: corrupt or mismatched pixel stream");

    std::vector<unsigned char> pixels(static_cast<std::size_t>(height) * rowbytes);
    const unsigned char* prev = nullptr;
    for (std::uint32_t y = 0; y < height; ++y) {
        const unsigned char* src = raw.data() + y * (rowbytes + 1);
        unsigned char* dst = pixels.data() + y * rowbytes;
        std::memcpy(dst, src + 1, rowbytes);
        unfilter_scanline(src[0], dst, prev, rowbytes, bpp);
        prev = dst;
    }
    return planes_from_rgb8(pixels, static_cast<int>(width), static_cast<int>(height), bpp);
}

inline void push_chunk(std::vector<unsigned char>& out, const char* type,
                       const std::vector<unsigned char>& data) {
    push_u32be(out, static_cast<std::uint32_t>(data.size()));
    std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + data.size())));
    push_u32be(out, crc);
}

inline std::vector<unsigned char> encode_png(const ColorImage& img) {
    std::uint32_t width = static_cast<std::uint32_t>(img.width());
    std::uint32_t height = static_cast<std::uint32_t>(img.height());
    std::size_t rowbytes = static_cast<std::size_t>(width) * 3;

    // Filter type 0 on every scanline; pinned deflate level keeps output
    // byte-reproducible run to run.
    std::vector<unsigned char> raw(static_cast<std::size_t>(height) * (rowbytes + 1));
    for (std::uint32_t y = 0; y < height; ++y) {
        unsigned char* row = raw.data() + y * (rowbytes + 1);
        row[0] = 0;
        for (std::uint32_t x = 0; x < width; ++x) {
            row[1 + x * 3 + 0] = quantize_byte(img.r(static_cast<int>(x), static_cast<int>(y)));
            row[1 + x * 3 + 1] = quantize_byte(img.g(static_cast<int>(x), static_cast<int>(y)));
            row[1 + x * 3 + 2] = quantize_byte(img.b(static_cast<int>(x), static_cast<int>(y)));
        }
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw std::runtime_error("png: deflate failed");
    compressed.resize(bound);

    std::vector<unsigned char> out(kPngSignature, kPngSignature + 8);
    std::vector<unsigned char> ihdr;
    push_u32be(ihdr, width);
    push_u32be(ihdr, height);
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT", compressed);
    push_chunk(out, "IEND", {});
    return out;
}

}  // namespace detail

// Decodes an 8-bit RGB image (PNG truecolor or binary PPM), scaling byte v to v/255.
inline ColorImage decode_image(const std::vector<unsigned char>& bytes) {
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), detail::kPngSignature, 8) == 0)
        return detail::decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P') {
        if (bytes[1] == '6') return detail::decode_ppm(bytes);
        if (bytes[1] >= '1' && bytes[1] <= '7')
            throw UnsupportedFormatError("only binary PPM (P6) is supported");
    }
    throw DecodeError("unrecognized image format");
}

inline std::vector<unsigned char> encode_image(const ColorImage& img,
                                               ImageFormat format = ImageFormat::png) {
    return format == ImageFormat::png ? detail::encode_png(img) : detail::encode_ppm(img);
}

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline ImageFormat format_from_path(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == "ppm" ? ImageFormat::ppm : ImageFormat::png;
}

inline ColorImage load_image(const std::string& path) {
    return decode_image(read_file(path));
}

inline void save_image(const std::string& path, const ColorImage& img) {
    write_file(path, encode_image(img, format_from_path(path)));
}

}  // namespace jed
