#include "layergen/scenegen/png_io.hpp"

#include <zlib.h>

#include <cstdlib>
#include <cstring>
#include <fstream>

#include "layergen/core/shape.hpp"

namespace layergen::png {

namespace {

const std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::uint8_t* data,
               std::size_t len) {
    put_u32(out, static_cast<std::uint32_t>(len));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    if (len > 0) out.insert(out.end(), data, data + len);
    const auto crc =
        crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

std::vector<std::uint8_t> encode(const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        throw ValueError("png::encode: channels must be 1 or 3, got " + std::to_string(img.channels));
    if (img.width < 1 || img.height < 1 ||
        img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels)
        throw ValueError("png::encode: pixel buffer does not match dimensions");

    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    std::vector<std::uint8_t> raw((stride + 1) * img.height);
    for (int r = 0; r < img.height; ++r) {
        raw[r * (stride + 1)] = 0;  // filter: None
        std::memcpy(raw.data() + r * (stride + 1) + 1, img.pixels.data() + r * stride, stride);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IoError("png::encode: zlib compression failed");
    compressed.resize(bound);

    std::vector<std::uint8_t> out(kSignature, kSignature + 8);
    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(img.width >> 24);
    ihdr[1] = static_cast<std::uint8_t>(img.width >> 16);
    ihdr[2] = static_cast<std::uint8_t>(img.width >> 8);
    ihdr[3] = static_cast<std::uint8_t>(img.width);
    ihdr[4] = static_cast<std::uint8_t>(img.height >> 24);
    ihdr[5] = static_cast<std::uint8_t>(img.height >> 16);
    ihdr[6] = static_cast<std::uint8_t>(img.height >> 8);
    ihdr[7] = static_cast<std::uint8_t>(img.height);
    ihdr[8] = 8;                                   // bit depth
    ihdr[9] = img.channels == 1 ? 0 : 2;           // gray / truecolor
    ihdr[10] = ihdr[11] = ihdr[12] = 0;            // deflate, adaptive, no interlace
    put_chunk(out, "IHDR", ihdr, sizeof(ihdr));
    put_chunk(out, "IDAT", compressed.data(), compressed.size());
    put_chunk(out, "IEND", nullptr, 0);
    return out;
}

Image decode(const std::uint8_t* data, std::size_t size) {
    if (size < 8 || std::memcmp(data, kSignature, 8) != 0)
        throw IoError("png::decode: not a PNG stream");

    Image img;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    bool seen_ihdr = false, seen_iend = false;
    while (pos + 12 <= size && !seen_iend) {
        const std::uint32_t len = get_u32(data + pos);
        if (pos + 12 + len > size) throw IoError("png::decode: truncated chunk");
        const char* type = reinterpret_cast<const char*>(data + pos + 4);
        const std::uint8_t* body = data + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw IoError("png::decode: bad IHDR");
            img.width = static_cast<int>(get_u32(body));
            img.height = static_cast<int>(get_u32(body + 4));
            const int depth = body[8], color = body[9], interlace = body[12];
            if (depth != 8 || (color != 0 && color != 2) || interlace != 0)
                throw IoError("png::decode: unsupported format (need 8-bit gray/RGB, no interlace)");
            img.channels = color == 0 ? 1 : 3;
            seen_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), body, body + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            seen_iend = true;
        }
        pos += 12 + len;
    }
    if (!seen_ihdr || img.width < 1 || img.height < 1) throw IoError("png::decode: missing IHDR");

    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    const std::size_t raw_size = (stride + 1) * img.height;
    std::vector<std::uint8_t> raw(raw_size);
    uLongf out_len = static_cast<uLongf>(raw_size);
    if (uncompress(raw.data(), &out_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        out_len != raw_size)
        throw IoError("png::decode: zlib inflate failed");

    img.pixels.assign(stride * img.height, 0);
    const int bpp = img.channels;
    for (int r = 0; r < img.height; ++r) {
        const std::uint8_t filter = raw[r * (stride + 1)];
        const std::uint8_t* src = raw.data() + r * (stride + 1) + 1;
        std::uint8_t* cur = img.pixels.data() + r * stride;
        const std::uint8_t* up = r > 0 ? img.pixels.data() + (r - 1) * stride : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
            const int b = up != nullptr ? up[i] : 0;
            const int c = (up != nullptr && i >= static_cast<std::size_t>(bpp)) ? up[i - bpp] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw IoError("png::decode: unknown row filter");
            }
            cur[i] = static_cast<std::uint8_t>(v & 0xFF);
        }
    }
    return img;
}

void write(const std::string& path, const Image& img) {
    const auto bytes = encode(img);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("png::write: cannot open " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("png::write: short write to " + path);
}

Image read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("png::read: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode(bytes.data(), bytes.size());
}

}  // namespace layergen::png
